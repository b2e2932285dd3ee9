/*
 * Copyright 2026 The bgan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BGAN_CONTINUOUS_HPP
#define BGAN_CONTINUOUS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bgan/fdivergence.hpp"
#include "bgan/models.hpp"
#include "bgan/optim.hpp"

namespace bgan {

enum class GeneratorLossKind
{
  BoundarySeeking,
  Minimax,
  Proxy
};

GeneratorLossKind parse_loss_kind(const std::string& name);
std::string loss_kind_name(GeneratorLossKind kind);

/// Mean of F^2. Zero exactly on the decision boundary F = 0.
Tensor boundary_objective(const Tensor& statistics);

/// -mean f*(nu(F)); minimising it pushes the lower bound down over theta.
Tensor minimax_generator_loss(const FDivergence& div, const Tensor& statistics);

/// -mean log sigmoid(F), the non-saturating heuristic.
Tensor proxy_generator_loss(const Tensor& statistics);

Tensor generator_loss(GeneratorLossKind kind, const FDivergence& div,
                      const Tensor& statistics);

/// coefficient / 2 * mean_i ||d F(x_i) / d x_i||^2, built with a
/// differentiable input-gradient so the result can be back-propagated into
/// the statistic network's parameters.
Tensor gradient_norm_penalty(const StatisticNetwork& net, const Matrix& x,
                             double coefficient);

enum class PenaltySide
{
  RealOnly,
  Both
};

struct DiscriminatorStep
{
  double bound = 0.0;   // pre-penalty lower bound at the pre-update parameters
  double penalty = 0.0;
  double grad_norm = 0.0;
};

/// One ascent step of the lower bound minus the penalty on the statistic
/// network. `fake` may hold more rows than `real`; each side is averaged on
/// its own.
DiscriminatorStep discriminator_step(const FDivergence& div, StatisticNetwork& net,
                                     Optimizer& opt, const Matrix& real,
                                     const Matrix& fake, double penalty_coefficient,
                                     double clamp = kDefaultStatisticClamp,
                                     PenaltySide side = PenaltySide::RealOnly);

struct ContinuousConfig
{
  Divergence divergence = Divergence::Gan;
  GeneratorLossKind loss = GeneratorLossKind::BoundarySeeking;
  std::size_t batch_size = 64;
  std::size_t generator_steps = 20000;
  std::size_t gen_steps_per_disc = 5;
  OptimizerConfig disc_optimizer;
  OptimizerConfig gen_optimizer;
  double penalty_coefficient = 5.0;
  PenaltySide penalty_side = PenaltySide::RealOnly;
  double clamp = kDefaultStatisticClamp;
  std::size_t coverage_every = 1000;
  std::size_t coverage_samples = 2000;
  std::uint64_t seed = 0;
  bool record_timing = false;
};

struct ContinuousMetrics
{
  std::size_t iteration = 0;
  double gen_loss = 0.0;
  double disc_bound = 0.0;
  double penalty = 0.0;
  int modes_covered = -1; // -1 where coverage was not evaluated
  double wall_ms = 0.0;
};

/// Mode centres and width used by the coverage metric.
struct ModeSet
{
  Matrix centers; // one row per mode
  double sigma = 1.0;
};

/// Number of modes that receive at least `min_share` of the samples within
/// `radius_sigmas` standard deviations of their centre.
int modes_covered(const ModeSet& modes, const Matrix& samples, double min_share = 0.02,
                  double radius_sigmas = 3.0);

/// Alternating training of a deterministic generator. Each discriminator
/// step is followed by `gen_steps_per_disc` generator steps; the run ends
/// after `generator_steps` generator updates.
std::vector<ContinuousMetrics>
train_continuous(const ContinuousConfig& config, Generator& generator,
                 StatisticNetwork& net, const Matrix& dataset, const ModeSet* modes,
                 const std::function<void(const ContinuousMetrics&)>& on_row = {});

struct PixelDescentResult
{
  std::vector<double> losses;  // one entry per step plus the initial value
  std::vector<double> median_abs_statistic;
  Matrix initial;
  Matrix final;
};

/// Plain gradient descent on the samples themselves against a frozen
/// statistic network.
PixelDescentResult pixel_descent(const StatisticNetwork& net, const Matrix& x_init,
                                 GeneratorLossKind kind, const FDivergence& div,
                                 std::size_t steps, double step_size);

/// Same, for an arbitrary differentiable statistic (one value per row).
using StatisticFn = std::function<Tensor(const Tensor&)>;
PixelDescentResult pixel_descent(const StatisticFn& statistic, const Matrix& x_init,
                                 GeneratorLossKind kind, const FDivergence& div,
                                 std::size_t steps, double step_size);

void write_continuous_csv(const std::string& path,
                          const std::vector<ContinuousMetrics>& rows);

} // namespace bgan

#endif // BGAN_CONTINUOUS_HPP
