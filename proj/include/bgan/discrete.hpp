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

#ifndef BGAN_DISCRETE_HPP
#define BGAN_DISCRETE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bgan/continuous.hpp"
#include "bgan/fdivergence.hpp"
#include "bgan/models.hpp"
#include "bgan/optim.hpp"

namespace bgan {

// Importance weights for an N x M block of statistic values. Row n holds the
// M draws from the conditional of prior sample n.
struct WeightBatch
{
  Matrix log_w;
  Matrix normalized;
  double beta_estimate = 0.0;
  double log_beta_estimate = 0.0;
  std::vector<double> alpha_estimates;
};

WeightBatch compute_weights(const Matrix& statistics);

enum class Estimator
{
  Alpha,
  Beta,
  Reinforce
};

Estimator parse_estimator(const std::string& name);
std::string estimator_name(Estimator e);

struct BaselineState
{
  double value = 0.0;
  double decay = 0.9;

  void update(double reward) { value = decay * value + (1.0 - decay) * reward; }
};

// Surrogate losses. Their theta-gradient is the estimator; the weights or
// rewards enter as constants. `log_probs` is an (N*M) x 1 column in n-major
// order, aligned with the rows of the weight matrices.
Tensor alpha_surrogate(const WeightBatch& weights, const Tensor& log_probs);
Tensor beta_surrogate(const WeightBatch& weights, const Tensor& log_probs);
Tensor reinforce_surrogate(const Matrix& statistics, const Tensor& log_probs,
                           double baseline);

std::vector<Tensor> policy_gradient_alpha(const WeightBatch& weights,
                                          const Tensor& log_probs,
                                          const std::vector<Tensor>& params);
std::vector<Tensor> policy_gradient_beta(const WeightBatch& weights,
                                         const Tensor& log_probs,
                                         const std::vector<Tensor>& params);
// Uses the current baseline value, then folds mean F into it.
std::vector<Tensor> policy_gradient_reinforce(const Matrix& statistics,
                                              const Tensor& log_probs,
                                              BaselineState& baseline,
                                              const std::vector<Tensor>& params);

struct TrainConfig
{
  std::size_t n_prior = 64;
  std::size_t m_conditional = 20;
  OptimizerConfig disc_optimizer;
  OptimizerConfig gen_optimizer;
  Divergence divergence = Divergence::Gan;
  double penalty_coefficient = 5.0;
  Estimator estimator = Estimator::Alpha;
  std::size_t iterations = 1000;
  double clamp = kDefaultStatisticClamp;
  double baseline_decay = 0.9;
  std::uint64_t seed = 0;
  bool record_timing = false;

  void validate() const;
};

struct DiscreteMetrics
{
  std::size_t iteration = 0;
  double bound_estimate = 0.0;
  double beta_hat = 0.0;
  double grad_norm_g = 0.0;
  double grad_norm_d = 0.0;
  double baseline = 0.0;
  double wall_ms = 0.0;
};

/// One generator update from a fresh N x M sample block; returns the
/// estimator gradient norm. Exposed for the variance experiment.
struct GeneratorSample
{
  Matrix z;
  Matrix x;          // (N*M) x observed_dim
  Matrix statistics; // N x M
};

GeneratorSample draw_generator_sample(const Generator& gen, const StatisticNetwork& net,
                                      std::size_t n, std::size_t m, Rng& rng);

std::vector<Tensor> estimator_gradient(Estimator estimator, const Generator& gen,
                                       const GeneratorSample& sample,
                                       BaselineState& baseline);

/// Alternates one discriminator step with one generator step. Real batches
/// of N rows are taken from `dataset` by shuffled epochs.
std::vector<DiscreteMetrics>
train_discrete(const TrainConfig& config, Generator& generator, StatisticNetwork& net,
               const Matrix& dataset,
               const std::function<void(const DiscreteMetrics&)>& on_row = {});

void write_discrete_csv(const std::string& path, const std::vector<DiscreteMetrics>& rows);

// Adversarial classification: the classifier is a generator of labels given
// inputs, and the statistic network sees (x, y) pairs.
struct AdvClassConfig
{
  TrainConfig train;
  std::size_t batch_size = 32; // inputs per step; M labels drawn per input
};

struct AdvClassStep
{
  double bound = 0.0;
  double grad_norm_g = 0.0;
};

AdvClassStep adversarial_classification_step(const FDivergence& div, StatisticNetwork& net,
                                             Optimizer& disc_opt, Generator& classifier,
                                             Optimizer& cls_opt, const Matrix& x,
                                             const Matrix& y, std::size_t m,
                                             Estimator estimator, BaselineState& baseline,
                                             double penalty_coefficient, double clamp,
                                             Rng& rng);

std::vector<AdvClassStep> train_adversarial_classifier(const AdvClassConfig& config,
                                                       Generator& classifier,
                                                       StatisticNetwork& net,
                                                       const Matrix& x, const Matrix& y);

/// Supervised reference: minimise -mean log q(y|x) with the same optimiser
/// settings and batch schedule.
void train_cross_entropy(const AdvClassConfig& config, Generator& classifier,
                         const Matrix& x, const Matrix& y);

/// Fraction of rows whose most probable class matches the one-hot label.
double classification_accuracy(const Generator& classifier, const Matrix& x,
                               const Matrix& y);

} // namespace bgan

#endif // BGAN_DISCRETE_HPP
