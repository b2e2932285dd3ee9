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

#include "bgan/continuous.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bgan/csv.hpp"
#include "bgan/error.hpp"

namespace bgan {

GeneratorLossKind parse_loss_kind(const std::string& name)
{
  if (name == "bgan" || name == "boundary")
    return GeneratorLossKind::BoundarySeeking;
  if (name == "minimax")
    return GeneratorLossKind::Minimax;
  if (name == "proxy")
    return GeneratorLossKind::Proxy;
  throw ConfigError("loss: unknown kind '" + name + "' (expected bgan|minimax|proxy)");
}

std::string loss_kind_name(GeneratorLossKind kind)
{
  switch (kind) {
  case GeneratorLossKind::BoundarySeeking: return "bgan";
  case GeneratorLossKind::Minimax: return "minimax";
  case GeneratorLossKind::Proxy: return "proxy";
  }
  return "?";
}

Tensor boundary_objective(const Tensor& statistics)
{
  if (statistics.size() == 0)
    throw ShapeError("boundary_objective: empty batch");
  return mean(square(statistics));
}

Tensor minimax_generator_loss(const FDivergence& div, const Tensor& statistics)
{
  return neg(mean(div.conjugate_of_activation(statistics)));
}

Tensor proxy_generator_loss(const Tensor& statistics)
{
  return mean(softplus(neg(statistics)));
}

Tensor generator_loss(GeneratorLossKind kind, const FDivergence& div,
                      const Tensor& statistics)
{
  switch (kind) {
  case GeneratorLossKind::BoundarySeeking: return boundary_objective(statistics);
  case GeneratorLossKind::Minimax: return minimax_generator_loss(div, statistics);
  case GeneratorLossKind::Proxy: return proxy_generator_loss(statistics);
  }
  throw ConfigError("unknown generator loss kind");
}

Tensor gradient_norm_penalty(const StatisticNetwork& net, const Matrix& x,
                             double coefficient)
{
  if (coefficient < 0.0)
    throw ConfigError("penalty coefficient must be non-negative");
  if (coefficient == 0.0 || x.rows() == 0)
    return Tensor::scalar(0.0);
  Tensor input = to_tensor(x, true);
  Tensor out = net.forward(input);
  const Tensor wrt[] = {input};
  Tensor g = grad(sum(out), wrt, /*create_graph=*/true)[0];
  return scale(sum(square(g)), 0.5 * coefficient / static_cast<double>(x.rows()));
}

DiscriminatorStep discriminator_step(const FDivergence& div, StatisticNetwork& net,
                                     Optimizer& opt, const Matrix& real,
                                     const Matrix& fake, double penalty_coefficient,
                                     double clamp, PenaltySide side)
{
  if (real.rows() == 0 || fake.rows() == 0)
    throw ShapeError("discriminator_step: empty batch");
  Tensor bound = variational_lower_bound(div, net.forward(real), net.forward(fake), clamp);
  Tensor penalty = gradient_norm_penalty(net, real, penalty_coefficient);
  if (side == PenaltySide::Both)
    penalty = penalty + gradient_norm_penalty(net, fake, penalty_coefficient);
  Tensor loss = penalty - bound;
  auto params = net.parameters();
  auto grads = grad(loss, params);
  DiscriminatorStep result;
  result.bound = bound.item();
  result.penalty = penalty.item();
  result.grad_norm = global_norm(grads);
  opt.step(params, grads);
  return result;
}

int modes_covered(const ModeSet& modes, const Matrix& samples, double min_share,
                  double radius_sigmas)
{
  const Eigen::Index k = modes.centers.rows();
  if (k == 0 || samples.rows() == 0)
    return 0;
  if (samples.cols() != modes.centers.cols())
    throw ShapeError("modes_covered: sample width does not match mode centres");
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  const double r2 = radius_sigmas * radius_sigmas * modes.sigma * modes.sigma;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    Eigen::Index best = -1;
    double best_d2 = r2;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d2 = (samples.row(i) - modes.centers.row(c)).squaredNorm();
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    if (best >= 0)
      ++counts[static_cast<std::size_t>(best)];
  }
  const double need = min_share * static_cast<double>(samples.rows());
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [&](std::size_t n) {
    return static_cast<double>(n) >= need;
  }));
}

namespace {

Matrix sample_rows(const Matrix& data, std::size_t n, Rng& rng)
{
  Matrix out(static_cast<Eigen::Index>(n), data.cols());
  for (std::size_t i = 0; i < n; ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        data.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(data.rows()))));
  return out;
}

Matrix generate(const Generator& gen, std::size_t n, Rng& rng)
{
  NoGradGuard guard;
  return to_matrix(gen.parameters_for(sample_prior(gen.prior(), n, rng)));
}

} // namespace

std::vector<ContinuousMetrics>
train_continuous(const ContinuousConfig& config, Generator& generator,
                 StatisticNetwork& net, const Matrix& dataset, const ModeSet* modes,
                 const std::function<void(const ContinuousMetrics&)>& on_row)
{
  if (generator.family().kind != FamilyKind::Deterministic)
    throw ConfigError("train_continuous needs a deterministic generator family");
  if (config.batch_size == 0)
    throw ConfigError("batch_size must be positive");
  if (config.gen_steps_per_disc == 0)
    throw ConfigError("gen_steps_per_disc must be positive");
  if (dataset.rows() == 0)
    throw ConfigError("train_continuous: empty dataset");
  if (static_cast<std::size_t>(dataset.cols()) != generator.family().observed_dim() ||
      static_cast<std::size_t>(dataset.cols()) != net.input_dim())
    throw ShapeError("train_continuous: dataset width does not match the models");

  const FDivergence div(config.divergence);
  Rng rng(config.seed);
  Rng eval_rng(config.seed ^ 0x5eed0c0feULL);
  auto disc_opt = make_optimizer(config.disc_optimizer);
  auto gen_opt = make_optimizer(config.gen_optimizer);
  auto gen_params = generator.parameters();
  const auto start = std::chrono::steady_clock::now();

  std::vector<ContinuousMetrics> rows;
  std::size_t done = 0;
  std::size_t next_coverage = config.coverage_every;
  while (done < config.generator_steps) {
    ContinuousMetrics row;
    try {
      Matrix real = sample_rows(dataset, config.batch_size, rng);
      Matrix fake = generate(generator, config.batch_size, rng);
      auto ds = discriminator_step(div, net, *disc_opt, real, fake,
                                   config.penalty_coefficient, config.clamp,
                                   config.penalty_side);
      row.disc_bound = ds.bound;
      row.penalty = ds.penalty;
      for (std::size_t k = 0; k < config.gen_steps_per_disc && done < config.generator_steps;
           ++k) {
        Tensor x = generator.parameters_for(sample_prior(generator.prior(),
                                                         config.batch_size, rng));
        Tensor loss = generator_loss(config.loss, div, net.forward(x));
        auto grads = grad(loss, gen_params);
        gen_opt->step(gen_params, grads);
        row.gen_loss = loss.item();
        ++done;
      }
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("continuous training diverged at generator step " +
                           std::to_string(done) + ": " + e.what());
    }
    row.iteration = done;
    if (modes && config.coverage_every > 0 &&
        (done >= next_coverage || done == config.generator_steps)) {
      row.modes_covered =
          modes_covered(*modes, generate(generator, config.coverage_samples, eval_rng));
      while (next_coverage <= done)
        next_coverage += config.coverage_every;
    }
    if (config.record_timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    rows.push_back(row);
    if (on_row)
      on_row(row);
  }
  return rows;
}

PixelDescentResult pixel_descent(const StatisticNetwork& net, const Matrix& x_init,
                                 GeneratorLossKind kind, const FDivergence& div,
                                 std::size_t steps, double step_size)
{
  return pixel_descent([&net](const Tensor& x) { return net.forward(x); }, x_init, kind,
                       div, steps, step_size);
}

PixelDescentResult pixel_descent(const StatisticFn& statistic, const Matrix& x_init,
                                 GeneratorLossKind kind, const FDivergence& div,
                                 std::size_t steps, double step_size)
{
  if (!(step_size >= 0.0))
    throw ConfigError("pixel descent step size must be non-negative");
  PixelDescentResult result;
  result.initial = x_init;
  Matrix x = x_init;
  const double n = static_cast<double>(x.rows());
  for (std::size_t s = 0;; ++s) {
    Tensor input = to_tensor(x, true);
    Tensor F = statistic(input);
    Tensor loss = generator_loss(kind, div, F);
    result.losses.push_back(loss.item());
    std::vector<double> abs_f;
    for (double v : F.values())
      abs_f.push_back(std::abs(v));
    std::nth_element(abs_f.begin(), abs_f.begin() + abs_f.size() / 2, abs_f.end());
    result.median_abs_statistic.push_back(abs_f[abs_f.size() / 2]);
    if (s == steps)
      break;
    // Each sample descends its own loss, so the batch mean is undone here.
    const Tensor wrt[] = {input};
    Tensor g = grad(loss, wrt)[0];
    if (step_size != 0.0) {
      auto gv = g.values();
      for (Eigen::Index i = 0; i < x.size(); ++i)
        x.data()[i] -= step_size * n * gv[static_cast<std::size_t>(i)];
    }
  }
  result.final = x;
  return result;
}

void write_continuous_csv(const std::string& path,
                          const std::vector<ContinuousMetrics>& rows)
{
  CsvWriter csv(path, {"iteration", "gen_loss", "disc_bound", "penalty", "modes_covered",
                       "wall_ms"});
  for (const auto& r : rows) {
    csv.cell(r.iteration).cell(r.gen_loss).cell(r.disc_bound).cell(r.penalty);
    if (r.modes_covered >= 0)
      csv.cell(r.modes_covered);
    else
      csv.cell(std::string());
    csv.cell(r.wall_ms).end_row();
  }
}

} // namespace bgan
