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

#include "bgan/discrete.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "bgan/csv.hpp"
#include "bgan/error.hpp"

namespace bgan {

WeightBatch compute_weights(const Matrix& statistics)
{
  const Eigen::Index n = statistics.rows(), m = statistics.cols();
  if (n == 0 || m == 0)
    throw ShapeError("compute_weights: empty statistic block");
  for (Eigen::Index i = 0; i < statistics.size(); ++i)
    if (!std::isfinite(statistics.data()[i]))
      throw NonFiniteError("compute_weights: non-finite statistic");

  WeightBatch wb;
  wb.log_w = statistics;
  wb.normalized.resize(n, m);
  wb.alpha_estimates.resize(static_cast<std::size_t>(n));
  const double log_m = std::log(static_cast<double>(m));
  const double global_max = statistics.maxCoeff();
  double global_sum = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double row_max = statistics.row(r).maxCoeff();
    double s = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const double e = std::exp(statistics(r, c) - row_max);
      wb.normalized(r, c) = e;
      s += e;
      global_sum += std::exp(statistics(r, c) - global_max);
    }
    wb.normalized.row(r) /= s;
    wb.alpha_estimates[static_cast<std::size_t>(r)] = std::exp(row_max + std::log(s) - log_m);
  }
  wb.log_beta_estimate =
      global_max + std::log(global_sum) - std::log(static_cast<double>(n * m));
  wb.beta_estimate = std::exp(wb.log_beta_estimate);
  return wb;
}

Estimator parse_estimator(const std::string& name)
{
  if (name == "alpha")
    return Estimator::Alpha;
  if (name == "beta")
    return Estimator::Beta;
  if (name == "reinforce")
    return Estimator::Reinforce;
  throw ConfigError("estimator: unknown name '" + name +
                    "' (expected alpha|beta|reinforce)");
}

std::string estimator_name(Estimator e)
{
  switch (e) {
  case Estimator::Alpha: return "alpha";
  case Estimator::Beta: return "beta";
  case Estimator::Reinforce: return "reinforce";
  }
  return "?";
}

namespace {

void check_aligned(const Matrix& block, const Tensor& log_probs)
{
  if (log_probs.cols() != 1 ||
      log_probs.rows() != static_cast<std::size_t>(block.size()))
    throw ShapeError("policy gradient: " + std::to_string(log_probs.rows()) + "x" +
                     std::to_string(log_probs.cols()) +
                     " log-probabilities do not align with a " +
                     std::to_string(block.rows()) + "x" + std::to_string(block.cols()) +
                     " weight block");
}

// Row-major N x M flattens to the n-major column the log-probs use.
Tensor as_column(const Matrix& block)
{
  return Tensor::from(static_cast<std::size_t>(block.size()), 1,
                      std::vector<double>(block.data(), block.data() + block.size()));
}

} // namespace

Tensor alpha_surrogate(const WeightBatch& weights, const Tensor& log_probs)
{
  check_aligned(weights.normalized, log_probs);
  const double n = static_cast<double>(weights.normalized.rows());
  return scale(sum(mul(as_column(weights.normalized), log_probs)), -1.0 / n);
}

Tensor beta_surrogate(const WeightBatch& weights, const Tensor& log_probs)
{
  check_aligned(weights.log_w, log_probs);
  Matrix ratio = (weights.log_w.array() - weights.log_beta_estimate).exp().matrix();
  return neg(mean(mul(as_column(ratio), log_probs)));
}

Tensor reinforce_surrogate(const Matrix& statistics, const Tensor& log_probs,
                           double baseline)
{
  check_aligned(statistics, log_probs);
  if (!std::isfinite(baseline))
    throw NonFiniteError("reinforce: non-finite baseline");
  Matrix reward = (statistics.array() - baseline).matrix();
  return neg(mean(mul(as_column(reward), log_probs)));
}

std::vector<Tensor> policy_gradient_alpha(const WeightBatch& weights,
                                          const Tensor& log_probs,
                                          const std::vector<Tensor>& params)
{
  return grad(alpha_surrogate(weights, log_probs), params);
}

std::vector<Tensor> policy_gradient_beta(const WeightBatch& weights,
                                         const Tensor& log_probs,
                                         const std::vector<Tensor>& params)
{
  return grad(beta_surrogate(weights, log_probs), params);
}

std::vector<Tensor> policy_gradient_reinforce(const Matrix& statistics,
                                              const Tensor& log_probs,
                                              BaselineState& baseline,
                                              const std::vector<Tensor>& params)
{
  auto g = grad(reinforce_surrogate(statistics, log_probs, baseline.value), params);
  baseline.update(statistics.mean());
  return g;
}

void TrainConfig::validate() const
{
  if (n_prior < 1)
    throw ConfigError("n_prior must be at least 1");
  if (m_conditional < 1)
    throw ConfigError("m_cond must be at least 1");
  if (!(disc_optimizer.step_size >= 0.0))
    throw ConfigError("gamma_d must be non-negative");
  if (!(gen_optimizer.step_size >= 0.0))
    throw ConfigError("gamma_g must be non-negative");
  if (!(penalty_coefficient >= 0.0))
    throw ConfigError("penalty must be non-negative");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0))
    throw ConfigError("baseline_decay must lie in [0, 1)");
  if (!(clamp > 0.0))
    throw ConfigError("clamp must be positive");
}

GeneratorSample draw_generator_sample(const Generator& gen, const StatisticNetwork& net,
                                      std::size_t n, std::size_t m, Rng& rng)
{
  GeneratorSample s;
  s.z = sample_prior(gen.prior(), n, rng);
  NoGradGuard guard;
  s.x = sample_conditional(gen.family(), to_matrix(gen.parameters_for(s.z)), m, rng);
  auto f = net.evaluate(s.x);
  s.statistics = Eigen::Map<Matrix>(f.data(), static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(m));
  return s;
}

std::vector<Tensor> estimator_gradient(Estimator estimator, const Generator& gen,
                                       const GeneratorSample& sample,
                                       BaselineState& baseline)
{
  const auto m = static_cast<std::size_t>(sample.statistics.cols());
  Tensor log_probs =
      log_prob_conditional(gen.family(), gen.parameters_for(sample.z), sample.x, m);
  auto params = gen.parameters();
  switch (estimator) {
  case Estimator::Alpha:
    return policy_gradient_alpha(compute_weights(sample.statistics), log_probs, params);
  case Estimator::Beta:
    return policy_gradient_beta(compute_weights(sample.statistics), log_probs, params);
  case Estimator::Reinforce:
    return policy_gradient_reinforce(sample.statistics, log_probs, baseline, params);
  }
  throw ConfigError("unknown estimator");
}

namespace {

// Shuffled-epoch batches; the permutation is redrawn once exhausted.
class BatchCursor
{
public:
  BatchCursor(std::size_t size, Rng& rng) : order_(size), rng_(rng)
  {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    shuffle();
  }

  std::vector<std::size_t> next(std::size_t n)
  {
    std::vector<std::size_t> out;
    while (out.size() < n) {
      if (pos_ == order_.size())
        shuffle();
      out.push_back(order_[pos_++]);
    }
    return out;
  }

private:
  void shuffle()
  {
    for (std::size_t i = order_.size(); i > 1; --i)
      std::swap(order_[i - 1], order_[rng_.below(i)]);
    pos_ = 0;
  }

  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  Rng& rng_;
};

Matrix gather(const Matrix& data, const std::vector<std::size_t>& idx)
{
  Matrix out(static_cast<Eigen::Index>(idx.size()), data.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b)
{
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Matrix repeat_each_row(const Matrix& a, std::size_t times)
{
  Matrix out(a.rows() * static_cast<Eigen::Index>(times), a.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    out.row(r) = a.row(r / static_cast<Eigen::Index>(times));
  return out;
}

} // namespace

std::vector<DiscreteMetrics>
train_discrete(const TrainConfig& config, Generator& generator, StatisticNetwork& net,
               const Matrix& dataset,
               const std::function<void(const DiscreteMetrics&)>& on_row)
{
  config.validate();
  if (dataset.rows() == 0)
    throw ConfigError("train_discrete: empty dataset");
  if (static_cast<std::size_t>(dataset.cols()) != generator.family().observed_dim())
    throw ShapeError("train_discrete: dataset width " + std::to_string(dataset.cols()) +
                     " does not match the generator's observed width " +
                     std::to_string(generator.family().observed_dim()));
  validate_support(generator.family(), dataset);

  const FDivergence div(config.divergence);
  Rng rng(config.seed);
  BatchCursor cursor(static_cast<std::size_t>(dataset.rows()), rng);
  auto disc_opt = make_optimizer(config.disc_optimizer);
  auto gen_opt = make_optimizer(config.gen_optimizer);
  auto gen_params = generator.parameters();
  BaselineState baseline{0.0, config.baseline_decay};
  const auto start = std::chrono::steady_clock::now();

  std::vector<DiscreteMetrics> rows;
  rows.reserve(config.iterations);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    DiscreteMetrics row;
    row.iteration = it;
    try {
      Matrix real = gather(dataset, cursor.next(config.n_prior));
      auto sample = draw_generator_sample(generator, net, config.n_prior,
                                          config.m_conditional, rng);
      auto ds = discriminator_step(div, net, *disc_opt, real, sample.x,
                                   config.penalty_coefficient, config.clamp);
      auto grads = estimator_gradient(config.estimator, generator, sample, baseline);
      gen_opt->step(gen_params, grads);
      row.bound_estimate = ds.bound;
      row.grad_norm_d = ds.grad_norm;
      row.grad_norm_g = global_norm(grads);
      row.beta_hat = compute_weights(sample.statistics).beta_estimate;
      row.baseline = baseline.value;
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("discrete training diverged at iteration " +
                           std::to_string(it) + ": " + e.what());
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

void write_discrete_csv(const std::string& path, const std::vector<DiscreteMetrics>& rows)
{
  CsvWriter csv(path, {"iteration", "bound_estimate", "beta_hat", "grad_norm_g",
                       "grad_norm_d", "baseline", "wall_ms"});
  for (const auto& r : rows)
    csv.cell(r.iteration)
        .cell(r.bound_estimate)
        .cell(r.beta_hat)
        .cell(r.grad_norm_g)
        .cell(r.grad_norm_d)
        .cell(r.baseline)
        .cell(r.wall_ms)
        .end_row();
}

AdvClassStep adversarial_classification_step(const FDivergence& div, StatisticNetwork& net,
                                             Optimizer& disc_opt, Generator& classifier,
                                             Optimizer& cls_opt, const Matrix& x,
                                             const Matrix& y, std::size_t m,
                                             Estimator estimator, BaselineState& baseline,
                                             double penalty_coefficient, double clamp,
                                             Rng& rng)
{
  const auto& fam = classifier.family();
  if (fam.kind != FamilyKind::Categorical || fam.positions != 1)
    throw ConfigError("adversarial classification needs a single categorical output");
  if (static_cast<std::size_t>(y.cols()) != fam.classes)
    throw ShapeError("label width " + std::to_string(y.cols()) +
                     " does not match the classifier's " + std::to_string(fam.classes) +
                     " classes");
  if (x.rows() != y.rows())
    throw ShapeError("adversarial classification: input and label counts differ");
  validate_support(fam, y);

  GeneratorSample sample;
  sample.z = x;
  {
    NoGradGuard guard;
    sample.x = sample_conditional(fam, to_matrix(classifier.parameters_for(x)), m, rng);
  }
  Matrix fake_pairs = hstack(repeat_each_row(x, m), sample.x);
  auto f = net.evaluate(fake_pairs);
  sample.statistics = Eigen::Map<Matrix>(f.data(), x.rows(), static_cast<Eigen::Index>(m));

  auto ds = discriminator_step(div, net, disc_opt, hstack(x, y), fake_pairs,
                               penalty_coefficient, clamp);
  auto grads = estimator_gradient(estimator, classifier, sample, baseline);
  auto params = classifier.parameters();
  cls_opt.step(params, grads);
  return {ds.bound, global_norm(grads)};
}

std::vector<AdvClassStep> train_adversarial_classifier(const AdvClassConfig& config,
                                                       Generator& classifier,
                                                       StatisticNetwork& net,
                                                       const Matrix& x, const Matrix& y)
{
  const auto& tc = config.train;
  tc.validate();
  if (x.rows() == 0 || config.batch_size == 0)
    throw ConfigError("adversarial classification: empty data or batch");
  const FDivergence div(tc.divergence);
  Rng rng(tc.seed);
  BatchCursor cursor(static_cast<std::size_t>(x.rows()), rng);
  auto disc_opt = make_optimizer(tc.disc_optimizer);
  auto cls_opt = make_optimizer(tc.gen_optimizer);
  BaselineState baseline{0.0, tc.baseline_decay};
  std::vector<AdvClassStep> steps;
  for (std::size_t it = 0; it < tc.iterations; ++it) {
    auto idx = cursor.next(config.batch_size);
    steps.push_back(adversarial_classification_step(
        div, net, *disc_opt, classifier, *cls_opt, gather(x, idx), gather(y, idx),
        tc.m_conditional, tc.estimator, baseline, tc.penalty_coefficient, tc.clamp, rng));
  }
  return steps;
}

void train_cross_entropy(const AdvClassConfig& config, Generator& classifier,
                         const Matrix& x, const Matrix& y)
{
  const auto& tc = config.train;
  if (x.rows() == 0 || config.batch_size == 0)
    throw ConfigError("cross-entropy training: empty data or batch");
  Rng rng(tc.seed);
  BatchCursor cursor(static_cast<std::size_t>(x.rows()), rng);
  auto opt = make_optimizer(tc.gen_optimizer);
  auto params = classifier.parameters();
  for (std::size_t it = 0; it < tc.iterations; ++it) {
    auto idx = cursor.next(config.batch_size);
    Matrix xb = gather(x, idx), yb = gather(y, idx);
    Tensor lp = log_prob_conditional(classifier.family(), classifier.parameters_for(xb), yb);
    auto grads = grad(neg(mean(lp)), params);
    opt->step(params, grads);
  }
}

double classification_accuracy(const Generator& classifier, const Matrix& x,
                               const Matrix& y)
{
  if (x.rows() != y.rows() || x.rows() == 0)
    throw ShapeError("classification_accuracy: input and label counts differ");
  NoGradGuard guard;
  Matrix probs = to_matrix(classifier.parameters_for(x));
  if (probs.cols() != y.cols())
    throw ShapeError("classification_accuracy: label width mismatch");
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Eigen::Index pred = 0, truth = 0;
    probs.row(r).maxCoeff(&pred);
    y.row(r).maxCoeff(&truth);
    correct += pred == truth;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

} // namespace bgan
