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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "bgan/benchmark.hpp"
#include "bgan/data.hpp"
#include "bgan/discrete.hpp"
#include "bgan/error.hpp"
#include "bgan/oracle.hpp"
#include "test_util.hpp"

namespace bgan {
namespace {

using testing::finite_difference;
using testing::l2_relative_error;
using testing::random_matrix;
using testing::relative_error;

// Independent scalar forms, evaluated in long double.
double naive_softmax_entry(const Matrix& f, Eigen::Index r, Eigen::Index c)
{
  long double s = 0.0L;
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    s += std::exp(static_cast<long double>(f(r, j) - f(r, c)));
  return static_cast<double>(1.0L / s);
}

double gan_bound_oracle(const std::vector<double>& real, const std::vector<double>& fake)
{
  auto log_sigmoid = [](double x) { return -std::log1p(std::exp(-x)); };
  double a = 0.0, b = 0.0;
  for (double f : real)
    a += log_sigmoid(f);
  for (double f : fake)
    b += log_sigmoid(-f);
  return a / real.size() + b / fake.size();
}

std::vector<double> flat(const std::vector<Tensor>& g) { return flatten_grads(g); }

Generator small_bernoulli_generator(std::uint64_t seed)
{
  return Generator(Prior{PriorKind::Uniform01, 2}, ConditionalFamily::bernoulli(3), {5},
                   Activation::Tanh, seed);
}

// ---------------------------------------------------------------------------
// Weights

TEST(Weights, EqualStatisticsGiveUniformRows)
{
  Matrix f = Matrix::Constant(3, 4, 0.7);
  auto w = compute_weights(f);
  for (Eigen::Index i = 0; i < w.normalized.size(); ++i)
    EXPECT_DOUBLE_EQ(w.normalized.data()[i], 0.25);
}

TEST(Weights, OneToThreeRatio)
{
  Matrix f(1, 2);
  f << 0.0, std::log(3.0);
  auto w = compute_weights(f);
  EXPECT_NEAR(w.normalized(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(w.normalized(0, 1), 0.75, 1e-15);
}

TEST(Weights, HugeStatisticsStayFinite)
{
  Matrix f(1, 3);
  f << 1000.0, 1000.0, 0.0;
  auto w = compute_weights(f);
  EXPECT_DOUBLE_EQ(w.normalized(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(w.normalized(0, 1), 0.5);
  EXPECT_GE(w.normalized(0, 2), 0.0);
  EXPECT_LT(w.normalized(0, 2), 1e-300);
  EXPECT_TRUE(std::isfinite(w.log_beta_estimate));
  EXPECT_NEAR(w.log_beta_estimate, 1000.0 + std::log(2.0 / 3.0), 1e-9);
}

TEST(Weights, RowStochasticAndMatchesNaiveForms)
{
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix f = random_matrix(6, 9, rng, -8.0, 8.0);
    auto w = compute_weights(f);
    long double total = 0.0L;
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      double row = 0.0;
      long double alpha = 0.0L;
      for (Eigen::Index c = 0; c < f.cols(); ++c) {
        EXPECT_GE(w.normalized(r, c), 0.0);
        EXPECT_LE(w.normalized(r, c), 1.0);
        EXPECT_NEAR(w.normalized(r, c), naive_softmax_entry(f, r, c), 1e-14);
        row += w.normalized(r, c);
        alpha += std::exp(static_cast<long double>(f(r, c)));
      }
      total += alpha;
      EXPECT_NEAR(row, 1.0, 1e-12);
      const double alpha_mean = static_cast<double>(alpha / f.cols());
      EXPECT_NEAR(w.alpha_estimates[r], alpha_mean, 1e-12 * alpha_mean);
    }
    const double beta = static_cast<double>(total / f.size());
    EXPECT_NEAR(w.beta_estimate, beta, 1e-12 * beta);
  }
}

TEST(Weights, RejectsNonFiniteAndEmpty)
{
  Matrix f = Matrix::Zero(2, 2);
  f(1, 0) = NAN;
  EXPECT_THROW(compute_weights(f), NonFiniteError);
  EXPECT_THROW(compute_weights(Matrix(0, 3)), ShapeError);
}

// ---------------------------------------------------------------------------
// Policy-gradient estimators

struct Block
{
  Generator gen;
  GeneratorSample sample;
  Tensor log_probs;
};

Block make_block(std::uint64_t seed, std::size_t n, std::size_t m)
{
  Block b{small_bernoulli_generator(seed), {}, {}};
  StatisticNetwork net(3, {4}, Activation::Tanh, seed + 50);
  Rng rng(seed + 99);
  b.sample = draw_generator_sample(b.gen, net, n, m, rng);
  b.log_probs = log_prob_conditional(b.gen.family(), b.gen.parameters_for(b.sample.z),
                                     b.sample.x, m);
  return b;
}

TEST(PolicyGradient, AlphaWithSingleDrawIsMeanScore)
{
  auto b = make_block(1, 7, 1);
  auto params = b.gen.parameters();
  auto got = flat(policy_gradient_alpha(compute_weights(b.sample.statistics), b.log_probs,
                                        params));
  auto want = flat(grad(neg(mean(b.log_probs)), params));
  EXPECT_LE(relative_error(got, want), 1e-14);
}

TEST(PolicyGradient, BetaEqualsAlphaForEqualWeights)
{
  auto b = make_block(2, 5, 4);
  auto params = b.gen.parameters();
  auto w = compute_weights(Matrix::Constant(5, 4, -1.3));
  auto alpha = flat(policy_gradient_alpha(w, b.log_probs, params));
  auto beta = flat(policy_gradient_beta(w, b.log_probs, params));
  EXPECT_LE(relative_error(beta, alpha), 1e-13);
}

TEST(PolicyGradient, BetaSingleSampleIsNegativeScore)
{
  auto b = make_block(3, 1, 1);
  auto params = b.gen.parameters();
  auto got = flat(policy_gradient_beta(compute_weights(b.sample.statistics), b.log_probs,
                                       params));
  auto want = flat(grad(neg(sum(b.log_probs)), params));
  EXPECT_LE(relative_error(got, want), 1e-14);
}

TEST(PolicyGradient, ReinforceCenteredRewardVanishes)
{
  auto b = make_block(4, 6, 3);
  auto params = b.gen.parameters();
  BaselineState baseline{0.8, 0.9};
  auto g = flat(policy_gradient_reinforce(Matrix::Constant(6, 3, 0.8), b.log_probs,
                                          baseline, params));
  for (double v : g)
    EXPECT_EQ(v, 0.0);
}

TEST(PolicyGradient, ReinforceDirectFormAndBaselineUpdate)
{
  auto b = make_block(5, 8, 1);
  auto params = b.gen.parameters();
  BaselineState baseline{0.0, 0.9};
  auto got = flat(policy_gradient_reinforce(b.sample.statistics, b.log_probs, baseline,
                                            params));
  // Sum of per-sample -F * grad log q, averaged, built one row at a time.
  std::vector<double> want(got.size(), 0.0);
  double mean_f = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double F = b.sample.statistics(static_cast<Eigen::Index>(i), 0);
    mean_f += F / 8.0;
    Tensor lp = log_prob_conditional(b.gen.family(),
                                     b.gen.parameters_for(Matrix(b.sample.z.row(static_cast<Eigen::Index>(i)))),
                                     Matrix(b.sample.x.row(static_cast<Eigen::Index>(i))));
    auto gi = flat(grad(sum(lp), params));
    for (std::size_t k = 0; k < want.size(); ++k)
      want[k] -= F * gi[k] / 8.0;
  }
  EXPECT_LE(relative_error(got, want), 1e-12);
  EXPECT_NEAR(baseline.value, 0.1 * mean_f, 1e-15);
}

TEST(PolicyGradient, MisalignedShapesThrow)
{
  auto b = make_block(6, 4, 2);
  auto params = b.gen.parameters();
  auto w = compute_weights(Matrix::Zero(4, 3));
  EXPECT_THROW(policy_gradient_alpha(w, b.log_probs, params), ShapeError);
  EXPECT_THROW(policy_gradient_beta(w, b.log_probs, params), ShapeError);
  BaselineState bs;
  EXPECT_THROW(policy_gradient_reinforce(Matrix::Zero(2, 2), b.log_probs, bs, params),
               ShapeError);
}

TEST(PolicyGradient, BaselineMovingAverage)
{
  BaselineState b{2.0, 0.9};
  b.update(12.0);
  EXPECT_DOUBLE_EQ(b.value, 0.9 * 2.0 + 0.1 * 12.0);
}

// Each surrogate's tape gradient against central differences of the same
// surrogate with the sampled x and the weights held fixed.
class SurrogateGradient : public ::testing::TestWithParam<int>
{
};

TEST_P(SurrogateGradient, MatchesFiniteDifferences)
{
  const auto seed = static_cast<std::uint64_t>(GetParam());
  auto b = make_block(100 + seed, 4, 3);
  auto params = b.gen.parameters();
  const auto weights = compute_weights(b.sample.statistics);
  const double baseline = 0.3;
  auto surrogate = [&](Estimator e) {
    Tensor lp = log_prob_conditional(b.gen.family(), b.gen.parameters_for(b.sample.z),
                                     b.sample.x, 3);
    switch (e) {
    case Estimator::Alpha: return alpha_surrogate(weights, lp);
    case Estimator::Beta: return beta_surrogate(weights, lp);
    case Estimator::Reinforce: break;
    }
    return reinforce_surrogate(b.sample.statistics, lp, baseline);
  };
  for (auto e : {Estimator::Alpha, Estimator::Beta, Estimator::Reinforce}) {
    auto tape = flat(grad(surrogate(e), params));
    auto fd = finite_difference([&] { return surrogate(e).item(); }, params);
    EXPECT_LE(relative_error(tape, fd), 1e-4) << estimator_name(e);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SurrogateGradient, ::testing::Range(0, 20));

TEST(PolicyGradient, WeightsDoNotDependOnGeneratorParameters)
{
  auto gen = small_bernoulli_generator(9);
  StatisticNetwork net(3, {4}, Activation::Tanh, 10);
  Rng rng(11);
  auto sample = draw_generator_sample(gen, net, 5, 4, rng);
  auto before = compute_weights(sample.statistics).normalized;
  auto params = gen.parameters();
  params[0].mutable_values()[0] += 1e-3;
  auto f = net.evaluate(sample.x);
  Matrix again = Eigen::Map<Matrix>(f.data(), 5, 4);
  EXPECT_EQ(std::memcmp(before.data(), compute_weights(again).normalized.data(),
                        sizeof(double) * before.size()),
            0);
}

TEST(PolicyGradient, ConstantStatisticGivesZeroMeanGradient)
{
  // Under constant F every normalized weight is 1/M, so the estimator is a
  // mean of score vectors with expectation zero.
  auto gen = small_bernoulli_generator(12);
  StatisticNetwork net(3, {}, Activation::Identity, 13);
  net.network().fill(0.0);
  const std::size_t n = 1000, m = 100;
  Rng rng(14);
  auto sample = draw_generator_sample(gen, net, n, m, rng);
  BaselineState bs;
  auto g = flat(estimator_gradient(Estimator::Alpha, gen, sample, bs));

  // Per-prior-sample contributions give the standard error.
  auto params = gen.parameters();
  std::vector<double> acc(g.size(), 0.0), sq(g.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix xi = sample.x.middleRows(static_cast<Eigen::Index>(i * m),
                                    static_cast<Eigen::Index>(m));
    Tensor lp = log_prob_conditional(gen.family(),
                                     gen.parameters_for(Matrix(sample.z.row(static_cast<Eigen::Index>(i)))), xi, m);
    auto gi = flat(grad(scale(sum(lp), -1.0 / m), params));
    for (std::size_t k = 0; k < g.size(); ++k) {
      acc[k] += gi[k];
      sq[k] += gi[k] * gi[k];
    }
  }
  double se2 = 0.0, norm2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double mu = acc[k] / n;
    se2 += (sq[k] / n - mu * mu) / (n - 1.0);
    norm2 += g[k] * g[k];
    EXPECT_NEAR(g[k], mu, 1e-12);
  }
  EXPECT_LE(std::sqrt(norm2), 3.0 * std::sqrt(se2));
}

// ---------------------------------------------------------------------------
// Four-bit benchmark against enumeration oracles

constexpr std::uint64_t kBenchSeed = 1;

TEST(Benchmark, AlphaMatchesConditionalKlGradient)
{
  auto bench = make_four_bit_benchmark(kBenchSeed);
  Rng rng(21);
  auto g = sampled_gradient(Estimator::Alpha, bench, 1000, 100, rng);
  auto oracle = flatten_grads(exact_conditional_kl_gradient(bench.generator, bench.space,
                                                            bench.F));
  EXPECT_LE(l2_relative_error(g, oracle), 0.05);
}

TEST(Benchmark, BetaMatchesMarginalKlGradient)
{
  auto bench = make_four_bit_benchmark(kBenchSeed);
  Rng rng(22);
  auto g = sampled_gradient(Estimator::Beta, bench, 1000, 100, rng);
  auto oracle =
      flatten_grads(exact_marginal_kl_gradient(bench.generator, bench.space, bench.F));
  EXPECT_LE(l2_relative_error(g, oracle), 0.05);
}

TEST(Benchmark, ReinforceWithExactBaselineMatchesReverseKlGradient)
{
  auto bench = make_four_bit_benchmark(kBenchSeed);
  Rng rng(23);
  auto g = sampled_gradient(Estimator::Reinforce, bench, 1000, 100, rng,
                            exact_log_beta(bench));
  auto oracle =
      flatten_grads(exact_reverse_kl_gradient(bench.generator, bench.space, bench.F));
  EXPECT_LE(l2_relative_error(g, oracle), 0.05);
}

double covariance_trace(Estimator e, const FourBitBenchmark& bench, int trials)
{
  Rng rng(31);
  std::vector<std::vector<double>> draws;
  for (int t = 0; t < trials; ++t)
    draws.push_back(sampled_gradient(e, bench, 64, 20, rng));
  double trace = 0.0;
  for (std::size_t k = 0; k < draws[0].size(); ++k) {
    double mu = 0.0;
    for (const auto& d : draws)
      mu += d[k] / trials;
    for (const auto& d : draws)
      trace += (d[k] - mu) * (d[k] - mu) / (trials - 1);
  }
  return trace;
}

TEST(Benchmark, AlphaVarianceBelowBeta)
{
  auto bench = make_four_bit_benchmark(kBenchSeed);
  EXPECT_LT(covariance_trace(Estimator::Alpha, bench, 30),
            covariance_trace(Estimator::Beta, bench, 30));
}

// ---------------------------------------------------------------------------
// Discriminator step

TEST(DiscriminatorStep, ZeroStepLeavesParametersAndReportsBound)
{
  StatisticNetwork net(2, {6}, Activation::Tanh, 3);
  Rng rng(4);
  Matrix real = random_matrix(10, 2, rng), fake = random_matrix(30, 2, rng);
  auto before = flatten_values(net.parameters());
  auto opt = make_optimizer(OptimizerConfig{OptimizerKind::Adam, 0.0});
  auto step = discriminator_step(FDivergence(Divergence::Gan), net, *opt, real, fake, 5.0);
  auto after = flatten_values(net.parameters());
  EXPECT_EQ(std::memcmp(before.data(), after.data(), sizeof(double) * before.size()), 0);
  EXPECT_NEAR(step.bound, gan_bound_oracle(net.evaluate(real), net.evaluate(fake)), 1e-12);
}

TEST(DiscriminatorStep, UntrainedZeroNetworkGivesMinusLog4)
{
  StatisticNetwork net(3, {4}, Activation::Relu, 1);
  net.network().fill(0.0);
  Rng rng(2);
  auto opt = make_optimizer(OptimizerConfig{OptimizerKind::Sgd, 0.1});
  auto step = discriminator_step(FDivergence(Divergence::Gan), net, *opt,
                                 random_matrix(8, 3, rng), random_matrix(8, 3, rng), 1.0);
  EXPECT_NEAR(step.bound, -std::log(4.0), 1e-12);
}

TEST(DiscriminatorStep, BoundIncreasesOnSeparableData)
{
  StatisticNetwork net(1, {8}, Activation::Tanh, 7);
  Rng rng(8);
  Matrix real = random_matrix(32, 1, rng, 1.0, 2.0);
  Matrix fake = random_matrix(32, 1, rng, -2.0, -1.0);
  auto opt = make_optimizer(OptimizerConfig{OptimizerKind::Sgd, 0.05});
  const FDivergence gan(Divergence::Gan);
  double previous = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double bound = discriminator_step(gan, net, *opt, real, fake, 0.0).bound;
    EXPECT_GT(bound, previous) << "step " << i;
    previous = bound;
  }
}

// ---------------------------------------------------------------------------
// Training loop

Dataset toy_grid(std::uint64_t seed)
{
  return synth_categorical_grid(categorical_pattern("skewed", 2, 2), 2000, seed);
}

TEST(TrainDiscrete, ZeroStepSizesKeepEverythingBitIdentical)
{
  auto data = toy_grid(1);
  Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::categorical(2, 2), {8},
                Activation::Relu, 2);
  StatisticNetwork net(4, {8}, Activation::Relu, 3);
  auto g0 = flatten_values(gen.parameters());
  auto d0 = flatten_values(net.parameters());
  TrainConfig cfg;
  cfg.iterations = 25;
  cfg.disc_optimizer.step_size = 0.0;
  cfg.gen_optimizer.step_size = 0.0;
  train_discrete(cfg, gen, net, data.samples);
  auto g1 = flatten_values(gen.parameters());
  auto d1 = flatten_values(net.parameters());
  EXPECT_EQ(std::memcmp(g0.data(), g1.data(), sizeof(double) * g0.size()), 0);
  EXPECT_EQ(std::memcmp(d0.data(), d1.data(), sizeof(double) * d0.size()), 0);
}

TEST(TrainDiscrete, SameSeedSameMetrics)
{
  auto data = toy_grid(2);
  auto run = [&](Estimator e) {
    Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::categorical(2, 2),
                  {8}, Activation::Relu, 5);
    StatisticNetwork net(4, {8}, Activation::Relu, 6);
    TrainConfig cfg;
    cfg.iterations = 30;
    cfg.estimator = e;
    cfg.seed = 77;
    return train_discrete(cfg, gen, net, data.samples);
  };
  for (auto e : {Estimator::Alpha, Estimator::Beta, Estimator::Reinforce}) {
    auto a = run(e), b = run(e);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].bound_estimate, b[i].bound_estimate);
      EXPECT_EQ(a[i].beta_hat, b[i].beta_hat);
      EXPECT_EQ(a[i].grad_norm_g, b[i].grad_norm_g);
      EXPECT_EQ(a[i].grad_norm_d, b[i].grad_norm_d);
      EXPECT_EQ(a[i].baseline, b[i].baseline);
    }
  }
}

TEST(TrainDiscrete, ToyGridReachesTarget)
{
  auto target = categorical_pattern("skewed", 2, 2);
  auto data = synth_categorical_grid(target, 10000, 100);
  const Prior prior{PriorKind::Uniform01, 1};
  Generator gen(prior, ConditionalFamily::categorical(2, 2), {16, 16}, Activation::Relu, 0);
  StatisticNetwork net(4, {16, 16}, Activation::Relu, 1000);
  TrainConfig cfg;
  cfg.iterations = 2000;
  cfg.penalty_coefficient = 1.0;
  cfg.disc_optimizer.step_size = 1e-2;
  cfg.gen_optimizer.step_size = 5e-3;
  train_discrete(cfg, gen, net, data.samples);
  auto q = exact_marginal(gen, make_space(categorical_outcomes(2, 2), prior));
  EXPECT_LE(total_variation(q, target.probabilities), 0.05);
}

TEST(TrainDiscrete, InvalidConfigurationsThrow)
{
  auto data = toy_grid(3);
  Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::categorical(2, 2), {4},
                Activation::Relu, 1);
  StatisticNetwork net(4, {4}, Activation::Relu, 2);
  TrainConfig cfg;
  cfg.n_prior = 0;
  EXPECT_THROW(train_discrete(cfg, gen, net, data.samples), ConfigError);
  cfg = TrainConfig{};
  cfg.penalty_coefficient = -1.0;
  EXPECT_THROW(train_discrete(cfg, gen, net, data.samples), ConfigError);
  cfg = TrainConfig{};
  EXPECT_THROW(train_discrete(cfg, gen, net, Matrix::Zero(5, 3)), ShapeError);
}

TEST(TrainDiscrete, CsvHeaderAndRowCount)
{
  auto path = std::filesystem::temp_directory_path() / "bgan_discrete_metrics.csv";
  std::vector<DiscreteMetrics> rows(3);
  rows[1].iteration = 1;
  rows[2].iteration = 2;
  write_discrete_csv(path.string(), rows);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,bound_estimate,beta_hat,grad_norm_g,grad_norm_d,baseline,wall_ms");
  int count = 0;
  while (std::getline(in, line))
    ++count;
  EXPECT_EQ(count, 3);
  std::filesystem::remove(path);
}

// ---------------------------------------------------------------------------
// Adversarial classification

Generator linear_classifier(std::uint64_t seed)
{
  return Generator(Prior{PriorKind::StandardNormal, 2}, ConditionalFamily::categorical(1, 2),
                   {}, Activation::Identity, seed);
}

TEST(AdvClass, ZeroStepChangesNothing)
{
  auto blobs = synth_blobs(64, 4.0, 1);
  auto cls = linear_classifier(2);
  StatisticNetwork net(4, {8}, Activation::Relu, 3);
  auto c0 = flatten_values(cls.parameters());
  auto d0 = flatten_values(net.parameters());
  AdvClassConfig cfg;
  cfg.train.iterations = 10;
  cfg.train.disc_optimizer.step_size = 0.0;
  cfg.train.gen_optimizer.step_size = 0.0;
  train_adversarial_classifier(cfg, cls, net, blobs.x, blobs.y);
  auto c1 = flatten_values(cls.parameters());
  auto d1 = flatten_values(net.parameters());
  EXPECT_EQ(std::memcmp(c0.data(), c1.data(), sizeof(double) * c0.size()), 0);
  EXPECT_EQ(std::memcmp(d0.data(), d1.data(), sizeof(double) * d0.size()), 0);
}

TEST(AdvClass, PerfectLabelerLeavesNothingToDiscriminate)
{
  // Blob labels are decided by the sign of the first coordinate, so a steep
  // linear rule reproduces them and real and fake pairs coincide.
  auto blobs = synth_blobs(400, 6.0, 4);
  auto cls = linear_classifier(5);
  auto& w = cls.network().weight(0);
  auto wv = w.mutable_values();
  std::fill(wv.begin(), wv.end(), 0.0);
  wv[0] = -60.0; // x0 -> class 0 logit
  wv[1] = 60.0;  // x0 -> class 1 logit
  ASSERT_GE(classification_accuracy(cls, blobs.x, blobs.y), 0.999);

  StatisticNetwork net(4, {8}, Activation::Relu, 6);
  AdvClassConfig cfg;
  cfg.train.iterations = 600;
  cfg.train.gen_optimizer.step_size = 0.0;
  cfg.train.disc_optimizer.step_size = 1e-3;
  auto steps = train_adversarial_classifier(cfg, cls, net, blobs.x, blobs.y);
  double tail = 0.0;
  for (std::size_t i = steps.size() - 100; i < steps.size(); ++i)
    tail += steps[i].bound / 100.0;
  EXPECT_NEAR(tail, -std::log(4.0), 0.02);
}

TEST(AdvClass, LabelWidthMismatchThrows)
{
  auto blobs = synth_blobs(16, 4.0, 1);
  auto cls = Generator(Prior{PriorKind::StandardNormal, 2},
                       ConditionalFamily::categorical(1, 3), {}, Activation::Identity, 1);
  StatisticNetwork net(5, {4}, Activation::Relu, 2);
  AdvClassConfig cfg;
  cfg.train.iterations = 1;
  EXPECT_THROW(train_adversarial_classifier(cfg, cls, net, blobs.x, blobs.y), ShapeError);
}

TEST(AdvClass, BlobClassifierApproachesCrossEntropyBaseline)
{
  auto blobs = synth_blobs(200, 4.0, 11);
  AdvClassConfig cfg;
  cfg.train.iterations = 3000;
  cfg.train.seed = 12;
  cfg.train.disc_optimizer.step_size = 1e-3;
  cfg.train.gen_optimizer.step_size = 1e-2;
  cfg.train.penalty_coefficient = 1.0;

  auto baseline = linear_classifier(13);
  train_cross_entropy(cfg, baseline, blobs.x, blobs.y);
  EXPECT_GE(classification_accuracy(baseline, blobs.x, blobs.y), 0.97);

  auto cls = linear_classifier(13);
  StatisticNetwork net(4, {16}, Activation::Relu, 14);
  train_adversarial_classifier(cfg, cls, net, blobs.x, blobs.y);
  EXPECT_GE(classification_accuracy(cls, blobs.x, blobs.y), 0.95);
}

} // namespace
} // namespace bgan
