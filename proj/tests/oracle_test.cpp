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
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "bgan/error.hpp"
#include "bgan/oracle.hpp"
#include "test_util.hpp"

namespace bgan {
namespace {

using testing::finite_difference;
using testing::relative_error;

const double kLog4 = std::log(4.0);

std::vector<double> random_simplex(std::size_t k, Rng& rng)
{
  std::vector<double> v(k);
  for (double& x : v)
    x = rng.uniform(0.05, 1.0);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v)
    x /= s;
  return v;
}

Generator four_bit_generator(std::uint64_t seed)
{
  return Generator(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::bernoulli(4), {6},
                   Activation::Tanh, seed);
}

EnumerableSpace four_bit_space()
{
  return make_space(binary_outcomes(4), Prior{PriorKind::Uniform01, 1});
}

// Affine single-bit generator on a two-node prior, z in {0, 1}. A large
// slope makes each node an almost deterministic choice of bit.
Generator switch_generator(double slope, double offset)
{
  Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::bernoulli(1), {},
                Activation::Identity, 1);
  gen.network().weight(0).mutable_values()[0] = slope;
  gen.network().bias(0).mutable_values()[0] = offset;
  return gen;
}

EnumerableSpace switch_space()
{
  EnumerableSpace space;
  space.outcomes = binary_outcomes(1);
  Matrix nodes(2, 1);
  nodes << 0.0, 1.0;
  space.prior = explicit_prior(nodes, {0.5, 0.5});
  return space;
}

// ---------------------------------------------------------------------------
// Outcome spaces and quadrature

TEST(Spaces, BinaryAndCategoricalLayouts)
{
  Matrix b = binary_outcomes(3);
  ASSERT_EQ(b.rows(), 8);
  EXPECT_EQ(b(5, 0), 1.0);
  EXPECT_EQ(b(5, 1), 0.0);
  EXPECT_EQ(b(5, 2), 1.0);

  Matrix c = categorical_outcomes(2, 3);
  ASSERT_EQ(c.rows(), 9);
  ASSERT_EQ(c.cols(), 6);
  // Row 7 = digits (1, 2) in base 3, least significant first.
  EXPECT_EQ(c.row(7).sum(), 2.0);
  EXPECT_EQ(c(7, 1), 1.0);
  EXPECT_EQ(c(7, 5), 1.0);

  auto space = make_space(c, Prior{PriorKind::Uniform01, 1}, 16);
  EXPECT_EQ(outcome_index(space, c.row(7)), 7u);
  EXPECT_THROW(outcome_index(space, Eigen::RowVectorXd::Zero(6)), DomainError);
}

TEST(Spaces, TooManyOutcomesRejected)
{
  EXPECT_THROW(binary_outcomes(17), BudgetError);
  EXPECT_THROW(categorical_outcomes(9, 4), BudgetError);
}

TEST(Quadrature, WeightsAndNormalMoments)
{
  auto u = midpoint_quadrature(Prior{PriorKind::Uniform01, 2});
  EXPECT_EQ(u.nodes.rows(), 4096);
  EXPECT_NEAR(std::accumulate(u.weights.begin(), u.weights.end(), 0.0), 1.0, 1e-12);

  auto n = midpoint_quadrature(Prior{PriorKind::StandardNormal, 1});
  double mean = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i < n.nodes.rows(); ++i) {
    mean += n.weights[i] * n.nodes(i, 0);
    second += n.weights[i] * n.nodes(i, 0) * n.nodes(i, 0);
  }
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(second, 1.0, 2e-3);
}

TEST(Quadrature, InverseNormalCdfRoundTrip)
{
  for (double u : {1e-10, 1e-4, 0.025, 0.3, 0.5, 0.8, 0.975, 1.0 - 1e-9}) {
    const double x = inverse_normal_cdf(u);
    EXPECT_NEAR(0.5 * std::erfc(-x / std::sqrt(2.0)), u, 1e-14 + 1e-12 * u);
  }
}

// ---------------------------------------------------------------------------
// Marginals

TEST(Marginal, SaturatedSwitchGivesHalfHalf)
{
  auto q = exact_marginal(switch_generator(100.0, -50.0), switch_space());
  EXPECT_NEAR(q[0], 0.5, 1e-6);
  EXPECT_NEAR(q[1], 0.5, 1e-6);
}

TEST(Marginal, IndependentHalfCentersAreUniform)
{
  Generator gen = four_bit_generator(3);
  gen.network().fill(0.0); // logits 0 -> centres 0.5 for every z
  auto q = exact_marginal(gen, four_bit_space());
  for (double v : q)
    EXPECT_NEAR(v, 1.0 / 16.0, 1e-15);
}

TEST(Marginal, MatchesSamplingHistogram)
{
  Generator gen = four_bit_generator(7);
  double err = -1.0;
  auto q = exact_marginal(gen, four_bit_space(), &err);
  EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-10);
  EXPECT_GE(err, 0.0);
  EXPECT_LT(err, 1e-6);

  const std::size_t total = 10'000'000, chunk = 200'000;
  std::vector<double> counts(16, 0.0);
  Rng rng(8);
  for (std::size_t done = 0; done < total; done += chunk) {
    Matrix z = sample_prior(gen.prior(), chunk, rng);
    Matrix x = sample_conditional(gen.family(), to_matrix(gen.parameters_for(z)), 1, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      int idx = 0;
      for (int j = 0; j < 4; ++j)
        idx |= static_cast<int>(x(i, j)) << j;
      counts[idx] += 1.0;
    }
  }
  for (std::size_t k = 0; k < 16; ++k) {
    const double se = std::sqrt(q[k] * (1.0 - q[k]) / total);
    EXPECT_LE(std::abs(counts[k] / total - q[k]), 3.0 * se) << "outcome " << k;
  }
}

TEST(Marginal, ProductBudgetEnforced)
{
  // 2^16 outcomes times 4096 nodes is over the 2^24 product budget.
  EXPECT_THROW(make_space(binary_outcomes(16), Prior{PriorKind::Uniform01, 1}), BudgetError);
  EXPECT_NO_THROW(make_space(binary_outcomes(16), Prior{PriorKind::Uniform01, 1}, 256));
}

// ---------------------------------------------------------------------------
// Partition functions

TEST(Partition, ZeroStatisticGivesOne)
{
  Generator gen = four_bit_generator(2);
  auto space = four_bit_space();
  std::vector<double> F(16, 0.0);
  EXPECT_NEAR(exact_partition_beta(exact_marginal(gen, space), F), 1.0, 1e-12);
  for (double a : exact_alpha(exact_conditional(gen, space), F))
    EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(Partition, OptimalStatisticGivesOne)
{
  Rng rng(4);
  auto p = random_simplex(16, rng);
  auto q = exact_marginal(four_bit_generator(5), four_bit_space());
  std::vector<double> F(16);
  for (std::size_t i = 0; i < 16; ++i)
    F[i] = std::log(p[i] / q[i]);
  EXPECT_NEAR(exact_partition_beta(q, F), 1.0, 1e-12);
}

TEST(Partition, MatchesMonteCarlo)
{
  Generator gen = four_bit_generator(6);
  auto space = four_bit_space();
  Rng rng(7);
  std::vector<double> F(16);
  for (double& f : F)
    f = rng.uniform(-2.0, 2.0);
  const double beta = exact_partition_beta(exact_marginal(gen, space), F);

  const std::size_t n = 1'000'000;
  Matrix z = sample_prior(gen.prior(), n, rng);
  Matrix x = sample_conditional(gen.family(), to_matrix(gen.parameters_for(z)), 1, rng);
  double s = 0.0, s2 = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int idx = 0;
    for (int j = 0; j < 4; ++j)
      idx |= static_cast<int>(x(i, j)) << j;
    const double w = std::exp(F[idx]);
    s += w;
    s2 += w * w;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
  EXPECT_LE(std::abs(mean - beta), 3.0 * se);
}

// ---------------------------------------------------------------------------
// Reconstruction from the optimal statistic, and f-divergence values

TEST(Reconstruction, IdenticalDistributions)
{
  Rng rng(1);
  auto p = random_simplex(8, rng);
  for (auto d : kAllDivergences) {
    auto r = reconstruct_from_statistic(p, p, FDivergence(d));
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_EQ(r.optimal_statistic[i], 0.0);
      EXPECT_NEAR(r.p_tilde[i], p[i], 1e-15);
    }
  }
}

TEST(Reconstruction, RandomPairsAllDivergences)
{
  Rng rng(2);
  for (auto d : kAllDivergences) {
    for (int i = 0; i < 50; ++i) {
      auto p = random_simplex(8, rng), q = random_simplex(8, rng);
      auto r = reconstruct_from_statistic(p, q, FDivergence(d));
      EXPECT_LE(r.max_error, 1e-10) << short_name(d);
      // Re-derive p~ with e^F in place of the conjugate derivative.
      for (std::size_t k = 0; k < 8; ++k)
        EXPECT_NEAR(std::exp(r.optimal_statistic[k]) * q[k], p[k], 1e-14);
    }
  }
}

TEST(Reconstruction, ZeroMassOutcomeUsesClamp)
{
  std::vector<double> p{0.0, 0.6, 0.4}, q{0.2, 0.5, 0.3};
  for (auto d : kAllDivergences) {
    auto r = reconstruct_from_statistic(p, q, FDivergence(d));
    EXPECT_EQ(r.optimal_statistic[0], -kOptimalStatisticClamp);
    EXPECT_LE(r.p_tilde[0], std::exp(-30.0) * q[0] * (1.0 + 1e-9));
  }
}

TEST(Reconstruction, SupportViolationThrows)
{
  std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_THROW(reconstruct_from_statistic(p, q, FDivergence(Divergence::Kl)), DomainError);
}

TEST(FDivergenceValue, EqualDistributionsGiveOffset)
{
  Rng rng(3);
  auto p = random_simplex(8, rng);
  for (auto d : kAllDivergences) {
    const FDivergence div(d);
    EXPECT_NEAR(exact_fdivergence(p, p, div), fdivergence_offset(div), 1e-14);
  }
  EXPECT_NEAR(fdivergence_offset(FDivergence(Divergence::Gan)), -kLog4, 1e-15);
  EXPECT_EQ(fdivergence_offset(FDivergence(Divergence::Kl)), 0.0);
}

TEST(FDivergenceValue, GanDisjointSupports)
{
  // 2 JSD - log 4 with JSD = log 2.
  std::vector<double> p{1.0, 0.0}, q{0.0, 1.0};
  EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::Gan)),
              2.0 * std::log(2.0) - kLog4, 1e-15);
}

TEST(FDivergenceValue, ClosedFormsOnRandomPairs)
{
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    auto p = random_simplex(8, rng), q = random_simplex(8, rng);
    double kl = 0.0, rkl = 0.0, sh = 0.0, js = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
      const double m = 0.5 * (p[k] + q[k]);
      kl += p[k] * std::log(p[k] / q[k]);
      rkl += q[k] * std::log(q[k] / p[k]);
      sh += std::pow(std::sqrt(p[k]) - std::sqrt(q[k]), 2);
      js += 0.5 * p[k] * std::log(p[k] / m) + 0.5 * q[k] * std::log(q[k] / m);
    }
    EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::Kl)), kl, 1e-13);
    EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::ReverseKl)), rkl, 1e-13);
    EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::SquaredHellinger)), sh,
                1e-13);
    // The JS generator is scaled by two relative to the symmetric average.
    EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::JensenShannon)), 2.0 * js,
                1e-13);
    EXPECT_NEAR(exact_fdivergence(p, q, FDivergence(Divergence::Gan)), 2.0 * js - kLog4,
                1e-13);
  }
}

TEST(FDivergenceValue, TabularDualAscentIsTight)
{
  Rng rng(5);
  for (auto d : kAllDivergences) {
    const FDivergence div(d);
    for (int i = 0; i < 20; ++i) {
      auto p = random_simplex(8, rng), q = random_simplex(8, rng);
      auto dual = tabular_dual_ascent(p, q, div);
      EXPECT_NEAR(dual.value, exact_fdivergence(p, q, div), 1e-4) << div.name();
      EXPECT_LE(dual.value, exact_fdivergence(p, q, div) + 1e-12) << div.name();
    }
  }
}

// ---------------------------------------------------------------------------
// Exact gradient targets

TEST(ExactGradient, ConstantStatisticGivesZero)
{
  Generator gen = four_bit_generator(9);
  auto space = four_bit_space();
  std::vector<double> F(16, 1.3);
  for (const auto& g : exact_conditional_kl_gradient(gen, space, F))
    for (double v : g.values())
      EXPECT_NEAR(v, 0.0, 1e-14);
  for (const auto& g : exact_marginal_kl_gradient(gen, space, F))
    for (double v : g.values())
      EXPECT_NEAR(v, 0.0, 1e-14);
}

class ExactGradientFd : public ::testing::TestWithParam<int>
{
};

TEST_P(ExactGradientFd, MatchesFiniteDifferencesOfSummedObjective)
{
  const auto seed = static_cast<std::uint64_t>(GetParam());
  Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::bernoulli(3), {4},
                Activation::Tanh, seed);
  auto space = make_space(binary_outcomes(3), gen.prior(), 256);
  Rng rng(seed + 10);
  std::vector<double> F(8);
  for (double& f : F)
    f = rng.uniform(-2.0, 2.0);
  auto params = gen.parameters();

  // Targets frozen at the current parameters.
  const Matrix tc = tilted_conditional(exact_conditional(gen, space), F);
  const auto tm = tilted_marginal(exact_marginal(gen, space), F);
  const auto& h = space.prior.weights;

  auto conditional_objective = [&] {
    Matrix qc = exact_conditional(gen, space);
    double v = 0.0;
    for (Eigen::Index z = 0; z < qc.rows(); ++z)
      for (Eigen::Index x = 0; x < qc.cols(); ++x)
        v -= h[z] * tc(z, x) * std::log(qc(z, x));
    return v;
  };
  auto marginal_objective = [&] {
    auto q = exact_marginal(gen, space);
    double v = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x)
      v -= tm[x] * std::log(q[x]);
    return v;
  };
  auto reverse_objective = [&] {
    auto q = exact_marginal(gen, space);
    double v = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x)
      v += q[x] * std::log(q[x] / tm[x]);
    return v;
  };

  auto check = [&](const std::vector<Tensor>& exact, const std::function<double()>& obj,
                   const char* what) {
    auto fd = finite_difference(obj, params);
    EXPECT_LE(relative_error(flatten_grads(exact), fd), 1e-6) << what;
  };
  check(exact_conditional_kl_gradient(gen, space, F), conditional_objective, "conditional");
  check(exact_marginal_kl_gradient(gen, space, F), marginal_objective, "marginal");
  check(exact_reverse_kl_gradient(gen, space, F), reverse_objective, "reverse");
}

INSTANTIATE_TEST_SUITE_P(Seeds, ExactGradientFd, ::testing::Range(0, 20));

// ---------------------------------------------------------------------------
// Expected conditional KL against marginal KL

TEST(TiltedKl, ConstantStatisticsGiveZeroPair)
{
  Generator gen = four_bit_generator(11);
  auto space = four_bit_space();
  for (double c : {0.0, 2.5, -4.0}) {
    auto v = tilted_kl_check(gen, space, std::vector<double>(16, c));
    EXPECT_NEAR(v.expected_conditional_kl, 0.0, 1e-9);
    EXPECT_NEAR(v.marginal_kl, 0.0, 1e-9);
    EXPECT_NEAR(v.mixture_kl, 0.0, 1e-9);
  }
}

TEST(TiltedKl, RandomStatisticsArePositiveAndMixtureBounded)
{
  auto space = four_bit_space();
  Rng rng(12);
  for (int i = 0; i < 25; ++i) {
    Generator gen = four_bit_generator(200 + i);
    std::vector<double> F(16);
    for (double& f : F)
      f = rng.uniform(-2.0, 2.0);
    auto v = tilted_kl_check(gen, space, F);
    EXPECT_GT(v.expected_conditional_kl, 0.0);
    EXPECT_GT(v.marginal_kl, 0.0);
    // Joint convexity of KL over the prior mixture.
    EXPECT_LE(v.mixture_kl, v.expected_conditional_kl + 1e-12);
  }
}

TEST(TiltedKl, NearDeterministicConditionalsSeparateTheTwoQuantities)
{
  // Each prior node picks one bit almost surely, so tilting a conditional
  // barely moves it while tilting the marginal moves mass between nodes.
  auto v = tilted_kl_check(switch_generator(100.0, -50.0), switch_space(), {0.0, 1.0});
  EXPECT_LT(v.expected_conditional_kl, 1e-4);
  EXPECT_GT(v.marginal_kl, 0.1);
}

TEST(OracleCsv, HeaderAndRows)
{
  auto path = std::filesystem::temp_directory_path() / "bgan_oracle.csv";
  EnumerableSpace space = switch_space();
  std::vector<double> p{0.25, 0.75}, q{0.5, 0.5};
  auto rec = reconstruct_from_statistic(p, q, FDivergence(Divergence::Gan));
  write_oracle_csv(path.string(), space, p, q, rec);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "outcome,p,q,p_tilde,F_star");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 11), "0,0.25,0.5,");
  std::filesystem::remove(path);
}

} // namespace
} // namespace bgan
