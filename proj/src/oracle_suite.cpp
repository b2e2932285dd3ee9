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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bgan/benchmark.hpp"
#include "bgan/oracle.hpp"

namespace bgan {

namespace {

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

OracleCheck at_most(std::string name, double measured, double tolerance)
{
  return {std::move(name), measured, tolerance, measured <= tolerance};
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b)
{
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return std::sqrt(d / n);
}

} // namespace

std::vector<OracleCheck> run_oracle_suite(std::optional<Divergence> only, std::uint64_t seed)
{
  std::vector<OracleCheck> checks;
  for (auto d : kAllDivergences) {
    if (only && *only != d)
      continue;
    const FDivergence div(d);
    const std::string tag = "[" + std::string(short_name(d)) + "]";
    Rng rng(seed + static_cast<std::uint64_t>(d) * 1000);

    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      auto p = random_simplex(8, rng), q = random_simplex(8, rng);
      worst = std::max(worst, reconstruct_from_statistic(p, q, div).max_error);
    }
    checks.push_back(at_most("reconstruction" + tag, worst, 1e-10));

    double gap = 0.0;
    for (int i = 0; i < 20; ++i) {
      auto p = random_simplex(8, rng), q = random_simplex(8, rng);
      gap = std::max(gap, std::abs(exact_fdivergence(p, q, div) -
                                   tabular_dual_ascent(p, q, div).value));
    }
    checks.push_back(at_most("dual_primal_gap" + tag, gap, 1e-4));
  }
  if (only)
    return checks;

  auto bench = make_four_bit_benchmark(seed);
  auto q = exact_marginal(bench.generator, bench.space);
  checks.push_back(at_most("marginal_normalization",
                           std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0), 1e-10));

  double zero_case = 0.0;
  for (double c : {0.0, 1.7, -3.0}) {
    std::vector<double> F(bench.space.size(), c);
    auto v = tilted_kl_check(bench.generator, bench.space, F);
    zero_case = std::max({zero_case, std::abs(v.expected_conditional_kl),
                          std::abs(v.marginal_kl)});
  }
  checks.push_back(at_most("tilted_kl_zero_cases", zero_case, 1e-9));

  double violation = -INFINITY;
  Rng rng(seed + 77);
  for (std::uint64_t i = 0; i < 100; ++i) {
    Generator gen(Prior{PriorKind::Uniform01, 1}, ConditionalFamily::bernoulli(4), {8},
                  Activation::Tanh, seed + 100 + i);
    std::vector<double> F(bench.space.size());
    for (double& f : F)
      f = rng.uniform(-2.0, 2.0);
    auto v = tilted_kl_check(gen, bench.space, F);
    violation = std::max(violation, v.marginal_kl - v.expected_conditional_kl);
  }
  checks.push_back(at_most("tilted_kl_marginal_le_conditional", violation, 1e-9));

  for (auto est : {Estimator::Alpha, Estimator::Beta}) {
    Rng mc(seed + 5);
    auto oracle = oracle_gradient(est, bench);
    auto g = sampled_gradient(est, bench, 1000, 100, mc);
    checks.push_back(at_most(estimator_name(est) + "_gradient_rel_error_1e5",
                             relative_l2(g, oracle), 0.05));
  }
  return checks;
}

} // namespace bgan
