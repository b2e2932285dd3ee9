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

// Brute-force ground truth on spaces small enough to enumerate.

#ifndef BGAN_ORACLE_HPP
#define BGAN_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bgan/fdivergence.hpp"
#include "bgan/models.hpp"

namespace bgan {

inline constexpr std::size_t kMaxOutcomes = std::size_t{1} << 16;
inline constexpr std::size_t kMaxProducts = std::size_t{1} << 24;
inline constexpr std::size_t kDefaultQuadratureNodes = 4096;
inline constexpr double kOptimalStatisticClamp = 30.0;

struct PriorSupport
{
  Matrix nodes;                // one latent vector per row
  std::vector<double> weights; // sums to one
  // Set when the support is a midpoint grid, so a half-resolution grid can
  // be rebuilt for the error estimate.
  std::optional<Prior> source;
  std::size_t per_axis = 0;
};

// Midpoint rule in probability space: a tensor grid with round(n^(1/dim))
// nodes per axis, mapped through the inverse CDF for a normal prior.
PriorSupport midpoint_quadrature(const Prior& prior,
                                 std::size_t nodes = kDefaultQuadratureNodes);
PriorSupport midpoint_grid(const Prior& prior, std::size_t per_axis);

/// Explicit finite prior (for discrete-z constructions).
PriorSupport explicit_prior(Matrix nodes, std::vector<double> weights);

double inverse_normal_cdf(double u);

struct EnumerableSpace
{
  Matrix outcomes;           // every x, one per row
  std::vector<double> target; // p(x), optional
  PriorSupport prior;        // discretised h(z)

  std::size_t size() const { return static_cast<std::size_t>(outcomes.rows()); }
  void validate() const;
};

// All 2^d binary vectors; bit j of the row index is column j.
Matrix binary_outcomes(std::size_t d);
// All k^n one-hot grids; position j takes digit j of the row index in base k.
Matrix categorical_outcomes(std::size_t n, std::size_t k);

// Space whose prior support is the midpoint quadrature of `prior`.
EnumerableSpace make_space(Matrix outcomes, const Prior& prior,
                           std::size_t nodes = kDefaultQuadratureNodes);

/// Row of `space.outcomes` equal to x; DomainError when absent.
std::size_t outcome_index(const EnumerableSpace& space, const Eigen::RowVectorXd& x);

/// q(x|z) for every prior node (rows) and outcome (columns).
Matrix exact_conditional(const Generator& gen, const EnumerableSpace& space);

/// Differentiable log q(x|z) in the same layout (Bernoulli / categorical).
Tensor conditional_log_prob_table(const Generator& gen, const EnumerableSpace& space);

/// q(x) = sum_z h(z) q(x|z). When `error` is given it receives the
/// Richardson estimate max_x |q_n(x) - q_{n/2}(x)| / 3, zero for an explicit
/// (non-quadrature) prior support.
std::vector<double> exact_marginal(const Generator& gen, const EnumerableSpace& space,
                                   double* error = nullptr);

double exact_partition_beta(const std::vector<double>& q, const std::vector<double>& F);
std::vector<double> exact_alpha(const Matrix& q_cond, const std::vector<double>& F);

struct Reconstruction
{
  std::vector<double> p_tilde;
  std::vector<double> optimal_statistic;
  double max_error = 0.0;
};

/// F* = log(p/q) clamped at -30 for zero-mass outcomes, T* = nu(F*),
/// p~ = (df*/dT)(T*) q.
Reconstruction reconstruct_from_statistic(const std::vector<double>& p,
                                          const std::vector<double>& q,
                                          const FDivergence& div);

/// sum_x q f(p/q) with the raw primal f; outcomes with q = 0 < p contribute
/// p times the recession slope. The value for p = q is f(1), returned by
/// fdivergence_offset.
double exact_fdivergence(const std::vector<double>& p, const std::vector<double>& q,
                         const FDivergence& div);
double fdivergence_offset(const FDivergence& div);

struct DualAscentResult
{
  double value = 0.0;
  std::vector<double> statistic;
};

/// Maximises sum_x p nu(F_x) - q f*(nu(F_x)) over one free F per outcome.
DualAscentResult tabular_dual_ascent(const std::vector<double>& p,
                                     const std::vector<double>& q,
                                     const FDivergence& div, std::size_t steps = 5000);

// Exact policy-gradient targets. Weights enter as constants; the gradient
// flows through log q(x|z) only.
std::vector<Tensor> exact_conditional_kl_gradient(const Generator& gen,
                                                  const EnumerableSpace& space,
                                                  const std::vector<double>& F);
std::vector<Tensor> exact_marginal_kl_gradient(const Generator& gen,
                                               const EnumerableSpace& space,
                                               const std::vector<double>& F);
std::vector<Tensor> exact_reverse_kl_gradient(const Generator& gen,
                                              const EnumerableSpace& space,
                                              const std::vector<double>& F);

// Tilted targets: p~(x|z) = q(x|z) e^F / alpha(z) and p~(x) = q(x) e^F / beta.
Matrix tilted_conditional(const Matrix& q_cond, const std::vector<double>& F);
std::vector<double> tilted_marginal(const std::vector<double>& q,
                                    const std::vector<double>& F);

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

struct TiltedKlValues
{
  double expected_conditional_kl = 0.0;
  double marginal_kl = 0.0; // KL(q e^F / beta || q)
  // KL(sum_z h(z) p~(x|z) || q). Joint convexity bounds this one by the
  // expected conditional KL; the marginal_kl above carries no such bound.
  double mixture_kl = 0.0;
};

TiltedKlValues tilted_kl_check(const Generator& gen, const EnumerableSpace& space,
                               const std::vector<double>& F);

void write_oracle_csv(const std::string& path, const EnumerableSpace& space,
                      const std::vector<double>& p, const std::vector<double>& q,
                      const Reconstruction& rec);

// The invariant suite behind the `oracle` subcommand.
struct OracleCheck
{
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

std::vector<OracleCheck> run_oracle_suite(std::optional<Divergence> only,
                                          std::uint64_t seed);

} // namespace bgan

#endif // BGAN_ORACLE_HPP
