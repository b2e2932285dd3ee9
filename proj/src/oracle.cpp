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

#include "bgan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bgan/csv.hpp"
#include "bgan/error.hpp"

namespace bgan {

double inverse_normal_cdf(double u)
{
  if (!(u > 0.0 && u < 1.0))
    throw DomainError("inverse_normal_cdf: argument must lie in (0, 1)");
  // Rational approximation (relative error about 1e-9) refined by one
  // Halley step on the exact CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double lo = 0.02425;
  double x;
  if (u < lo) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - lo) {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

PriorSupport midpoint_grid(const Prior& prior, std::size_t per_axis)
{
  if (prior.dim == 0 || per_axis == 0)
    throw ConfigError("midpoint_grid: empty grid");
  std::size_t total = 1;
  for (std::size_t j = 0; j < prior.dim; ++j) {
    if (total > kMaxProducts / per_axis)
      throw BudgetError("midpoint_grid: too many quadrature nodes");
    total *= per_axis;
  }
  std::vector<double> axis(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(per_axis);
    axis[i] = prior.kind == PriorKind::Uniform01 ? u : inverse_normal_cdf(u);
  }
  PriorSupport s;
  s.nodes.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(prior.dim));
  for (std::size_t r = 0; r < total; ++r) {
    std::size_t rest = r;
    for (std::size_t j = 0; j < prior.dim; ++j) {
      s.nodes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          axis[rest % per_axis];
      rest /= per_axis;
    }
  }
  s.weights.assign(total, 1.0 / static_cast<double>(total));
  s.source = prior;
  s.per_axis = per_axis;
  return s;
}

PriorSupport midpoint_quadrature(const Prior& prior, std::size_t nodes)
{
  if (prior.dim == 0)
    throw ConfigError("midpoint_quadrature: zero-dimensional prior");
  const auto per_axis = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(nodes), 1.0 / static_cast<double>(prior.dim))));
  return midpoint_grid(prior, std::max<std::size_t>(per_axis, 1));
}

PriorSupport explicit_prior(Matrix nodes, std::vector<double> weights)
{
  if (static_cast<std::size_t>(nodes.rows()) != weights.size() || weights.empty())
    throw ShapeError("explicit_prior: node and weight counts differ");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw DomainError("explicit_prior: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw DomainError("explicit_prior: weights must sum to one");
  PriorSupport p;
  p.nodes = std::move(nodes);
  p.weights = std::move(weights);
  return p;
}

void EnumerableSpace::validate() const
{
  if (outcomes.rows() == 0 || size() > kMaxOutcomes)
    throw BudgetError("enumerable space must hold between 1 and 65536 outcomes");
  if (size() * prior.weights.size() > kMaxProducts)
    throw BudgetError("outcome x prior-node products exceed 2^24");
  if (!target.empty()) {
    if (target.size() != size())
      throw ShapeError("target density length does not match the outcome count");
    double s = 0.0;
    for (double v : target) {
      if (!(v >= 0.0))
        throw DomainError("target density has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw DomainError("target density sums to " + format_double(s));
  }
}

Matrix binary_outcomes(std::size_t d)
{
  if (d == 0 || d > 16)
    throw BudgetError("binary_outcomes: need 1 <= d <= 16");
  const std::size_t n = std::size_t{1} << d;
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>((i >> j) & 1u);
  return out;
}

Matrix categorical_outcomes(std::size_t n, std::size_t k)
{
  if (n == 0 || k == 0)
    throw BudgetError("categorical_outcomes: empty grid");
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (total > kMaxOutcomes / k)
      throw BudgetError("categorical_outcomes: more than 65536 outcomes");
    total *= k;
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(total),
                            static_cast<Eigen::Index>(n * k));
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j * k + rest % k)) = 1.0;
      rest /= k;
    }
  }
  return out;
}

EnumerableSpace make_space(Matrix outcomes, const Prior& prior, std::size_t nodes)
{
  EnumerableSpace s;
  s.outcomes = std::move(outcomes);
  s.prior = midpoint_quadrature(prior, nodes);
  s.validate();
  return s;
}

std::size_t outcome_index(const EnumerableSpace& space, const Eigen::RowVectorXd& x)
{
  for (Eigen::Index r = 0; r < space.outcomes.rows(); ++r)
    if ((space.outcomes.row(r) - x).cwiseAbs().maxCoeff() <= 1e-12)
      return static_cast<std::size_t>(r);
  throw DomainError("value is not an outcome of the enumerable space");
}

namespace {

void check_generator(const Generator& gen, const EnumerableSpace& space)
{
  space.validate();
  if (static_cast<std::size_t>(space.outcomes.cols()) != gen.family().observed_dim())
    throw ShapeError("generator width does not match the enumerable space");
  if (static_cast<std::size_t>(space.prior.nodes.cols()) != gen.prior().dim)
    throw ShapeError("prior support dimension does not match the generator");
}

Matrix conditional_table(const Generator& gen, const EnumerableSpace& space)
{
  NoGradGuard guard;
  Matrix P = to_matrix(gen.parameters_for(space.prior.nodes));
  const auto& X = space.outcomes;
  switch (gen.family().kind) {
  case FamilyKind::Bernoulli: {
    Matrix ones = Matrix::Ones(X.rows(), X.cols());
    Matrix logq = P.array().log().matrix() * X.transpose() +
                  (1.0 - P.array()).log().matrix() * (ones - X).transpose();
    return logq.array().exp().matrix();
  }
  case FamilyKind::Categorical:
    return (P.array().log().matrix() * X.transpose()).array().exp().matrix();
  case FamilyKind::Deterministic: {
    Matrix q = Matrix::Zero(P.rows(), X.rows());
    for (Eigen::Index z = 0; z < P.rows(); ++z)
      q(z, static_cast<Eigen::Index>(outcome_index(space, P.row(z)))) = 1.0;
    return q;
  }
  }
  throw ConfigError("unknown conditional family");
}

std::vector<double> mix(const Matrix& q_cond, const std::vector<double>& weights)
{
  std::vector<double> q(static_cast<std::size_t>(q_cond.cols()), 0.0);
  for (Eigen::Index z = 0; z < q_cond.rows(); ++z)
    for (Eigen::Index x = 0; x < q_cond.cols(); ++x)
      q[static_cast<std::size_t>(x)] += weights[static_cast<std::size_t>(z)] * q_cond(z, x);
  return q;
}

void check_statistic(const EnumerableSpace& space, const std::vector<double>& F)
{
  if (F.size() != space.size())
    throw ShapeError("statistic table length does not match the outcome count");
  for (double f : F)
    if (!std::isfinite(f))
      throw NonFiniteError("statistic table has a non-finite entry");
}

double log_sum_exp_weighted(const double* q, std::size_t stride, const std::vector<double>& F)
{
  double m = -INFINITY;
  for (std::size_t x = 0; x < F.size(); ++x)
    if (q[x * stride] > 0.0)
      m = std::max(m, F[x]);
  double s = 0.0;
  for (std::size_t x = 0; x < F.size(); ++x)
    s += q[x * stride] * std::exp(F[x] - m);
  return m + std::log(s);
}

} // namespace

Matrix exact_conditional(const Generator& gen, const EnumerableSpace& space)
{
  check_generator(gen, space);
  return conditional_table(gen, space);
}

Tensor conditional_log_prob_table(const Generator& gen, const EnumerableSpace& space)
{
  check_generator(gen, space);
  Tensor P = gen.parameters_for(space.prior.nodes);
  Tensor Xt = to_tensor(Matrix(space.outcomes.transpose()));
  switch (gen.family().kind) {
  case FamilyKind::Bernoulli: {
    Tensor notXt = to_tensor(Matrix((1.0 - space.outcomes.array()).matrix().transpose()));
    return add(matmul(log(P), Xt), matmul(log(1.0 - P), notXt));
  }
  case FamilyKind::Categorical: return matmul(log(P), Xt);
  case FamilyKind::Deterministic: break;
  }
  throw DomainError("a deterministic family has no differentiable density");
}

std::vector<double> exact_marginal(const Generator& gen, const EnumerableSpace& space,
                                   double* error)
{
  check_generator(gen, space);
  auto q = mix(conditional_table(gen, space), space.prior.weights);
  if (error) {
    *error = 0.0;
    if (space.prior.source && space.prior.per_axis >= 2) {
      EnumerableSpace coarse = space;
      coarse.prior = midpoint_grid(*space.prior.source, space.prior.per_axis / 2);
      auto qc = mix(conditional_table(gen, coarse), coarse.prior.weights);
      for (std::size_t x = 0; x < q.size(); ++x)
        *error = std::max(*error, std::abs(q[x] - qc[x]) / 3.0);
    }
  }
  return q;
}

double exact_partition_beta(const std::vector<double>& q, const std::vector<double>& F)
{
  if (q.size() != F.size())
    throw ShapeError("exact_partition_beta: length mismatch");
  double b = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x)
    b += q[x] * std::exp(F[x]);
  return b;
}

std::vector<double> exact_alpha(const Matrix& q_cond, const std::vector<double>& F)
{
  if (static_cast<std::size_t>(q_cond.cols()) != F.size())
    throw ShapeError("exact_alpha: length mismatch");
  std::vector<double> a(static_cast<std::size_t>(q_cond.rows()), 0.0);
  for (Eigen::Index z = 0; z < q_cond.rows(); ++z)
    for (Eigen::Index x = 0; x < q_cond.cols(); ++x)
      a[static_cast<std::size_t>(z)] += q_cond(z, x) * std::exp(F[static_cast<std::size_t>(x)]);
  return a;
}

namespace {

void check_pair(const std::vector<double>& p, const std::vector<double>& q)
{
  if (p.size() != q.size() || p.empty())
    throw ShapeError("density pair lengths differ");
  for (std::size_t x = 0; x < p.size(); ++x)
    if (!(p[x] >= 0.0) || !(q[x] >= 0.0))
      throw DomainError("densities must be non-negative");
}

} // namespace

Reconstruction reconstruct_from_statistic(const std::vector<double>& p,
                                          const std::vector<double>& q,
                                          const FDivergence& div)
{
  check_pair(p, q);
  Reconstruction r;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0 && q[x] == 0.0)
      throw DomainError("support violation: p > 0 where q = 0 at outcome " +
                        std::to_string(x));
    double F = 0.0;
    if (q[x] > 0.0)
      F = p[x] > 0.0 ? std::log(p[x] / q[x]) : -kOptimalStatisticClamp;
    F = std::clamp(F, -kOptimalStatisticClamp, kOptimalStatisticClamp);
    const double T = div.activation(F);
    const double pt = div.conjugate_derivative(T) * q[x];
    r.optimal_statistic.push_back(F);
    r.p_tilde.push_back(pt);
    r.max_error = std::max(r.max_error, std::abs(pt - p[x]));
  }
  return r;
}

double exact_fdivergence(const std::vector<double>& p, const std::vector<double>& q,
                         const FDivergence& div)
{
  check_pair(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (q[x] > 0.0) {
      total += q[x] * div.primal(p[x] / q[x]);
    } else if (p[x] > 0.0) {
      const double slope = div.recession_slope();
      if (!std::isfinite(slope))
        throw DomainError("support violation: p > 0 where q = 0 makes the " +
                          std::string(display_name(div.kind())) +
                          " divergence infinite");
      total += p[x] * slope;
    }
  }
  return total;
}

double fdivergence_offset(const FDivergence& div) { return div.primal(1.0); }

DualAscentResult tabular_dual_ascent(const std::vector<double>& p,
                                     const std::vector<double>& q, const FDivergence& div,
                                     std::size_t steps)
{
  check_pair(p, q);
  DualAscentResult r;
  r.statistic.assign(p.size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    double& F = r.statistic[x];
    for (std::size_t s = 0; s < steps; ++s) {
      // d/dF [p nu(F) - q f*(nu(F))] = nu'(F) (p - q e^F). Dividing by the
      // positive curvature scale nu'(F) (p + q e^F) gives a step that is
      // well conditioned for every divergence.
      const double e = q[x] * std::exp(F);
      const double g = div.activation_derivative(F) * (p[x] - e);
      const double scale = div.activation_derivative(F) * (p[x] + e);
      if (scale == 0.0)
        break;
      F = std::clamp(F + g / scale, -kOptimalStatisticClamp, kOptimalStatisticClamp);
    }
    r.value += p[x] * div.activation(F) - q[x] * div.conjugate_of_activation(F);
  }
  return r;
}

Matrix tilted_conditional(const Matrix& q_cond, const std::vector<double>& F)
{
  if (static_cast<std::size_t>(q_cond.cols()) != F.size())
    throw ShapeError("tilted_conditional: length mismatch");
  Matrix t(q_cond.rows(), q_cond.cols());
  for (Eigen::Index z = 0; z < q_cond.rows(); ++z) {
    const double la = log_sum_exp_weighted(q_cond.row(z).data(), 1, F);
    for (Eigen::Index x = 0; x < q_cond.cols(); ++x)
      t(z, x) = q_cond(z, x) * std::exp(F[static_cast<std::size_t>(x)] - la);
  }
  return t;
}

std::vector<double> tilted_marginal(const std::vector<double>& q,
                                    const std::vector<double>& F)
{
  if (q.size() != F.size())
    throw ShapeError("tilted_marginal: length mismatch");
  const double lb = log_sum_exp_weighted(q.data(), 1, F);
  std::vector<double> t(q.size());
  for (std::size_t x = 0; x < q.size(); ++x)
    t[x] = q[x] * std::exp(F[x] - lb);
  return t;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q)
{
  check_pair(p, q);
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0)
      continue;
    if (q[x] == 0.0)
      return INFINITY;
    s += p[x] * std::log(p[x] / q[x]);
  }
  return s;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q)
{
  check_pair(p, q);
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x)
    s += std::abs(p[x] - q[x]);
  return 0.5 * s;
}

namespace {

std::vector<Tensor> weighted_score(const Generator& gen, const EnumerableSpace& space,
                                   const Matrix& coefficients)
{
  Tensor logq = conditional_log_prob_table(gen, space);
  auto params = gen.parameters();
  return grad(neg(sum(mul(to_tensor(coefficients), logq))), params);
}

} // namespace

std::vector<Tensor> exact_conditional_kl_gradient(const Generator& gen,
                                                  const EnumerableSpace& space,
                                                  const std::vector<double>& F)
{
  check_statistic(space, F);
  Matrix c = tilted_conditional(exact_conditional(gen, space), F);
  for (Eigen::Index z = 0; z < c.rows(); ++z)
    c.row(z) *= space.prior.weights[static_cast<std::size_t>(z)];
  return weighted_score(gen, space, c);
}

std::vector<Tensor> exact_marginal_kl_gradient(const Generator& gen,
                                               const EnumerableSpace& space,
                                               const std::vector<double>& F)
{
  check_statistic(space, F);
  Matrix q_cond = exact_conditional(gen, space);
  const double lb = log_sum_exp_weighted(mix(q_cond, space.prior.weights).data(), 1, F);
  Matrix c(q_cond.rows(), q_cond.cols());
  for (Eigen::Index z = 0; z < c.rows(); ++z)
    for (Eigen::Index x = 0; x < c.cols(); ++x)
      c(z, x) = space.prior.weights[static_cast<std::size_t>(z)] * q_cond(z, x) *
                std::exp(F[static_cast<std::size_t>(x)] - lb);
  return weighted_score(gen, space, c);
}

std::vector<Tensor> exact_reverse_kl_gradient(const Generator& gen,
                                              const EnumerableSpace& space,
                                              const std::vector<double>& F)
{
  check_statistic(space, F);
  Matrix q_cond = exact_conditional(gen, space);
  const double lb = log_sum_exp_weighted(mix(q_cond, space.prior.weights).data(), 1, F);
  Matrix c(q_cond.rows(), q_cond.cols());
  for (Eigen::Index z = 0; z < c.rows(); ++z)
    for (Eigen::Index x = 0; x < c.cols(); ++x)
      c(z, x) = space.prior.weights[static_cast<std::size_t>(z)] * q_cond(z, x) *
                (F[static_cast<std::size_t>(x)] - lb);
  return weighted_score(gen, space, c);
}

TiltedKlValues tilted_kl_check(const Generator& gen, const EnumerableSpace& space,
                               const std::vector<double>& F)
{
  check_statistic(space, F);
  Matrix q_cond = exact_conditional(gen, space);
  TiltedKlValues v;
  // KL(p~ || q) = E_{p~}[F] - log(normaliser); zero-mass outcomes drop out.
  for (Eigen::Index z = 0; z < q_cond.rows(); ++z) {
    const double la = log_sum_exp_weighted(q_cond.row(z).data(), 1, F);
    double kl = 0.0;
    for (Eigen::Index x = 0; x < q_cond.cols(); ++x) {
      const double fx = F[static_cast<std::size_t>(x)];
      kl += q_cond(z, x) * std::exp(fx - la) * (fx - la);
    }
    v.expected_conditional_kl += space.prior.weights[static_cast<std::size_t>(z)] * kl;
  }
  auto q = mix(q_cond, space.prior.weights);
  const double lb = log_sum_exp_weighted(q.data(), 1, F);
  for (std::size_t x = 0; x < q.size(); ++x)
    v.marginal_kl += q[x] * std::exp(F[x] - lb) * (F[x] - lb);
  v.mixture_kl = kl_divergence(mix(tilted_conditional(q_cond, F), space.prior.weights), q);
  return v;
}

void write_oracle_csv(const std::string& path, const EnumerableSpace& space,
                      const std::vector<double>& p, const std::vector<double>& q,
                      const Reconstruction& rec)
{
  if (p.size() != space.size() || q.size() != space.size() ||
      rec.p_tilde.size() != space.size())
    throw ShapeError("write_oracle_csv: table lengths differ from the outcome count");
  CsvWriter csv(path, {"outcome", "p", "q", "p_tilde", "F_star"});
  for (std::size_t x = 0; x < space.size(); ++x) {
    std::string label;
    for (Eigen::Index c = 0; c < space.outcomes.cols(); ++c)
      label += space.outcomes(static_cast<Eigen::Index>(x), c) != 0.0 ? '1' : '0';
    csv.cell(label).cell(p[x]).cell(q[x]).cell(rec.p_tilde[x]).cell(
        rec.optimal_statistic[x]);
    csv.end_row();
  }
}

} // namespace bgan
