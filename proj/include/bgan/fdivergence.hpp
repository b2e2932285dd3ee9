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

#ifndef BGAN_FDIVERGENCE_HPP
#define BGAN_FDIVERGENCE_HPP

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "bgan/tensor.hpp"

namespace bgan {

enum class Divergence
{
  Gan,
  JensenShannon,
  Kl,
  ReverseKl,
  SquaredHellinger
};

inline constexpr std::array<Divergence, 5> kAllDivergences = {
    Divergence::Gan, Divergence::JensenShannon, Divergence::Kl,
    Divergence::ReverseKl, Divergence::SquaredHellinger};

// Short CLI names: gan | js | kl | rkl | sh.
Divergence parse_divergence(std::string_view name);
std::string_view short_name(Divergence d);
std::string_view display_name(Divergence d);

/// Open interval (lower, upper) on which the convex conjugate is finite.
/// Infinite bounds are represented by +/-infinity.
struct ConjugateDomain
{
  double lower;
  double upper;

  bool contains(double t) const { return t > lower && t < upper; }
};

/// One divergence: the output activation nu, the convex conjugate f* and
/// its derivative, and the primal generator f.
///
/// For every member, (df*/dT)(nu(F)) == e^F, so the importance weight of a
/// sample is the exponential of the raw statistic-network output.
class FDivergence
{
public:
  explicit FDivergence(Divergence kind) : kind_(kind) {}

  Divergence kind() const { return kind_; }
  std::string_view name() const { return short_name(kind_); }

  ConjugateDomain domain() const;

  // nu(y). Total on finite reals; strictly inside the domain for |y| <= 30.
  double activation(double y) const;
  double activation_derivative(double y) const;

  // f*(t); throws DomainError outside the open domain.
  double conjugate(double t) const;
  double conjugate_derivative(double t) const;

  // f*(nu(y)) evaluated in a form that never leaves the domain.
  double conjugate_of_activation(double y) const;

  // Importance weight w = e^F and its logarithm (identically F).
  double importance_weight(double statistic) const;
  double log_importance_weight(double statistic) const { return statistic; }

  // Primal f(u) for u >= 0 (limits at u = 0) and the recession slope
  // lim_{u->inf} f(u)/u, used for q(x) = 0 outcomes.
  double primal(double u) const;
  double recession_slope() const;
  // f(1): the divergence value of P against itself.
  double primal_at_one() const { return primal(1.0); }

  // Tape versions used by training losses.
  Tensor activation(const Tensor& statistic) const;
  Tensor conjugate_of_activation(const Tensor& statistic) const;

private:
  Divergence kind_;
};

// Default bound on |F| before it enters nu on the discriminator loss path.
inline constexpr double kDefaultStatisticClamp = 30.0;

/// mean_real nu(F) - mean_fake f*(nu(F)); the quantity the discriminator
/// ascends. Statistics are clamped to [-clamp, clamp] first.
double variational_lower_bound(const FDivergence& div,
                               std::span<const double> real_statistics,
                               std::span<const double> fake_statistics,
                               double clamp = kDefaultStatisticClamp);

Tensor variational_lower_bound(const FDivergence& div,
                               const Tensor& real_statistics,
                               const Tensor& fake_statistics,
                               double clamp = kDefaultStatisticClamp);

/// Discriminator output for one sample.
struct DiscriminatorOutput
{
  double statistic;
  double activated;
  Divergence divergence;
};

DiscriminatorOutput discriminate(const FDivergence& div, double statistic);

} // namespace bgan

#endif // BGAN_FDIVERGENCE_HPP
