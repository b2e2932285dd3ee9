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

#include "bgan/fdivergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bgan/error.hpp"

namespace bgan {

namespace {

constexpr double kLog2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double v)
{
  return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

double sigmoid(double v)
{
  if (v >= 0)
    return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double xlogx(double u) { return u == 0.0 ? 0.0 : u * std::log(u); }

} // namespace

Divergence parse_divergence(std::string_view name)
{
  if (name == "gan")
    return Divergence::Gan;
  if (name == "js")
    return Divergence::JensenShannon;
  if (name == "kl")
    return Divergence::Kl;
  if (name == "rkl")
    return Divergence::ReverseKl;
  if (name == "sh")
    return Divergence::SquaredHellinger;
  throw ConfigError("divergence: unknown name '" + std::string(name) +
                    "' (expected gan|js|kl|rkl|sh)");
}

std::string_view short_name(Divergence d)
{
  switch (d) {
  case Divergence::Gan: return "gan";
  case Divergence::JensenShannon: return "js";
  case Divergence::Kl: return "kl";
  case Divergence::ReverseKl: return "rkl";
  case Divergence::SquaredHellinger: return "sh";
  }
  return "?";
}

std::string_view display_name(Divergence d)
{
  switch (d) {
  case Divergence::Gan: return "GAN";
  case Divergence::JensenShannon: return "Jensen-Shannon";
  case Divergence::Kl: return "KL";
  case Divergence::ReverseKl: return "Reverse KL";
  case Divergence::SquaredHellinger: return "Squared-Hellinger";
  }
  return "?";
}

ConjugateDomain FDivergence::domain() const
{
  switch (kind_) {
  case Divergence::Gan: return {-kInf, 0.0};
  case Divergence::JensenShannon: return {-kInf, kLog2};
  case Divergence::Kl: return {-kInf, kInf};
  case Divergence::ReverseKl: return {-kInf, 0.0};
  case Divergence::SquaredHellinger: return {-kInf, 1.0};
  }
  return {-kInf, kInf};
}

double FDivergence::activation(double y) const
{
  switch (kind_) {
  case Divergence::Gan: return -softplus(-y);
  case Divergence::JensenShannon: return kLog2 - softplus(-y);
  case Divergence::Kl: return y + 1.0;
  case Divergence::ReverseKl: return -std::exp(-y);
  case Divergence::SquaredHellinger: return -std::expm1(-0.5 * y);
  }
  return 0.0;
}

double FDivergence::activation_derivative(double y) const
{
  switch (kind_) {
  case Divergence::Gan:
  case Divergence::JensenShannon: return sigmoid(-y);
  case Divergence::Kl: return 1.0;
  case Divergence::ReverseKl: return std::exp(-y);
  case Divergence::SquaredHellinger: return 0.5 * std::exp(-0.5 * y);
  }
  return 0.0;
}

namespace {

void check_domain(const FDivergence& div, double t, const char* what)
{
  const auto dom = div.domain();
  if (!std::isfinite(t) || !dom.contains(t))
    throw DomainError(std::string(what) + " of the " +
                      std::string(display_name(div.kind())) +
                      " divergence evaluated at " + std::to_string(t) +
                      ", outside its domain t < " + std::to_string(dom.upper));
}

} // namespace

double FDivergence::conjugate(double t) const
{
  check_domain(*this, t, "conjugate");
  switch (kind_) {
  case Divergence::Gan: return -std::log(-std::expm1(t));
  case Divergence::JensenShannon: return -std::log(2.0 - std::exp(t));
  case Divergence::Kl: return std::exp(t - 1.0);
  case Divergence::ReverseKl: return -1.0 - std::log(-t);
  case Divergence::SquaredHellinger: return t / (1.0 - t);
  }
  return 0.0;
}

double FDivergence::conjugate_derivative(double t) const
{
  check_domain(*this, t, "conjugate derivative");
  switch (kind_) {
  case Divergence::Gan: return std::exp(t) / -std::expm1(t);
  case Divergence::JensenShannon: return std::exp(t) / (2.0 - std::exp(t));
  case Divergence::Kl: return std::exp(t - 1.0);
  case Divergence::ReverseKl: return -1.0 / t;
  case Divergence::SquaredHellinger: {
    const double d = 1.0 - t;
    return 1.0 / (d * d);
  }
  }
  return 0.0;
}

double FDivergence::conjugate_of_activation(double y) const
{
  switch (kind_) {
  case Divergence::Gan: return softplus(y);
  case Divergence::JensenShannon: return softplus(y) - kLog2;
  case Divergence::Kl: return std::exp(y);
  case Divergence::ReverseKl: return y - 1.0;
  case Divergence::SquaredHellinger: return std::expm1(0.5 * y);
  }
  return 0.0;
}

double FDivergence::importance_weight(double statistic) const
{
  return std::exp(statistic);
}

double FDivergence::primal(double u) const
{
  if (u < 0.0)
    throw DomainError("primal f evaluated at negative ratio");
  switch (kind_) {
  case Divergence::Gan: return xlogx(u) - xlogx(u + 1.0);
  case Divergence::JensenShannon:
    return xlogx(u) - (u + 1.0) * std::log((u + 1.0) / 2.0);
  case Divergence::Kl: return xlogx(u);
  case Divergence::ReverseKl: return u == 0.0 ? kInf : -std::log(u);
  case Divergence::SquaredHellinger: {
    const double r = std::sqrt(u) - 1.0;
    return r * r;
  }
  }
  return 0.0;
}

double FDivergence::recession_slope() const
{
  switch (kind_) {
  case Divergence::Gan: return 0.0;
  case Divergence::JensenShannon: return kLog2;
  case Divergence::Kl: return kInf;
  case Divergence::ReverseKl: return 0.0;
  case Divergence::SquaredHellinger: return 1.0;
  }
  return kInf;
}

Tensor FDivergence::activation(const Tensor& statistic) const
{
  switch (kind_) {
  case Divergence::Gan: return neg(softplus(neg(statistic)));
  case Divergence::JensenShannon: return kLog2 - softplus(neg(statistic));
  case Divergence::Kl: return statistic + 1.0;
  case Divergence::ReverseKl: return neg(exp(neg(statistic)));
  case Divergence::SquaredHellinger: return 1.0 - exp(scale(statistic, -0.5));
  }
  return statistic;
}

Tensor FDivergence::conjugate_of_activation(const Tensor& statistic) const
{
  switch (kind_) {
  case Divergence::Gan: return softplus(statistic);
  case Divergence::JensenShannon: return softplus(statistic) - kLog2;
  case Divergence::Kl: return exp(statistic);
  case Divergence::ReverseKl: return statistic - 1.0;
  case Divergence::SquaredHellinger: return exp(scale(statistic, 0.5)) - 1.0;
  }
  return statistic;
}

double variational_lower_bound(const FDivergence& div,
                               std::span<const double> real_statistics,
                               std::span<const double> fake_statistics,
                               double clamp)
{
  if (real_statistics.empty() || fake_statistics.empty())
    throw ShapeError("variational_lower_bound: empty batch");
  double real_term = 0.0;
  for (double f : real_statistics)
    real_term += div.activation(std::clamp(f, -clamp, clamp));
  double fake_term = 0.0;
  for (double f : fake_statistics)
    fake_term += div.conjugate(div.activation(std::clamp(f, -clamp, clamp)));
  return real_term / static_cast<double>(real_statistics.size()) -
         fake_term / static_cast<double>(fake_statistics.size());
}

Tensor variational_lower_bound(const FDivergence& div,
                               const Tensor& real_statistics,
                               const Tensor& fake_statistics, double clamp)
{
  Tensor real = bgan::clamp(real_statistics, -clamp, clamp);
  Tensor fake = bgan::clamp(fake_statistics, -clamp, clamp);
  return mean(div.activation(real)) - mean(div.conjugate_of_activation(fake));
}

DiscriminatorOutput discriminate(const FDivergence& div, double statistic)
{
  return {statistic, div.activation(statistic), div.kind()};
}

} // namespace bgan
