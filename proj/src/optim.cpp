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

#include "bgan/optim.hpp"

#include <cmath>

#include "bgan/error.hpp"

namespace bgan {

OptimizerKind parse_optimizer_kind(const std::string& name)
{
  if (name == "sgd")
    return OptimizerKind::Sgd;
  if (name == "adam")
    return OptimizerKind::Adam;
  throw ConfigError("optimizer: unknown kind '" + name + "' (expected sgd|adam)");
}

Optimizer::Optimizer(double step_size) : step_size_(step_size)
{
  set_step_size(step_size);
}

void Optimizer::set_step_size(double s)
{
  if (!(s >= 0.0) || !std::isfinite(s))
    throw ConfigError("step_size must be a finite non-negative number");
  step_size_ = s;
}

void Optimizer::step(std::vector<Tensor>& params, const std::vector<Tensor>& grads)
{
  if (params.size() != grads.size())
    throw ShapeError("optimizer: " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) +
                     " gradients");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].defined() || params[i].rows() != grads[i].rows() ||
        params[i].cols() != grads[i].cols())
      throw ShapeError("optimizer: gradient " + std::to_string(i) +
                       " does not match its parameter");
    for (double g : grads[i].values())
      if (!std::isfinite(g))
        throw NonFiniteError("optimizer: non-finite gradient for parameter " +
                             std::to_string(i));
  }
  ensure_state(params);
  ++t_;
  for (std::size_t i = 0; i < params.size(); ++i)
    apply(i, params[i].mutable_values(), grads[i].values());
}

void Sgd::apply(std::size_t, std::span<double> param, std::span<const double> grad)
{
  if (step_size_ == 0.0)
    return;
  for (std::size_t k = 0; k < param.size(); ++k)
    param[k] -= step_size_ * grad[k];
}

Adam::Adam(double step_size, double beta1, double beta2, double epsilon)
    : Optimizer(step_size), beta1_(beta1), beta2_(beta2), epsilon_(epsilon)
{
  if (!(beta1 >= 0.0 && beta1 < 1.0))
    throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0))
    throw ConfigError("epsilon must be positive");
}

void Adam::ensure_state(const std::vector<Tensor>& params)
{
  if (m_.size() == params.size())
    return;
  if (!m_.empty())
    throw ShapeError("optimizer: parameter list changed between steps");
  for (const auto& p : params) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::apply(std::size_t index, std::span<double> param,
                 std::span<const double> grad)
{
  auto& m = m_[index];
  auto& v = v_[index];
  if (m.size() != param.size())
    throw ShapeError("optimizer: state size mismatch for parameter " +
                     std::to_string(index));
  const double t = static_cast<double>(t_);
  const double c1 = 1.0 - std::pow(beta1_, t);
  const double c2 = 1.0 - std::pow(beta2_, t);
  for (std::size_t k = 0; k < param.size(); ++k) {
    m[k] = beta1_ * m[k] + (1.0 - beta1_) * grad[k];
    v[k] = beta2_ * v[k] + (1.0 - beta2_) * grad[k] * grad[k];
    const double m_hat = m[k] / c1;
    const double v_hat = v[k] / c2;
    // Skipping the write keeps a signed zero intact when the step is zero.
    if (step_size_ != 0.0)
      param[k] -= step_size_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg)
{
  if (cfg.kind == OptimizerKind::Sgd)
    return std::make_unique<Sgd>(cfg.step_size);
  return std::make_unique<Adam>(cfg.step_size, cfg.beta1, cfg.beta2, cfg.epsilon);
}

double global_norm(const std::vector<Tensor>& grads)
{
  double s = 0.0;
  for (const auto& g : grads)
    if (g.defined())
      for (double v : g.values())
        s += v * v;
  return std::sqrt(s);
}

} // namespace bgan
