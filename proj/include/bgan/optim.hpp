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

#ifndef BGAN_OPTIM_HPP
#define BGAN_OPTIM_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bgan/tensor.hpp"

namespace bgan {

enum class OptimizerKind
{
  Sgd,
  Adam
};

struct OptimizerConfig
{
  OptimizerKind kind = OptimizerKind::Adam;
  double step_size = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

OptimizerKind parse_optimizer_kind(const std::string& name);

/// First-order minimizer over a fixed list of leaf parameters.
///
/// step() always descends: parameters move against `grads`. Callers that
/// ascend an objective pass the gradient of its negation.
class Optimizer
{
public:
  virtual ~Optimizer() = default;

  // Throws ShapeError when grads do not line up with the parameters and
  // NonFiniteError for NaN/Inf gradients. Parameters are untouched on error.
  void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads);

  double step_size() const { return step_size_; }
  void set_step_size(double s);
  long steps_taken() const { return t_; }

protected:
  explicit Optimizer(double step_size);
  virtual void apply(std::size_t index, std::span<double> param,
                     std::span<const double> grad) = 0;
  virtual void ensure_state(const std::vector<Tensor>& params) = 0;

  double step_size_;
  long t_ = 0;
};

class Sgd : public Optimizer
{
public:
  explicit Sgd(double step_size) : Optimizer(step_size) {}

protected:
  void apply(std::size_t, std::span<double> param,
             std::span<const double> grad) override;
  void ensure_state(const std::vector<Tensor>&) override {}
};

/// Moment-tracking update with bias correction (Kingma & Ba).
class Adam : public Optimizer
{
public:
  Adam(double step_size, double beta1, double beta2, double epsilon = 1e-8);

  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

protected:
  void apply(std::size_t index, std::span<double> param,
             std::span<const double> grad) override;
  void ensure_state(const std::vector<Tensor>& params) override;

private:
  double beta1_, beta2_, epsilon_;
  std::vector<std::vector<double>> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg);

// Euclidean norm over a list of gradient tensors.
double global_norm(const std::vector<Tensor>& grads);

} // namespace bgan

#endif // BGAN_OPTIM_HPP
