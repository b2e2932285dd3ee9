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

#include "bgan/models.hpp"

#include <cmath>

#include "bgan/error.hpp"

namespace bgan {

PriorKind parse_prior_kind(const std::string& name)
{
  if (name == "uniform")
    return PriorKind::Uniform01;
  if (name == "normal")
    return PriorKind::StandardNormal;
  throw ConfigError("prior: unknown kind '" + name + "' (expected uniform|normal)");
}

Matrix sample_prior(const Prior& prior, std::size_t n, Rng& rng)
{
  if (n == 0 || prior.dim == 0)
    throw ShapeError("sample_prior: n and dim must be positive");
  Matrix z(n, prior.dim);
  for (Eigen::Index i = 0; i < z.size(); ++i)
    z.data()[i] = prior.kind == PriorKind::Uniform01 ? rng.uniform() : rng.normal();
  return z;
}

Matrix sample_prior(const Prior& prior, std::size_t n, std::uint64_t seed)
{
  Rng rng(seed);
  return sample_prior(prior, n, rng);
}

Activation parse_activation(const std::string& name)
{
  if (name == "relu")
    return Activation::Relu;
  if (name == "tanh")
    return Activation::Tanh;
  if (name == "sigmoid")
    return Activation::Sigmoid;
  if (name == "identity" || name == "linear")
    return Activation::Identity;
  throw ConfigError("activation: unknown name '" + name + "'");
}

std::string activation_name(Activation a)
{
  switch (a) {
  case Activation::Identity: return "identity";
  case Activation::Relu: return "relu";
  case Activation::Tanh: return "tanh";
  case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

Tensor apply_activation(Activation a, const Tensor& x)
{
  switch (a) {
  case Activation::Identity: return x;
  case Activation::Relu: return relu(x);
  case Activation::Tanh: return tanh(x);
  case Activation::Sigmoid: return sigmoid(x);
  }
  return x;
}

Mlp::Mlp(MlpSpec spec, std::uint64_t seed) : spec_(std::move(spec))
{
  if (spec_.input_dim == 0 || spec_.output_dim == 0)
    throw ShapeError("mlp: input and output widths must be positive");
  Rng rng(seed);
  std::vector<std::size_t> widths{spec_.input_dim};
  widths.insert(widths.end(), spec_.hidden.begin(), spec_.hidden.end());
  widths.push_back(spec_.output_dim);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l], fan_out = widths[l + 1];
    if (fan_out == 0)
      throw ShapeError("mlp: hidden widths must be positive");
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> w(fan_in * fan_out);
    for (double& v : w)
      v = rng.uniform(-a, a);
    weights_.push_back(Tensor::from(fan_in, fan_out, std::move(w), true));
    biases_.push_back(Tensor::zeros(1, fan_out, true));
  }
}

Tensor Mlp::forward(const Tensor& input) const
{
  if (input.cols() != spec_.input_dim)
    throw ShapeError("mlp: input has " + std::to_string(input.cols()) +
                     " columns, network expects " +
                     std::to_string(spec_.input_dim));
  Tensor h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = add(matmul(h, weights_[l]), biases_[l]);
    if (l + 1 < weights_.size())
      h = apply_activation(spec_.activation, h);
  }
  return h;
}

std::vector<Tensor> Mlp::parameters() const
{
  std::vector<Tensor> params;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    params.push_back(weights_[l]);
    params.push_back(biases_[l]);
  }
  return params;
}

std::vector<std::pair<std::string, Tensor>> Mlp::named_parameters() const
{
  std::vector<std::pair<std::string, Tensor>> named;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    named.emplace_back("layer" + std::to_string(l) + ".weight", weights_[l]);
    named.emplace_back("layer" + std::to_string(l) + ".bias", biases_[l]);
  }
  return named;
}

std::size_t Mlp::parameter_count() const
{
  std::size_t n = 0;
  for (const auto& p : parameters())
    n += p.size();
  return n;
}

void Mlp::fill(double value)
{
  for (auto& p : parameters())
    for (double& v : p.mutable_values())
      v = value;
}

std::vector<double> flatten_values(const std::vector<Tensor>& params)
{
  std::vector<double> flat;
  for (const auto& p : params) {
    auto v = p.values();
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return flat;
}

void assign_values(std::vector<Tensor>& params, const std::vector<double>& flat)
{
  std::size_t offset = 0;
  for (auto& p : params) {
    auto v = p.mutable_values();
    if (offset + v.size() > flat.size())
      throw ShapeError("assign_values: flat vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), v.size(),
                v.begin());
    offset += v.size();
  }
  if (offset != flat.size())
    throw ShapeError("assign_values: flat vector too long");
}

std::vector<double> flatten_grads(const std::vector<Tensor>& grads)
{
  return flatten_values(grads);
}

// ---------------------------------------------------------------------------

ConditionalFamily ConditionalFamily::bernoulli(std::size_t d)
{
  ConditionalFamily f;
  f.kind = FamilyKind::Bernoulli;
  f.dims = d;
  return f;
}

ConditionalFamily ConditionalFamily::categorical(std::size_t n, std::size_t k)
{
  ConditionalFamily f;
  f.kind = FamilyKind::Categorical;
  f.positions = n;
  f.classes = k;
  return f;
}

ConditionalFamily ConditionalFamily::deterministic(std::size_t d)
{
  ConditionalFamily f;
  f.kind = FamilyKind::Deterministic;
  f.dims = d;
  return f;
}

std::size_t ConditionalFamily::observed_dim() const
{
  return kind == FamilyKind::Categorical ? positions * classes : dims;
}

Tensor conditional_parameters(const ConditionalFamily& family, const Tensor& logits)
{
  if (logits.cols() != family.logit_dim())
    throw ShapeError("conditional_parameters: expected " +
                     std::to_string(family.logit_dim()) + " logits, got " +
                     std::to_string(logits.cols()));
  constexpr double eps = kProbabilityFloor;
  switch (family.kind) {
  case FamilyKind::Bernoulli:
    return add_scalar(scale(sigmoid(logits), 1.0 - 2.0 * eps), eps);
  case FamilyKind::Categorical: {
    const double k = static_cast<double>(family.classes);
    return add_scalar(scale(softmax_groups(logits, family.classes), 1.0 - k * eps),
                      eps);
  }
  case FamilyKind::Deterministic: return logits;
  }
  return logits;
}

Matrix sample_conditional(const ConditionalFamily& family, const Matrix& params,
                          std::size_t m, Rng& rng)
{
  if (m == 0)
    throw ShapeError("sample_conditional: m must be positive");
  if (static_cast<std::size_t>(params.cols()) != family.observed_dim())
    throw ShapeError("sample_conditional: parameter width mismatch");
  const Eigen::Index n = params.rows(), d = params.cols();
  Matrix x(n * static_cast<Eigen::Index>(m), d);
  if (family.kind != FamilyKind::Deterministic)
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      const double p = params.data()[i];
      if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("sample_conditional: probability " + std::to_string(p) +
                          " outside [0, 1]");
    }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::Index row = r * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(j);
      switch (family.kind) {
      case FamilyKind::Bernoulli:
        for (Eigen::Index c = 0; c < d; ++c)
          x(row, c) = rng.uniform() < params(r, c) ? 1.0 : 0.0;
        break;
      case FamilyKind::Categorical: {
        const auto k = static_cast<Eigen::Index>(family.classes);
        for (Eigen::Index pos = 0; pos < static_cast<Eigen::Index>(family.positions);
             ++pos) {
          const double u = rng.uniform();
          double acc = 0.0;
          Eigen::Index chosen = k - 1;
          for (Eigen::Index c = 0; c < k; ++c) {
            acc += params(r, pos * k + c);
            if (u < acc) {
              chosen = c;
              break;
            }
          }
          // Point masses never select a zero-probability class even when
          // rounding leaves acc slightly below one.
          while (chosen > 0 && params(r, pos * k + chosen) == 0.0)
            --chosen;
          for (Eigen::Index c = 0; c < k; ++c)
            x(row, pos * k + c) = c == chosen ? 1.0 : 0.0;
        }
        break;
      }
      case FamilyKind::Deterministic: x.row(row) = params.row(r); break;
      }
    }
  }
  return x;
}

void validate_support(const ConditionalFamily& family, const Matrix& x)
{
  if (static_cast<std::size_t>(x.cols()) != family.observed_dim())
    throw ShapeError("observation width " + std::to_string(x.cols()) +
                     " does not match family width " +
                     std::to_string(family.observed_dim()));
  switch (family.kind) {
  case FamilyKind::Bernoulli:
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x.data()[i] != 0.0 && x.data()[i] != 1.0)
        throw DomainError("Bernoulli observation must be binary, got " +
                          std::to_string(x.data()[i]));
    break;
  case FamilyKind::Categorical: {
    const auto k = static_cast<Eigen::Index>(family.classes);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index pos = 0; pos < static_cast<Eigen::Index>(family.positions);
           ++pos) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) {
          const double v = x(r, pos * k + c);
          if (v != 0.0 && v != 1.0)
            throw DomainError("categorical observation is not one-hot");
          s += v;
        }
        if (s != 1.0)
          throw DomainError("categorical observation is not one-hot");
      }
    break;
  }
  case FamilyKind::Deterministic:
    throw DomainError("a deterministic family has no density");
  }
}

Tensor log_prob_conditional(const ConditionalFamily& family, const Tensor& params,
                            const Matrix& x, std::size_t m)
{
  validate_support(family, x);
  if (params.rows() * m != static_cast<std::size_t>(x.rows()))
    throw ShapeError("log_prob_conditional: " + std::to_string(params.rows()) +
                     " conditionals x " + std::to_string(m) +
                     " draws does not match " + std::to_string(x.rows()) +
                     " observations");
  Tensor p = repeat_rows(params, m);
  Tensor obs = to_tensor(x);
  if (family.kind == FamilyKind::Bernoulli)
    return row_sums(add(mul(obs, log(p)), mul(1.0 - obs, log(1.0 - p))));
  return row_sums(mul(obs, log(p)));
}

// ---------------------------------------------------------------------------

Generator::Generator(Prior prior, ConditionalFamily family,
                     std::vector<std::size_t> hidden, Activation activation,
                     std::uint64_t seed)
    : prior_(prior), family_(family)
{
  MlpSpec spec;
  spec.input_dim = prior.dim;
  spec.hidden = std::move(hidden);
  spec.output_dim = family.logit_dim();
  spec.activation = activation;
  net_ = Mlp(spec, seed);
}

Tensor Generator::parameters_for(const Tensor& z) const
{
  return conditional_parameters(family_, net_.forward(z));
}

Tensor Generator::parameters_for(const Matrix& z) const
{
  return parameters_for(to_tensor(z));
}

StatisticNetwork::StatisticNetwork(std::size_t input_dim,
                                   std::vector<std::size_t> hidden,
                                   Activation activation, std::uint64_t seed)
{
  MlpSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = std::move(hidden);
  spec.output_dim = 1;
  spec.activation = activation;
  net_ = Mlp(spec, seed);
}

Tensor StatisticNetwork::forward(const Tensor& x) const { return net_.forward(x); }

Tensor StatisticNetwork::forward(const Matrix& x) const
{
  return net_.forward(to_tensor(x));
}

Tensor StatisticNetwork::forward_pair(const Tensor& x, const Tensor& y) const
{
  return net_.forward(concat_cols(x, y));
}

std::vector<double> StatisticNetwork::evaluate(const Matrix& x) const
{
  NoGradGuard guard;
  Tensor out = forward(x);
  auto v = out.values();
  return {v.begin(), v.end()};
}

} // namespace bgan
