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

#ifndef BGAN_MODELS_HPP
#define BGAN_MODELS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bgan/matrix.hpp"
#include "bgan/random.hpp"
#include "bgan/tensor.hpp"

namespace bgan {

// ---------------------------------------------------------------------------
// Priors

enum class PriorKind
{
  Uniform01,
  StandardNormal
};

struct Prior
{
  PriorKind kind = PriorKind::Uniform01;
  std::size_t dim = 64;
};

PriorKind parse_prior_kind(const std::string& name);

// n x dim batch of i.i.d. draws.
Matrix sample_prior(const Prior& prior, std::size_t n, Rng& rng);
Matrix sample_prior(const Prior& prior, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multilayer perceptrons

enum class Activation
{
  Identity,
  Relu,
  Tanh,
  Sigmoid
};

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);
Tensor apply_activation(Activation a, const Tensor& x);

/// Layer widths and hidden activation. An empty `hidden` list gives a
/// single affine map.
struct MlpSpec
{
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
  Activation activation = Activation::Relu;
};

class Mlp
{
public:
  Mlp() = default;
  // Weights ~ U(-a, a), a = sqrt(6 / (fan_in + fan_out)); biases zero.
  Mlp(MlpSpec spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  std::size_t layer_count() const { return weights_.size(); }

  // Input rows are samples. Throws ShapeError on width mismatch and
  // NonFiniteError when a layer output is not finite.
  Tensor forward(const Tensor& input) const;

  std::vector<Tensor> parameters() const;
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::size_t parameter_count() const;

  Tensor& weight(std::size_t layer) { return weights_.at(layer); }
  Tensor& bias(std::size_t layer) { return biases_.at(layer); }
  const Tensor& weight(std::size_t layer) const { return weights_.at(layer); }
  const Tensor& bias(std::size_t layer) const { return biases_.at(layer); }

  void fill(double value);

private:
  MlpSpec spec_;
  std::vector<Tensor> weights_; // fan_in x fan_out
  std::vector<Tensor> biases_;  // 1 x fan_out
};

// Flat copies of parameter values, in parameter order.
std::vector<double> flatten_values(const std::vector<Tensor>& params);
void assign_values(std::vector<Tensor>& params, const std::vector<double>& flat);
std::vector<double> flatten_grads(const std::vector<Tensor>& grads);

// ---------------------------------------------------------------------------
// Conditional output families q(x | z)

enum class FamilyKind
{
  Bernoulli,
  Categorical,
  Deterministic
};

// Bernoulli centers and categorical probabilities are kept inside
// [kProbabilityFloor, 1 - kProbabilityFloor].
inline constexpr double kProbabilityFloor = 1e-6;

struct ConditionalFamily
{
  FamilyKind kind = FamilyKind::Bernoulli;
  std::size_t dims = 1;      // Bernoulli / Deterministic observed width
  std::size_t positions = 1; // Categorical
  std::size_t classes = 2;   // Categorical

  static ConditionalFamily bernoulli(std::size_t d);
  static ConditionalFamily categorical(std::size_t n, std::size_t k);
  static ConditionalFamily deterministic(std::size_t d);

  // Width of an observation (one-hot width for Categorical).
  std::size_t observed_dim() const;
  // Width of the raw network output feeding the family.
  std::size_t logit_dim() const { return observed_dim(); }
};

// Maps raw network outputs to distribution parameters: Bernoulli centers,
// per-position categorical probabilities, or the deterministic sample.
Tensor conditional_parameters(const ConditionalFamily& family,
                              const Tensor& logits);

// Draws m observations per parameter row; rows are ordered n-major
// (row n * m + j is the j-th draw from conditional n).
Matrix sample_conditional(const ConditionalFamily& family, const Matrix& params,
                          std::size_t m, Rng& rng);

// log q(x | z) summed over independent dimensions, one value per row of x.
// `params` has one row per conditional; each is repeated `m` times to line
// up with the n-major rows of x. Throws DomainError for x outside support.
Tensor log_prob_conditional(const ConditionalFamily& family,
                            const Tensor& params, const Matrix& x,
                            std::size_t m = 1);

void validate_support(const ConditionalFamily& family, const Matrix& x);

// ---------------------------------------------------------------------------
// Generator and statistic network

class Generator
{
public:
  Generator() = default;
  // The network input width is prior.dim; its output width is the family's
  // logit width.
  Generator(Prior prior, ConditionalFamily family, std::vector<std::size_t> hidden,
            Activation activation, std::uint64_t seed);

  const Prior& prior() const { return prior_; }
  const ConditionalFamily& family() const { return family_; }
  Mlp& network() { return net_; }
  const Mlp& network() const { return net_; }
  std::vector<Tensor> parameters() const { return net_.parameters(); }

  Tensor parameters_for(const Tensor& z) const;
  Tensor parameters_for(const Matrix& z) const;

private:
  Prior prior_;
  ConditionalFamily family_;
  Mlp net_;
};

/// Scalar-output network F. For pair inputs (x, y) the two blocks are
/// concatenated column-wise before the first layer.
class StatisticNetwork
{
public:
  StatisticNetwork() = default;
  StatisticNetwork(std::size_t input_dim, std::vector<std::size_t> hidden,
                   Activation activation, std::uint64_t seed);

  Mlp& network() { return net_; }
  const Mlp& network() const { return net_; }
  std::size_t input_dim() const { return net_.spec().input_dim; }
  std::vector<Tensor> parameters() const { return net_.parameters(); }

  // n x 1 statistics.
  Tensor forward(const Tensor& x) const;
  Tensor forward(const Matrix& x) const;
  Tensor forward_pair(const Tensor& x, const Tensor& y) const;
  // Plain values without recording a tape.
  std::vector<double> evaluate(const Matrix& x) const;

private:
  Mlp net_;
};

// ---------------------------------------------------------------------------
// Checkpoints: "BGAN" magic, u32 version, u32 tensor count, then per tensor
// u32 name length, name bytes, u32 rank, u64 dims, little-endian f64 values.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray
{
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

void write_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays);
std::vector<NamedArray> read_checkpoint(const std::string& path);

std::vector<NamedArray> to_arrays(const std::string& prefix, const Mlp& net);
// Loads values into an existing network of matching architecture.
void load_arrays(const std::vector<NamedArray>& arrays, const std::string& prefix,
                 Mlp& net);

} // namespace bgan

#endif // BGAN_MODELS_HPP
