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

#ifndef BGAN_TENSOR_HPP
#define BGAN_TENSOR_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bgan {

class Tensor;

namespace detail {

using BackwardFn = std::function<std::vector<Tensor>(const Tensor& grad_out)>;

struct Node;

} // namespace detail

/// Dense row-major matrix of doubles participating in reverse-mode
/// differentiation.
///
/// A Tensor is a handle: copies share the same underlying node, the way
/// variables share storage in most tape-based autodiff libraries. All
/// differentiable operations are rank-2; scalars are 1x1 and row vectors
/// are 1xN. Every operation checks its output for NaN/Inf and throws
/// NonFiniteError naming the operation.
class Tensor
{
public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols,
                      bool requires_grad = false);
  static Tensor full(std::size_t rows, std::size_t cols, double value,
                     bool requires_grad = false);
  static Tensor from(std::size_t rows, std::size_t cols,
                     std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  explicit operator bool() const { return defined(); }

  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t size() const { return rows() * cols(); }
  std::array<std::size_t, 2> shape() const { return {rows(), cols()}; }

  std::span<const double> values() const;
  double at(std::size_t r, std::size_t c) const;
  double item() const;

  // In-place access is only sanctioned on leaves (parameters, inputs).
  std::span<double> mutable_values();

  bool requires_grad() const;
  bool is_leaf() const;
  const char* op_name() const;

  // Accumulated gradient of a leaf after backward(); undefined if none.
  Tensor grad() const;
  void set_grad(Tensor g) const;
  void zero_grad() const;

  // Same values, no history.
  Tensor detach() const;
  Tensor clone(bool requires_grad) const;

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

private:
  friend struct detail::Node;
  friend class Tape;
  friend Tensor make_op(const char* op, std::size_t rows, std::size_t cols,
                        std::vector<double> values,
                        std::vector<Tensor> inputs, detail::BackwardFn fn);

  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;
};

// Builds a result tensor and, when gradient recording is enabled and any input
// requires a gradient, records the backward closure. Exposed so that callers
// can define composite primitives.
Tensor make_op(const char* op, std::size_t rows, std::size_t cols,
               std::vector<double> values, std::vector<Tensor> inputs,
               detail::BackwardFn fn);

/// RAII guard that disables gradient recording on the current thread.
class NoGradGuard
{
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
  bool previous_;
};

bool grad_enabled();

/// Topologically ordered record of the operations reachable from a root.
/// Inputs always precede the operations that consume them.
class Tape
{
public:
  explicit Tape(const Tensor& root);

  std::size_t size() const { return order_.size(); }
  std::vector<std::string> op_names() const;
  // Position of a tensor's node in the order, or -1 if absent.
  long index_of(const Tensor& t) const;
  // True when every recorded input appears before its consumer.
  bool is_topological() const;

  const std::vector<detail::Node*>& nodes() const { return order_; }

private:
  std::vector<detail::Node*> order_;
};

/// Gradients of a scalar (or seeded) output with respect to `wrt`.
///
/// Inputs that are not connected to `output` receive zero gradients. With
/// `create_graph` the returned gradients are themselves differentiable,
/// which is how input-gradient penalties get their second-order path.
std::vector<Tensor> grad(const Tensor& output, std::span<const Tensor> wrt,
                         bool create_graph = false,
                         const Tensor& seed = Tensor());

/// Accumulates d(loss)/d(leaf) into every reachable leaf that requires a
/// gradient. `loss` must be 1x1.
void backward(const Tensor& loss);

// ---------------------------------------------------------------------------
// Primitives. Binary elementwise operations broadcast along any dimension of
// extent one.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, double a);
Tensor add_scalar(const Tensor& x, double a);

Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sqrt(const Tensor& x);
// log(1 + e^x), evaluated without overflow.
Tensor softplus(const Tensor& x);
// Values outside [lo, hi] are clamped and receive zero gradient.
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor reshape(const Tensor& x, std::size_t rows, std::size_t cols);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// rows x 1: sum across the columns of each row.
Tensor row_sums(const Tensor& x);
// 1 x cols: sum down each column.
Tensor col_sums(const Tensor& x);

Tensor broadcast_to(const Tensor& x, std::size_t rows, std::size_t cols);
Tensor sum_to(const Tensor& x, std::size_t rows, std::size_t cols);

// Each row split into consecutive groups of `group` columns; log-softmax with
// max subtraction inside every group.
Tensor log_softmax_groups(const Tensor& x, std::size_t group);
Tensor softmax_groups(const Tensor& x, std::size_t group);
// Every element replaced by the sum of its column group.
Tensor group_sums_expanded(const Tensor& x, std::size_t group);

Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count);
// Places x into columns [start, start + x.cols()) of a zero rows x total
// tensor.
Tensor embed_cols(const Tensor& x, std::size_t total, std::size_t start);

// Each row repeated `times` consecutively: row r becomes rows r*times ...
Tensor repeat_rows(const Tensor& x, std::size_t times);
// Inverse adjoint of repeat_rows: sums consecutive blocks of `times` rows.
Tensor sum_row_blocks(const Tensor& x, std::size_t times);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& x) { return neg(x); }
inline Tensor operator*(double a, const Tensor& x) { return scale(x, a); }
inline Tensor operator*(const Tensor& x, double a) { return scale(x, a); }
inline Tensor operator+(const Tensor& x, double a) { return add_scalar(x, a); }
inline Tensor operator+(double a, const Tensor& x) { return add_scalar(x, a); }
inline Tensor operator-(const Tensor& x, double a) { return add_scalar(x, -a); }
inline Tensor operator-(double a, const Tensor& x)
{
  return add_scalar(neg(x), a);
}

} // namespace bgan

#endif // BGAN_TENSOR_HPP
