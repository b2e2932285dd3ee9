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

#include "bgan/tensor.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "bgan/error.hpp"
#include "tensor_node.hpp"

namespace bgan {

namespace {

thread_local bool g_grad_enabled = true;

std::string shape_str(std::size_t r, std::size_t c)
{
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

} // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad)
{
  return full(rows, cols, 0.0, requires_grad);
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double value,
                    bool requires_grad)
{
  return from(rows, cols, std::vector<double>(rows * cols, value), requires_grad);
}

Tensor Tensor::from(std::size_t rows, std::size_t cols,
                    std::vector<double> values, bool requires_grad)
{
  if (rows == 0 || cols == 0)
    throw ShapeError("tensor dimensions must be positive, got " +
                     shape_str(rows, cols));
  if (values.size() != rows * cols)
    throw ShapeError("tensor of shape " + shape_str(rows, cols) + " given " +
                     std::to_string(values.size()) + " values");
  for (double v : values)
    if (!std::isfinite(v))
      throw NonFiniteError("non-finite value in tensor construction");
  auto node = std::make_shared<detail::Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  node->op = "leaf";
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad)
{
  return from(1, 1, {value}, requires_grad);
}

std::size_t Tensor::rows() const { return node_->rows; }
std::size_t Tensor::cols() const { return node_->cols; }

std::span<const double> Tensor::values() const { return node_->value; }

double Tensor::at(std::size_t r, std::size_t c) const
{
  if (r >= rows() || c >= cols())
    throw ShapeError("index out of range");
  return node_->value[r * cols() + c];
}

double Tensor::item() const
{
  if (size() != 1)
    throw ShapeError("item() on tensor of shape " + shape_str(rows(), cols()));
  return node_->value[0];
}

std::span<double> Tensor::mutable_values()
{
  if (!is_leaf())
    throw Error("in-place modification of a non-leaf tensor");
  return node_->value;
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::is_leaf() const { return !node_->backward; }
const char* Tensor::op_name() const { return node_->op; }

Tensor Tensor::grad() const { return node_->grad; }

void Tensor::set_grad(Tensor g) const
{
  if (g.defined() && (g.rows() != rows() || g.cols() != cols()))
    throw ShapeError("gradient shape " + shape_str(g.rows(), g.cols()) +
                     " does not match tensor " + shape_str(rows(), cols()));
  node_->grad = std::move(g);
}

void Tensor::zero_grad() const { node_->grad = Tensor(); }

Tensor Tensor::detach() const { return clone(false); }

Tensor Tensor::clone(bool requires_grad) const
{
  return from(rows(), cols(), node_->value, requires_grad);
}

Tensor make_op(const char* op, std::size_t rows, std::size_t cols,
               std::vector<double> values, std::vector<Tensor> inputs,
               detail::BackwardFn fn)
{
  for (double v : values)
    if (!std::isfinite(v))
      throw NonFiniteError(std::string("non-finite value produced by ") + op);
  auto node = std::make_shared<detail::Node>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(values);
  node->op = op;
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& in : inputs)
      any = any || in.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs = std::move(inputs);
      node->backward = std::move(fn);
    }
  }
  return Tensor(std::move(node));
}

Tape::Tape(const Tensor& root)
{
  if (!root.defined() || !root.requires_grad())
    return;
  // Iterative post-order DFS; a node is emitted after all of its inputs.
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root.node_.get(), 0);
  visited.insert(root.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].node_.get();
      if (child->requires_grad && visited.insert(child).second)
        stack.emplace_back(child, 0);
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

std::vector<std::string> Tape::op_names() const
{
  std::vector<std::string> names;
  names.reserve(order_.size());
  for (const auto* n : order_)
    names.emplace_back(n->op);
  return names;
}

long Tape::index_of(const Tensor& t) const
{
  for (std::size_t i = 0; i < order_.size(); ++i)
    if (order_[i] == t.node_.get())
      return static_cast<long>(i);
  return -1;
}

bool Tape::is_topological() const
{
  std::unordered_map<const detail::Node*, std::size_t> pos;
  for (std::size_t i = 0; i < order_.size(); ++i)
    pos[order_[i]] = i;
  for (std::size_t i = 0; i < order_.size(); ++i)
    for (const auto& in : order_[i]->inputs) {
      auto it = pos.find(in.node_.get());
      if (it != pos.end() && it->second >= i)
        return false;
    }
  return true;
}

namespace {

// Shared reverse sweep. Returns the gradient map keyed by node.
std::unordered_map<detail::Node*, Tensor> reverse_sweep(const Tape& tape,
                                                        const Tensor& seed,
                                                        detail::Node* root)
{
  std::unordered_map<detail::Node*, Tensor> grads;
  grads[root] = seed;
  const auto& order = tape.nodes();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    auto g = grads.find(node);
    if (g == grads.end() || !node->backward)
      continue;
    Tensor upstream = g->second;
    std::vector<Tensor> in_grads = node->backward(upstream);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      const Tensor& in = node->inputs[i];
      if (i >= in_grads.size() || !in_grads[i].defined() || !in.requires_grad())
        continue;
      detail::Node* key = detail::node_of(in);
      auto existing = grads.find(key);
      if (existing == grads.end())
        grads.emplace(key, in_grads[i]);
      else
        existing->second = add(existing->second, in_grads[i]);
    }
  }
  return grads;
}

} // namespace

std::vector<Tensor> grad(const Tensor& output, std::span<const Tensor> wrt,
                         bool create_graph, const Tensor& seed)
{
  Tensor s = seed;
  if (!s.defined()) {
    if (output.size() != 1)
      throw ShapeError("grad() of a non-scalar output requires a seed");
    s = Tensor::scalar(1.0);
  } else if (s.rows() != output.rows() || s.cols() != output.cols()) {
    throw ShapeError("grad() seed shape does not match output");
  }

  std::vector<Tensor> result;
  result.reserve(wrt.size());
  if (!output.requires_grad()) {
    for (const auto& w : wrt)
      result.push_back(Tensor::zeros(w.rows(), w.cols()));
    return result;
  }

  Tape tape(output);
  std::unordered_map<detail::Node*, Tensor> grads;
  if (create_graph) {
    grads = reverse_sweep(tape, s, detail::node_of(output));
  } else {
    NoGradGuard guard;
    grads = reverse_sweep(tape, s, detail::node_of(output));
  }
  for (const auto& w : wrt) {
    auto it = grads.find(detail::node_of(w));
    if (it == grads.end())
      result.push_back(Tensor::zeros(w.rows(), w.cols()));
    else if (create_graph)
      result.push_back(it->second);
    else
      result.push_back(it->second.detach());
  }
  return result;
}

void backward(const Tensor& loss)
{
  if (!loss.defined() || loss.size() != 1)
    throw ShapeError("backward() requires a scalar loss");
  if (!loss.requires_grad())
    return;
  Tape tape(loss);
  std::unordered_map<detail::Node*, Tensor> grads;
  {
    NoGradGuard guard;
    grads = reverse_sweep(tape, Tensor::scalar(1.0), detail::node_of(loss));
  }
  for (detail::Node* node : tape.nodes()) {
    if (node->backward || !node->requires_grad)
      continue;
    auto it = grads.find(node);
    if (it == grads.end())
      continue;
    if (node->grad.defined()) {
      NoGradGuard guard;
      node->grad = add(node->grad, it->second).detach();
    } else {
      node->grad = it->second.detach();
    }
  }
}

} // namespace bgan
