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

#ifndef BGAN_SRC_TENSOR_NODE_HPP
#define BGAN_SRC_TENSOR_NODE_HPP

#include <vector>

#include "bgan/tensor.hpp"

namespace bgan::detail {

struct Node
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  bool requires_grad = false;
  std::vector<Tensor> inputs;
  BackwardFn backward;
  Tensor grad;
  const char* op = "leaf";

  static Node* of(const Tensor& t) { return t.node_.get(); }
};

inline Node* node_of(const Tensor& t) { return Node::of(t); }

} // namespace bgan::detail

#endif // BGAN_SRC_TENSOR_NODE_HPP
