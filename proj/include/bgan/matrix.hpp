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

#ifndef BGAN_MATRIX_HPP
#define BGAN_MATRIX_HPP

#include <vector>

#include <Eigen/Dense>

#include "bgan/tensor.hpp"

namespace bgan {

// Plain row-major data (samples, datasets) outside the tape.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Tensor to_tensor(const Matrix& m, bool requires_grad = false)
{
  return Tensor::from(static_cast<std::size_t>(m.rows()),
                      static_cast<std::size_t>(m.cols()),
                      std::vector<double>(m.data(), m.data() + m.size()),
                      requires_grad);
}

inline Matrix to_matrix(const Tensor& t)
{
  Matrix m(t.rows(), t.cols());
  auto v = t.values();
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

} // namespace bgan

#endif // BGAN_MATRIX_HPP
