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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bgan/error.hpp"
#include "bgan/tensor.hpp"

namespace bgan {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

std::string shape_str(const Tensor& t)
{
  return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]";
}

void require(const Tensor& t, const char* op)
{
  if (!t.defined())
    throw ShapeError(std::string(op) + ": undefined tensor");
}

std::size_t broadcast_dim(std::size_t a, std::size_t b, const char* op,
                          const Tensor& x, const Tensor& y)
{
  if (a == b || b == 1)
    return a;
  if (a == 1)
    return b;
  throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(x) +
                   " with " + shape_str(y));
}

template <class F>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f,
              detail::BackwardFn fn)
{
  require(a, op);
  require(b, op);
  const std::size_t r = broadcast_dim(a.rows(), b.rows(), op, a, b);
  const std::size_t c = broadcast_dim(a.cols(), b.cols(), op, a, b);
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(r * c);
  const bool ar = a.rows() != 1, ac = a.cols() != 1;
  const bool br = b.rows() != 1, bc = b.cols() != 1;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out[i * c + j] = f(av[(ar ? i : 0) * a.cols() + (ac ? j : 0)],
                         bv[(br ? i : 0) * b.cols() + (bc ? j : 0)]);
  return make_op(op, r, c, std::move(out), {a, b}, std::move(fn));
}

template <class F>
Tensor unary(const char* op, const Tensor& x, F f, detail::BackwardFn fn)
{
  require(x, op);
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i)
    out[i] = f(xv[i]);
  return make_op(op, x.rows(), x.cols(), std::move(out), {x}, std::move(fn));
}

Tensor constant_like(const Tensor& x, std::vector<double> values)
{
  return Tensor::from(x.rows(), x.cols(), std::move(values));
}

double softplus_scalar(double v)
{
  return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

double sigmoid_scalar(double v)
{
  if (v >= 0)
    return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

} // namespace

Tensor broadcast_to(const Tensor& x, std::size_t rows, std::size_t cols)
{
  require(x, "broadcast_to");
  if (x.rows() == rows && x.cols() == cols)
    return x;
  if ((x.rows() != rows && x.rows() != 1) || (x.cols() != cols && x.cols() != 1))
    throw ShapeError("broadcast_to: cannot expand " + shape_str(x));
  const std::size_t xr = x.rows(), xc = x.cols();
  auto xv = x.values();
  std::vector<double> out(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[i * cols + j] = xv[(xr == 1 ? 0 : i) * xc + (xc == 1 ? 0 : j)];
  return make_op("broadcast_to", rows, cols, std::move(out), {x},
                 [xr, xc](const Tensor& g) {
                   return std::vector<Tensor>{sum_to(g, xr, xc)};
                 });
}

Tensor sum_to(const Tensor& x, std::size_t rows, std::size_t cols)
{
  require(x, "sum_to");
  if (x.rows() == rows && x.cols() == cols)
    return x;
  if ((rows != x.rows() && rows != 1) || (cols != x.cols() && cols != 1))
    throw ShapeError("sum_to: cannot reduce " + shape_str(x));
  const std::size_t xr = x.rows(), xc = x.cols();
  auto xv = x.values();
  std::vector<double> out(rows * cols, 0.0);
  for (std::size_t i = 0; i < xr; ++i)
    for (std::size_t j = 0; j < xc; ++j)
      out[(rows == 1 ? 0 : i) * cols + (cols == 1 ? 0 : j)] += xv[i * xc + j];
  return make_op("sum_to", rows, cols, std::move(out), {x},
                 [xr, xc](const Tensor& g) {
                   return std::vector<Tensor>{broadcast_to(g, xr, xc)};
                 });
}

Tensor add(const Tensor& a, const Tensor& b)
{
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  return binary("add", a, b, [](double x, double y) { return x + y; },
                [=](const Tensor& g) {
                  return std::vector<Tensor>{sum_to(g, ar, ac), sum_to(g, br, bc)};
                });
}

Tensor sub(const Tensor& a, const Tensor& b)
{
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  return binary("sub", a, b, [](double x, double y) { return x - y; },
                [=](const Tensor& g) {
                  return std::vector<Tensor>{sum_to(g, ar, ac),
                                             sum_to(neg(g), br, bc)};
                });
}

Tensor mul(const Tensor& a, const Tensor& b)
{
  return binary("mul", a, b, [](double x, double y) { return x * y; },
                [a, b](const Tensor& g) {
                  return std::vector<Tensor>{
                      a.requires_grad() ? sum_to(mul(g, b), a.rows(), a.cols())
                                        : Tensor(),
                      b.requires_grad() ? sum_to(mul(g, a), b.rows(), b.cols())
                                        : Tensor()};
                });
}

Tensor div(const Tensor& a, const Tensor& b)
{
  return binary("div", a, b, [](double x, double y) { return x / y; },
                [a, b](const Tensor& g) {
                  Tensor ga, gb;
                  if (a.requires_grad())
                    ga = sum_to(div(g, b), a.rows(), a.cols());
                  if (b.requires_grad())
                    gb = sum_to(neg(div(mul(g, a), square(b))), b.rows(),
                                b.cols());
                  return std::vector<Tensor>{ga, gb};
                });
}

Tensor neg(const Tensor& x)
{
  return unary("neg", x, [](double v) { return -v; },
               [](const Tensor& g) { return std::vector<Tensor>{neg(g)}; });
}

Tensor scale(const Tensor& x, double a)
{
  return unary("scale", x, [a](double v) { return a * v; },
               [a](const Tensor& g) { return std::vector<Tensor>{scale(g, a)}; });
}

Tensor add_scalar(const Tensor& x, double a)
{
  return unary("add_scalar", x, [a](double v) { return v + a; },
               [](const Tensor& g) { return std::vector<Tensor>{g}; });
}

Tensor exp(const Tensor& x)
{
  return unary("exp", x, [](double v) { return std::exp(v); },
               [x](const Tensor& g) { return std::vector<Tensor>{mul(g, exp(x))}; });
}

Tensor log(const Tensor& x)
{
  return unary("log", x, [](double v) { return std::log(v); },
               [x](const Tensor& g) { return std::vector<Tensor>{div(g, x)}; });
}

Tensor tanh(const Tensor& x)
{
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [x](const Tensor& g) {
                 return std::vector<Tensor>{mul(g, 1.0 - square(tanh(x)))};
               });
}

Tensor sigmoid(const Tensor& x)
{
  return unary("sigmoid", x, sigmoid_scalar, [x](const Tensor& g) {
    Tensor s = sigmoid(x);
    return std::vector<Tensor>{mul(g, mul(s, 1.0 - s))};
  });
}

Tensor relu(const Tensor& x)
{
  return unary("relu", x, [](double v) { return v > 0 ? v : 0.0; },
               [x](const Tensor& g) {
                 auto xv = x.values();
                 std::vector<double> mask(xv.size());
                 for (std::size_t i = 0; i < xv.size(); ++i)
                   mask[i] = xv[i] > 0 ? 1.0 : 0.0;
                 return std::vector<Tensor>{mul(g, constant_like(x, std::move(mask)))};
               });
}

Tensor square(const Tensor& x)
{
  return unary("square", x, [](double v) { return v * v; },
               [x](const Tensor& g) {
                 return std::vector<Tensor>{mul(g, scale(x, 2.0))};
               });
}

Tensor sqrt(const Tensor& x)
{
  return unary("sqrt", x, [](double v) { return std::sqrt(v); },
               [x](const Tensor& g) {
                 return std::vector<Tensor>{div(g, scale(sqrt(x), 2.0))};
               });
}

Tensor softplus(const Tensor& x)
{
  return unary("softplus", x, softplus_scalar, [x](const Tensor& g) {
    return std::vector<Tensor>{mul(g, sigmoid(x))};
  });
}

Tensor clamp(const Tensor& x, double lo, double hi)
{
  return unary("clamp", x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
               [x, lo, hi](const Tensor& g) {
                 auto xv = x.values();
                 std::vector<double> mask(xv.size());
                 for (std::size_t i = 0; i < xv.size(); ++i)
                   mask[i] = (xv[i] >= lo && xv[i] <= hi) ? 1.0 : 0.0;
                 return std::vector<Tensor>{mul(g, constant_like(x, std::move(mask)))};
               });
}

Tensor matmul(const Tensor& a, const Tensor& b)
{
  require(a, "matmul");
  require(b, "matmul");
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + shape_str(a) + " x " + shape_str(b));
  std::vector<double> out(a.rows() * b.cols());
  Map(out.data(), a.rows(), b.cols()).noalias() =
      ConstMap(a.values().data(), a.rows(), a.cols()) *
      ConstMap(b.values().data(), b.rows(), b.cols());
  return make_op("matmul", a.rows(), b.cols(), std::move(out), {a, b},
                 [a, b](const Tensor& g) {
                   return std::vector<Tensor>{
                       a.requires_grad() ? matmul(g, transpose(b)) : Tensor(),
                       b.requires_grad() ? matmul(transpose(a), g) : Tensor()};
                 });
}

Tensor transpose(const Tensor& x)
{
  require(x, "transpose");
  std::vector<double> out(x.size());
  Map(out.data(), x.cols(), x.rows()) =
      ConstMap(x.values().data(), x.rows(), x.cols()).transpose();
  return make_op("transpose", x.cols(), x.rows(), std::move(out), {x},
                 [](const Tensor& g) { return std::vector<Tensor>{transpose(g)}; });
}

Tensor reshape(const Tensor& x, std::size_t rows, std::size_t cols)
{
  require(x, "reshape");
  if (rows * cols != x.size())
    throw ShapeError("reshape: " + shape_str(x) + " to " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  const auto r0 = x.rows(), c0 = x.cols();
  auto v = x.values();
  return make_op("reshape", rows, cols, std::vector<double>(v.begin(), v.end()),
                 {x}, [r0, c0](const Tensor& g) {
                   return std::vector<Tensor>{reshape(g, r0, c0)};
                 });
}

Tensor sum(const Tensor& x) { return sum_to(x, 1, 1); }

Tensor mean(const Tensor& x)
{
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor row_sums(const Tensor& x) { return sum_to(x, x.rows(), 1); }
Tensor col_sums(const Tensor& x) { return sum_to(x, 1, x.cols()); }

Tensor group_sums_expanded(const Tensor& x, std::size_t group)
{
  require(x, "group_sums_expanded");
  if (group == 0 || x.cols() % group != 0)
    throw ShapeError("group_sums_expanded: " + std::to_string(x.cols()) +
                     " columns not divisible by group " + std::to_string(group));
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t start = 0; start < xv.size(); start += group) {
    double s = 0.0;
    for (std::size_t k = 0; k < group; ++k)
      s += xv[start + k];
    for (std::size_t k = 0; k < group; ++k)
      out[start + k] = s;
  }
  // The map is symmetric, so it is its own adjoint.
  return make_op("group_sums_expanded", x.rows(), x.cols(), std::move(out), {x},
                 [group](const Tensor& g) {
                   return std::vector<Tensor>{group_sums_expanded(g, group)};
                 });
}

Tensor log_softmax_groups(const Tensor& x, std::size_t group)
{
  require(x, "log_softmax_groups");
  if (group == 0 || x.cols() % group != 0)
    throw ShapeError("log_softmax_groups: " + std::to_string(x.cols()) +
                     " columns not divisible by group " + std::to_string(group));
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t start = 0; start < xv.size(); start += group) {
    double m = xv[start];
    for (std::size_t k = 1; k < group; ++k)
      m = std::max(m, xv[start + k]);
    double s = 0.0;
    for (std::size_t k = 0; k < group; ++k)
      s += std::exp(xv[start + k] - m);
    const double lse = m + std::log(s);
    for (std::size_t k = 0; k < group; ++k)
      out[start + k] = xv[start + k] - lse;
  }
  return make_op("log_softmax_groups", x.rows(), x.cols(), std::move(out), {x},
                 [x, group](const Tensor& g) {
                   Tensor p = softmax_groups(x, group);
                   return std::vector<Tensor>{
                       sub(g, mul(p, group_sums_expanded(g, group)))};
                 });
}

Tensor softmax_groups(const Tensor& x, std::size_t group)
{
  return exp(log_softmax_groups(x, group));
}

Tensor concat_cols(const Tensor& a, const Tensor& b)
{
  require(a, "concat_cols");
  require(b, "concat_cols");
  if (a.rows() != b.rows())
    throw ShapeError("concat_cols: " + shape_str(a) + " with " + shape_str(b));
  const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols(), c = ca + cb;
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    std::copy_n(av.begin() + i * ca, ca, out.begin() + i * c);
    std::copy_n(bv.begin() + i * cb, cb, out.begin() + i * c + ca);
  }
  return make_op("concat_cols", r, c, std::move(out), {a, b},
                 [ca, cb](const Tensor& g) {
                   return std::vector<Tensor>{slice_cols(g, 0, ca),
                                              slice_cols(g, ca, cb)};
                 });
}

Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count)
{
  require(x, "slice_cols");
  if (count == 0 || start + count > x.cols())
    throw ShapeError("slice_cols: range out of bounds for " + shape_str(x));
  const std::size_t r = x.rows(), c = x.cols();
  auto xv = x.values();
  std::vector<double> out(r * count);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(xv.begin() + i * c + start, count, out.begin() + i * count);
  return make_op("slice_cols", r, count, std::move(out), {x},
                 [c, start](const Tensor& g) {
                   return std::vector<Tensor>{embed_cols(g, c, start)};
                 });
}

Tensor embed_cols(const Tensor& x, std::size_t total, std::size_t start)
{
  require(x, "embed_cols");
  const std::size_t r = x.rows(), n = x.cols();
  if (start + n > total)
    throw ShapeError("embed_cols: range out of bounds");
  auto xv = x.values();
  std::vector<double> out(r * total, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(xv.begin() + i * n, n, out.begin() + i * total + start);
  return make_op("embed_cols", r, total, std::move(out), {x},
                 [start, n](const Tensor& g) {
                   return std::vector<Tensor>{slice_cols(g, start, n)};
                 });
}

Tensor repeat_rows(const Tensor& x, std::size_t times)
{
  require(x, "repeat_rows");
  if (times == 0)
    throw ShapeError("repeat_rows: times must be positive");
  if (times == 1)
    return x;
  const std::size_t r = x.rows(), c = x.cols();
  auto xv = x.values();
  std::vector<double> out(r * times * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t t = 0; t < times; ++t)
      std::copy_n(xv.begin() + i * c, c, out.begin() + (i * times + t) * c);
  return make_op("repeat_rows", r * times, c, std::move(out), {x},
                 [times](const Tensor& g) {
                   return std::vector<Tensor>{sum_row_blocks(g, times)};
                 });
}

Tensor sum_row_blocks(const Tensor& x, std::size_t times)
{
  require(x, "sum_row_blocks");
  if (times == 0 || x.rows() % times != 0)
    throw ShapeError("sum_row_blocks: rows not divisible by block size");
  if (times == 1)
    return x;
  const std::size_t r = x.rows() / times, c = x.cols();
  auto xv = x.values();
  std::vector<double> out(r * c, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j)
      out[(i / times) * c + j] += xv[i * c + j];
  return make_op("sum_row_blocks", r, c, std::move(out), {x},
                 [times](const Tensor& g) {
                   return std::vector<Tensor>{repeat_rows(g, times)};
                 });
}

} // namespace bgan
