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

#include "bgan/data.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bgan/error.hpp"
#include "bgan/models.hpp"
#include "bgan/oracle.hpp"
#include "bgan/random.hpp"

namespace bgan {

namespace {

constexpr std::uint64_t kMaxIdxElements = std::uint64_t{1} << 32;

std::uint32_t read_be32(std::istream& in, const std::string& path)
{
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(path + ": truncated IDX header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v)
{
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

IdxArray read_idx(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  IdxArray a;
  a.magic = read_be32(in, path);
  if (a.magic != kIdxImageMagic && a.magic != kIdxLabelMagic)
    throw FormatError(path + ": bad IDX magic " + std::to_string(a.magic));
  const std::uint32_t rank = a.magic & 0xff;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const auto d = read_be32(in, path);
    a.dims.push_back(d);
    count *= d;
    if (count > kMaxIdxElements)
      throw FormatError(path + ": IDX dimensions overflow");
  }
  a.data.resize(count);
  if (count > 0 &&
      !in.read(reinterpret_cast<char*>(a.data.data()), static_cast<std::streamsize>(count)))
    throw FormatError(path + ": truncated IDX payload (expected " + std::to_string(count) +
                      " bytes)");
  return a;
}

IdxArray read_idx_images(const std::string& path)
{
  auto a = read_idx(path);
  if (a.magic != kIdxImageMagic)
    throw FormatError(path + ": bad magic, expected an IDX image file");
  return a;
}

IdxArray read_idx_labels(const std::string& path)
{
  auto a = read_idx(path);
  if (a.magic != kIdxLabelMagic)
    throw FormatError(path + ": bad magic, expected an IDX label file");
  return a;
}

void write_idx(const std::string& path, const IdxArray& array)
{
  std::uint64_t count = 1;
  for (auto d : array.dims)
    count *= d;
  if ((array.magic & 0xff) != array.dims.size() || count != array.data.size())
    throw ShapeError("write_idx: dimensions disagree with magic or payload");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  write_be32(out, array.magic);
  for (auto d : array.dims)
    write_be32(out, d);
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size()));
  if (!out)
    throw Error("write failed for " + path);
}

Matrix idx_to_matrix(const IdxArray& images, std::size_t limit)
{
  if (images.dims.empty())
    throw ShapeError("idx_to_matrix: empty array");
  std::size_t n = images.dims[0];
  if (limit > 0)
    n = std::min(n, limit);
  const std::size_t per = n == 0 ? 0 : images.data.size() / images.dims[0];
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(per));
  for (std::size_t i = 0; i < n * per; ++i)
    m.data()[i] = images.data[i];
  return m;
}

Matrix downsample(const Matrix& images, std::size_t height, std::size_t width,
                  std::size_t factor)
{
  if (factor == 0 || height % factor != 0 || width % factor != 0)
    throw ShapeError("downsample: " + std::to_string(height) + "x" + std::to_string(width) +
                     " is not divisible by factor " + std::to_string(factor));
  if (static_cast<std::size_t>(images.cols()) != height * width)
    throw ShapeError("downsample: row width does not match height x width");
  const std::size_t h = height / factor, w = width / factor;
  const double norm = 1.0 / static_cast<double>(factor * factor);
  Matrix out = Matrix::Zero(images.rows(), static_cast<Eigen::Index>(h * w));
  for (Eigen::Index r = 0; r < images.rows(); ++r)
    for (std::size_t i = 0; i < height; ++i)
      for (std::size_t j = 0; j < width; ++j)
        out(r, static_cast<Eigen::Index>((i / factor) * w + j / factor)) +=
            norm * images(r, static_cast<Eigen::Index>(i * width + j));
  return out;
}

Matrix binarize_threshold(const Matrix& images, double threshold)
{
  return (images.array() >= threshold).cast<double>().matrix();
}

Matrix binarize_stochastic(const Matrix& images, std::uint64_t seed)
{
  Rng rng(seed);
  Matrix out(images.rows(), images.cols());
  for (Eigen::Index i = 0; i < images.size(); ++i) {
    const double p = images.data()[i] / 255.0;
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("binarize_stochastic: pixel outside [0, 255]");
    // Draw unconditionally so the stream position is independent of content.
    const double u = rng.uniform();
    out.data()[i] = u < p ? 1.0 : 0.0;
  }
  return out;
}

std::string observation_kind_name(ObservationKind kind)
{
  switch (kind) {
  case ObservationKind::Binary: return "binary";
  case ObservationKind::OneHot: return "one_hot";
  case ObservationKind::Real: return "real";
  }
  return "?";
}

void Dataset::validate() const
{
  switch (kind) {
  case ObservationKind::Binary:
    for (Eigen::Index i = 0; i < samples.size(); ++i)
      if (samples.data()[i] != 0.0 && samples.data()[i] != 1.0)
        throw DomainError("binary dataset holds a value other than 0 or 1");
    break;
  case ObservationKind::OneHot: {
    if (shape.size() != 2)
      throw ShapeError("one-hot dataset needs a {positions, classes} shape");
    validate_support(ConditionalFamily::categorical(shape[0], shape[1]), samples);
    break;
  }
  case ObservationKind::Real:
    if (!samples.allFinite())
      throw NonFiniteError("real dataset holds a non-finite value");
    break;
  }
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(samples.rows()))
    throw ShapeError("dataset label count does not match the sample count");
}

CategoricalTarget categorical_pattern(const std::string& pattern, std::size_t n_positions,
                                      std::size_t k_classes)
{
  CategoricalTarget t;
  t.positions = n_positions;
  t.classes = k_classes;
  t.pattern = pattern;
  const Matrix outcomes = categorical_outcomes(n_positions, k_classes);
  const auto total = static_cast<std::size_t>(outcomes.rows());
  t.probabilities.assign(total, 0.0);
  // Digit j of outcome index i in base k is the class at position j.
  auto digit = [&](std::size_t i, std::size_t j) {
    for (std::size_t s = 0; s < j; ++s)
      i /= k_classes;
    return i % k_classes;
  };
  if (pattern == "uniform") {
    t.probabilities.assign(total, 1.0 / static_cast<double>(total));
  } else if (pattern == "two-mode") {
    if (k_classes < 2)
      throw ConfigError("two-mode pattern needs at least 2 classes");
    // All positions at class 0, or all at class k-1.
    t.probabilities[0] = 0.5;
    t.probabilities[total - 1] = 0.5;
  } else if (pattern == "checker") {
    // Neighbouring positions cycle through the classes; one outcome per
    // starting class.
    for (std::size_t i = 0; i < total; ++i) {
      bool ok = true;
      for (std::size_t j = 1; j < n_positions && ok; ++j)
        ok = digit(i, j) == (digit(i, j - 1) + 1) % k_classes;
      if (ok)
        t.probabilities[i] = 1.0 / static_cast<double>(k_classes);
    }
  } else if (pattern == "skewed") {
    const double norm = static_cast<double>(total * (total + 1)) / 2.0;
    for (std::size_t i = 0; i < total; ++i)
      t.probabilities[i] = static_cast<double>(i + 1) / norm;
  } else {
    throw ConfigError("unknown categorical pattern '" + pattern +
                      "' (expected uniform|two-mode|checker|skewed)");
  }
  return t;
}

Dataset synth_categorical_grid(const CategoricalTarget& target, std::size_t size,
                               std::uint64_t seed)
{
  const Matrix outcomes = categorical_outcomes(target.positions, target.classes);
  if (target.probabilities.size() != static_cast<std::size_t>(outcomes.rows()))
    throw ShapeError("categorical target does not match its grid");
  Rng rng(seed);
  Dataset d;
  d.kind = ObservationKind::OneHot;
  d.shape = {target.positions, target.classes};
  d.samples.resize(static_cast<Eigen::Index>(size), outcomes.cols());
  for (std::size_t s = 0; s < size; ++s) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < target.probabilities.size(); ++i)
      if (target.probabilities[i] > 0.0) {
        pick = i;
        acc += target.probabilities[i];
        if (u < acc)
          break;
      }
    d.samples.row(static_cast<Eigen::Index>(s)) = outcomes.row(static_cast<Eigen::Index>(pick));
    d.labels.push_back(static_cast<double>(pick));
  }
  return d;
}

ModeSet ring_modes(std::size_t n_modes, double radius, double sigma)
{
  if (n_modes == 0)
    throw ConfigError("the ring needs at least one mode");
  ModeSet m;
  m.sigma = sigma;
  m.centers.resize(static_cast<Eigen::Index>(n_modes), 2);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(n_modes);
    m.centers(static_cast<Eigen::Index>(i), 0) = radius * std::cos(a);
    m.centers(static_cast<Eigen::Index>(i), 1) = radius * std::sin(a);
  }
  return m;
}

Dataset synth_gaussian_ring(std::size_t n_modes, double radius, double sigma,
                            std::size_t size, std::uint64_t seed)
{
  const ModeSet modes = ring_modes(n_modes, radius, sigma);
  Rng rng(seed);
  Dataset d;
  d.kind = ObservationKind::Real;
  d.shape = {2};
  d.samples.resize(static_cast<Eigen::Index>(size), 2);
  for (std::size_t s = 0; s < size; ++s) {
    const auto mode = static_cast<Eigen::Index>(rng.below(n_modes));
    d.samples(static_cast<Eigen::Index>(s), 0) = modes.centers(mode, 0) + sigma * rng.normal();
    d.samples(static_cast<Eigen::Index>(s), 1) = modes.centers(mode, 1) + sigma * rng.normal();
    d.labels.push_back(static_cast<double>(mode));
  }
  return d;
}

LabeledData synth_blobs(std::size_t size, double separation, std::uint64_t seed)
{
  Rng rng(seed);
  LabeledData d;
  d.x.resize(static_cast<Eigen::Index>(size), 2);
  d.y = Matrix::Zero(static_cast<Eigen::Index>(size), 2);
  for (std::size_t s = 0; s < size; ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    const Eigen::Index cls = static_cast<Eigen::Index>(s % 2);
    const double centre = cls == 0 ? -0.5 * separation : 0.5 * separation;
    d.x(r, 0) = centre + rng.normal();
    d.x(r, 1) = rng.normal();
    d.y(r, cls) = 1.0;
  }
  return d;
}

void write_dataset(const std::string& path, const Dataset& data)
{
  data.validate();
  std::vector<NamedArray> arrays;
  auto v = std::vector<double>(data.samples.data(), data.samples.data() + data.samples.size());
  arrays.push_back({"samples",
                    {static_cast<std::uint64_t>(data.samples.rows()),
                     static_cast<std::uint64_t>(data.samples.cols())},
                    std::move(v)});
  arrays.push_back({"kind", {1}, {static_cast<double>(data.kind)}});
  std::vector<double> shape(data.shape.begin(), data.shape.end());
  arrays.push_back({"shape", {shape.size()}, shape});
  arrays.push_back({"labels", {data.labels.size()}, data.labels});
  write_checkpoint(path, arrays);
}

Dataset read_dataset(const std::string& path)
{
  Dataset d;
  bool have_samples = false, have_kind = false;
  for (auto& a : read_checkpoint(path)) {
    if (a.name == "samples") {
      if (a.dims.size() != 2)
        throw FormatError(path + ": samples must be 2-D");
      d.samples.resize(static_cast<Eigen::Index>(a.dims[0]),
                       static_cast<Eigen::Index>(a.dims[1]));
      std::copy(a.values.begin(), a.values.end(), d.samples.data());
      have_samples = true;
    } else if (a.name == "kind") {
      if (a.values.size() != 1 || a.values[0] < 0 || a.values[0] > 2)
        throw FormatError(path + ": invalid observation kind");
      d.kind = static_cast<ObservationKind>(static_cast<int>(a.values[0]));
      have_kind = true;
    } else if (a.name == "shape") {
      d.shape.assign(a.values.begin(), a.values.end());
    } else if (a.name == "labels") {
      d.labels = std::move(a.values);
    }
  }
  if (!have_samples || !have_kind)
    throw FormatError(path + ": not a dataset file");
  d.validate();
  return d;
}

std::string resolve_data_dir(const std::optional<std::string>& flag)
{
  if (flag && !flag->empty())
    return *flag;
  if (const char* env = std::getenv("BGAN_DATA_DIR"); env && *env)
    return env;
  return "data";
}

std::optional<std::string> find_mnist_images(const std::string& dir)
{
  for (const char* name : {"train-images-idx3-ubyte", "mnist-subset-images-idx3-ubyte"}) {
    auto p = std::filesystem::path(dir) / name;
    if (std::filesystem::exists(p))
      return p.string();
  }
  return std::nullopt;
}

Dataset load_binarized_mnist(const std::string& dir, const MnistOptions& options)
{
  auto path = find_mnist_images(dir);
  if (!path)
    throw Error("no MNIST image file in '" + dir +
                "' (expected train-images-idx3-ubyte; see tools/make_mnist_idx.py)");
  auto idx = read_idx_images(*path);
  const std::size_t h = idx.dims[1], w = idx.dims[2];
  Matrix images = idx_to_matrix(idx, options.limit);
  std::size_t oh = h, ow = w;
  if (options.downsample_factor > 1) {
    images = downsample(images, h, w, options.downsample_factor);
    oh /= options.downsample_factor;
    ow /= options.downsample_factor;
  }
  Dataset d;
  d.kind = ObservationKind::Binary;
  d.shape = {oh, ow};
  d.samples = binarize_stochastic(images, options.binarize_seed);
  return d;
}

void write_pgm_grid(const std::string& path, const Matrix& tiles, std::size_t height,
                    std::size_t width, std::size_t columns)
{
  if (static_cast<std::size_t>(tiles.cols()) != height * width)
    throw ShapeError("write_pgm_grid: tile width does not match height x width");
  if (columns == 0 || tiles.rows() == 0)
    throw ShapeError("write_pgm_grid: empty grid");
  constexpr std::size_t sep = 2;
  const std::size_t n = static_cast<std::size_t>(tiles.rows());
  const std::size_t rows = (n + columns - 1) / columns;
  const std::size_t W = columns * width + (columns + 1) * sep;
  const std::size_t H = rows * height + (rows + 1) * sep;
  std::vector<unsigned char> img(W * H, 255);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t oy = sep + (t / columns) * (height + sep);
    const std::size_t ox = sep + (t % columns) * (width + sep);
    for (std::size_t i = 0; i < height; ++i)
      for (std::size_t j = 0; j < width; ++j) {
        const double v = std::clamp(
            tiles(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i * width + j)), 0.0,
            1.0);
        img[(oy + i) * W + ox + j] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  out << "P5\n" << W << ' ' << H << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (!out)
    throw Error("write failed for " + path);
}

} // namespace bgan
