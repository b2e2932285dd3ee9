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

#ifndef BGAN_DATA_HPP
#define BGAN_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bgan/continuous.hpp"
#include "bgan/matrix.hpp"

namespace bgan {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxArray
{
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

IdxArray read_idx(const std::string& path);
IdxArray read_idx_images(const std::string& path); // requires the 3-D image magic
IdxArray read_idx_labels(const std::string& path); // requires the 1-D label magic
void write_idx(const std::string& path, const IdxArray& array);

// One flattened image per row, raw 0..255 values. `limit` caps the row count.
Matrix idx_to_matrix(const IdxArray& images, std::size_t limit = 0);

// Block-mean pooling of row-major height x width images.
Matrix downsample(const Matrix& images, std::size_t height, std::size_t width,
                  std::size_t factor);

Matrix binarize_threshold(const Matrix& images, double threshold);
// Bernoulli(pixel / 255) once per pixel, fixed by the seed.
Matrix binarize_stochastic(const Matrix& images, std::uint64_t seed);

enum class ObservationKind
{
  Binary,
  OneHot,
  Real
};

std::string observation_kind_name(ObservationKind kind);

struct Dataset
{
  Matrix samples;
  ObservationKind kind = ObservationKind::Real;
  std::vector<std::uint64_t> shape; // per-sample layout, e.g. {14, 14}
  std::vector<double> labels;       // optional per-sample label (mode index, class)

  void validate() const;
};

// Named exact distributions over k^n one-hot grids, in the outcome order of
// categorical_outcomes.
struct CategoricalTarget
{
  std::size_t positions = 1;
  std::size_t classes = 2;
  std::string pattern;
  std::vector<double> probabilities;
};

CategoricalTarget categorical_pattern(const std::string& pattern, std::size_t n_positions,
                                      std::size_t k_classes);

Dataset synth_categorical_grid(const CategoricalTarget& target, std::size_t size,
                               std::uint64_t seed);

Dataset synth_gaussian_ring(std::size_t n_modes, double radius, double sigma,
                            std::size_t size, std::uint64_t seed);
ModeSet ring_modes(std::size_t n_modes, double radius, double sigma);

// Two isotropic Gaussian classes in 2-D with centres `separation` sigmas
// apart. Labels are one-hot in the returned label matrix.
struct LabeledData
{
  Matrix x;
  Matrix y;
};
LabeledData synth_blobs(std::size_t size, double separation, std::uint64_t seed);

// Same binary container as model checkpoints.
void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

/// --data-dir when given, else $BGAN_DATA_DIR, else "data".
std::string resolve_data_dir(const std::optional<std::string>& flag);

struct MnistOptions
{
  std::size_t limit = 10000;
  std::size_t downsample_factor = 2; // 28 -> 14; 1 keeps full resolution
  std::uint64_t binarize_seed = 0;
};

/// Loads train-images-idx3-ubyte from `dir`, or the smaller
/// mnist-subset-images-idx3-ubyte when the full file is absent.
Dataset load_binarized_mnist(const std::string& dir, const MnistOptions& options);
std::optional<std::string> find_mnist_images(const std::string& dir);

// P5 grayscale grid of tiles separated by 2-pixel white borders.
// Values are in [0, 1], one tile per row of `tiles`.
void write_pgm_grid(const std::string& path, const Matrix& tiles, std::size_t height,
                    std::size_t width, std::size_t columns);

} // namespace bgan

#endif // BGAN_DATA_HPP
