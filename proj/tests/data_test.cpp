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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "bgan/data.hpp"
#include "bgan/error.hpp"
#include "bgan/oracle.hpp"
#include "bgan/random.hpp"

namespace bgan {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("bgan_data_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes)
{
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> read_bytes(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// IDX

using Idx = TempDir;

TEST_F(Idx, MinimalImageFile)
{
  write_bytes(path("one"), {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 255});
  auto a = read_idx_images(path("one"));
  EXPECT_EQ(a.magic, kIdxImageMagic);
  EXPECT_EQ(a.dims, (std::vector<std::uint32_t>{1, 1, 1}));
  ASSERT_EQ(a.data.size(), 1u);
  EXPECT_EQ(a.data[0], 255);
  Matrix m = idx_to_matrix(a);
  EXPECT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), 255.0);
}

TEST_F(Idx, LabelMagicOnImagePath)
{
  write_bytes(path("labels"), {0, 0, 8, 1, 0, 0, 0, 2, 3, 7});
  EXPECT_THROW(read_idx_images(path("labels")), FormatError);
  auto l = read_idx_labels(path("labels"));
  EXPECT_EQ(l.data, (std::vector<std::uint8_t>{3, 7}));
}

TEST_F(Idx, TruncatedAndGarbageFiles)
{
  write_bytes(path("short_header"), {0, 0, 8, 3, 0, 0});
  EXPECT_THROW(read_idx(path("short_header")), FormatError);
  write_bytes(path("short_payload"), {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 1, 2});
  EXPECT_THROW(read_idx(path("short_payload")), FormatError);
  write_bytes(path("garbage"), {'h', 'e', 'l', 'l', 'o', '!', '!', '!'});
  EXPECT_THROW(read_idx(path("garbage")), FormatError);
  EXPECT_THROW(read_idx(path("missing")), Error);
}

TEST_F(Idx, WriteReadRoundTrip)
{
  IdxArray a;
  a.magic = kIdxImageMagic;
  a.dims = {3, 2, 4};
  a.data.resize(24);
  std::iota(a.data.begin(), a.data.end(), std::uint8_t{10});
  write_idx(path("rt"), a);
  auto b = read_idx_images(path("rt"));
  EXPECT_EQ(b.dims, a.dims);
  EXPECT_EQ(b.data, a.data);
  // Big-endian header as laid out by the format.
  auto bytes = read_bytes(path("rt"));
  ASSERT_EQ(bytes.size(), 16u + 24u);
  EXPECT_EQ(bytes[3], 3);
  EXPECT_EQ(bytes[7], 3);
  EXPECT_EQ(bytes[15], 4);

  a.dims = {3, 2, 5};
  EXPECT_THROW(write_idx(path("bad"), a), ShapeError);
}

// Independent byte-level parse of the first image of the official training file.
TEST(IdxOfficial, FirstImageChecksum)
{
  const auto file = fs::path(resolve_data_dir(std::nullopt)) / "train-images-idx3-ubyte";
  if (!fs::exists(file))
    GTEST_SKIP() << "official training images not present in " << file.parent_path();

  std::ifstream in(file, std::ios::binary);
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), 16);
  auto be32 = [&](int off) {
    return (std::uint32_t{header[off]} << 24) | (std::uint32_t{header[off + 1]} << 16) |
           (std::uint32_t{header[off + 2]} << 8) | std::uint32_t{header[off + 3]};
  };
  ASSERT_EQ(be32(0), 2051u);
  std::vector<unsigned char> first(784);
  in.read(reinterpret_cast<char*>(first.data()), 784);
  const long reference = std::accumulate(first.begin(), first.end(), 0L);

  auto a = read_idx_images(file.string());
  EXPECT_EQ(a.dims, (std::vector<std::uint32_t>{60000, 28, 28}));
  const long sum = std::accumulate(a.data.begin(), a.data.begin() + 784, 0L);
  EXPECT_EQ(sum, reference);
}

// ---------------------------------------------------------------------------
// Image transforms

TEST(Binarize, ZeroAndSaturatedPixels)
{
  Matrix zero = Matrix::Zero(3, 10);
  EXPECT_EQ(binarize_stochastic(zero, 1).sum(), 0.0);
  EXPECT_EQ(binarize_threshold(zero, 128.0).sum(), 0.0);
  Matrix full = Matrix::Constant(3, 10, 255.0);
  EXPECT_EQ(binarize_stochastic(full, 1).sum(), 30.0);
  Matrix bad = Matrix::Constant(1, 1, 300.0);
  EXPECT_THROW(binarize_stochastic(bad, 1), DomainError);
}

TEST(Binarize, StochasticMatchesIntensityMean)
{
  // A corpus whose mean intensity is 0.13: most pixels dark, some bright.
  Rng rng(5);
  Matrix images(1000, 196);
  for (Eigen::Index i = 0; i < images.size(); ++i)
    images.data()[i] = rng.uniform() < 0.15 ? std::round(rng.uniform(170.0, 255.0)) : 0.0;
  const double intensity = images.mean() / 255.0;
  ASSERT_NEAR(intensity, 0.13, 0.01);
  Matrix b = binarize_stochastic(images, 9);
  EXPECT_NEAR(b.mean(), intensity, 0.005);
  EXPECT_EQ(binarize_stochastic(images, 9), b);
}

TEST(Downsample, ConstantAndBlock)
{
  Matrix c = Matrix::Constant(2, 16, 7.5);
  Matrix d = downsample(c, 4, 4, 2);
  ASSERT_EQ(d.cols(), 4);
  EXPECT_TRUE((d.array() == 7.5).all());

  Matrix block(1, 4);
  block << 0, 0, 0, 4;
  EXPECT_EQ(downsample(block, 2, 2, 2)(0, 0), 1.0);
  EXPECT_THROW(downsample(c, 4, 4, 3), ShapeError);
  EXPECT_THROW(downsample(c, 2, 4, 2), ShapeError);
}

TEST(Downsample, MatchesNaiveLoop)
{
  Rng rng(6);
  const int h = 28, w = 28, f = 2;
  Matrix images(3, h * w);
  for (Eigen::Index i = 0; i < images.size(); ++i)
    images.data()[i] = std::floor(rng.uniform(0.0, 256.0));
  Matrix d = downsample(images, h, w, f);
  for (int r = 0; r < 3; ++r)
    for (int by = 0; by < h / f; ++by)
      for (int bx = 0; bx < w / f; ++bx) {
        double s = 0.0;
        for (int dy = 0; dy < f; ++dy)
          for (int dx = 0; dx < f; ++dx)
            s += images(r, (by * f + dy) * w + bx * f + dx);
        EXPECT_NEAR(d(r, by * (w / f) + bx), s / (f * f), 1e-12);
      }
}

// ---------------------------------------------------------------------------
// Synthetic sets

TEST(Categorical, UniformSingleBinaryPosition)
{
  const std::size_t n = 100000;
  auto d = synth_categorical_grid(categorical_pattern("uniform", 1, 2), n, 3);
  d.validate();
  const double freq = d.samples.col(0).mean();
  EXPECT_LE(std::abs(freq - 0.5), 3.0 * std::sqrt(0.25 / n));
}

TEST(Categorical, TwoModeOnlyProducesItsOutcomes)
{
  auto t = categorical_pattern("two-mode", 3, 4);
  auto d = synth_categorical_grid(t, 5000, 4);
  std::set<double> seen(d.labels.begin(), d.labels.end());
  EXPECT_EQ(seen, (std::set<double>{0.0, 63.0}));
}

TEST(Categorical, PatternsAreDistributions)
{
  for (const char* name : {"uniform", "two-mode", "checker", "skewed"}) {
    auto t = categorical_pattern(name, 3, 3);
    EXPECT_NEAR(std::accumulate(t.probabilities.begin(), t.probabilities.end(), 0.0), 1.0,
                1e-12)
        << name;
    for (double p : t.probabilities)
      EXPECT_GE(p, 0.0);
  }
  auto checker = categorical_pattern("checker", 4, 3);
  EXPECT_EQ(std::count_if(checker.probabilities.begin(), checker.probabilities.end(),
                          [](double p) { return p > 0.0; }),
            3);
  EXPECT_THROW(categorical_pattern("zigzag", 2, 2), ConfigError);
}

TEST(Categorical, LabelsIndexTheirOneHotRows)
{
  auto t = categorical_pattern("skewed", 2, 3);
  auto d = synth_categorical_grid(t, 200, 5);
  auto space = make_space(categorical_outcomes(2, 3), Prior{PriorKind::Uniform01, 1}, 4);
  for (Eigen::Index i = 0; i < d.samples.rows(); ++i)
    EXPECT_EQ(static_cast<double>(outcome_index(space, d.samples.row(i))), d.labels[i]);
}

TEST(Ring, SingleCentredModeIsStandardNormal)
{
  const std::size_t n = 200000;
  auto d = synth_gaussian_ring(1, 0.0, 1.0, n, 6);
  Eigen::RowVectorXd mean = d.samples.colwise().mean();
  Matrix centred = d.samples.rowwise() - mean;
  Matrix cov = centred.transpose() * centred / static_cast<double>(n - 1);
  // Standard errors are about 1/sqrt(n) for the mean and sqrt(2/n) for variances.
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(mean(0), 0.0, 4.0 * se);
  EXPECT_NEAR(mean(1), 0.0, 4.0 * se);
  EXPECT_NEAR(cov(0, 0), 1.0, 4.0 * std::sqrt(2.0) * se);
  EXPECT_NEAR(cov(1, 1), 1.0, 4.0 * std::sqrt(2.0) * se);
  EXPECT_NEAR(cov(0, 1), 0.0, 4.0 * se);
}

TEST(Ring, TightModesHugTheCircle)
{
  auto d = synth_gaussian_ring(8, 2.0, 0.01, 5000, 7);
  for (Eigen::Index i = 0; i < d.samples.rows(); ++i)
    EXPECT_NEAR(d.samples.row(i).norm(), 2.0, 0.1);
}

TEST(Ring, LabelsPartitionTheSample)
{
  auto d = synth_gaussian_ring(8, 2.0, 0.05, 4000, 8);
  auto modes = ring_modes(8, 2.0, 0.05);
  ASSERT_EQ(d.labels.size(), 4000u);
  std::vector<int> counts(8, 0);
  for (Eigen::Index i = 0; i < d.samples.rows(); ++i) {
    const auto m = static_cast<Eigen::Index>(d.labels[i]);
    ASSERT_GE(m, 0);
    ASSERT_LT(m, 8);
    ++counts[m];
    EXPECT_LT((d.samples.row(i) - modes.centers.row(m)).norm(), 0.5);
  }
  for (int c : counts)
    EXPECT_GT(c, 0);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), 0), 4000);
}

TEST(Blobs, LabelsAreOneHotAndClassesSeparate)
{
  auto b = synth_blobs(400, 4.0, 9);
  ASSERT_EQ(b.x.rows(), 400);
  ASSERT_EQ(b.y.cols(), 2);
  EXPECT_TRUE(((b.y.rowwise().sum()).array() == 1.0).all());
  Eigen::RowVectorXd m0 = Eigen::RowVectorXd::Zero(2), m1 = Eigen::RowVectorXd::Zero(2);
  double n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < b.x.rows(); ++i) {
    if (b.y(i, 0) == 1.0) {
      m0 += b.x.row(i);
      ++n0;
    } else {
      m1 += b.x.row(i);
      ++n1;
    }
  }
  EXPECT_GT(n0, 100);
  EXPECT_GT(n1, 100);
  EXPECT_NEAR((m0 / n0 - m1 / n1).norm(), 4.0, 0.5);
}

// ---------------------------------------------------------------------------
// Files

using Files = TempDir;

TEST_F(Files, DatasetRoundTrip)
{
  auto d = synth_categorical_grid(categorical_pattern("checker", 3, 2), 50, 10);
  write_dataset(path("grid.ckpt"), d);
  auto r = read_dataset(path("grid.ckpt"));
  EXPECT_EQ(r.kind, d.kind);
  EXPECT_EQ(r.shape, d.shape);
  EXPECT_EQ(r.samples, d.samples);
  EXPECT_EQ(r.labels, d.labels);

  auto ring = synth_gaussian_ring(4, 1.0, 0.3, 20, 11);
  write_dataset(path("ring.ckpt"), ring);
  EXPECT_EQ(read_dataset(path("ring.ckpt")).samples, ring.samples);

  write_bytes(path("junk.ckpt"), {'[', '1', ']'});
  EXPECT_THROW(read_dataset(path("junk.ckpt")), FormatError);
}

TEST_F(Files, ValidateRejectsInconsistentData)
{
  Dataset d;
  d.kind = ObservationKind::Binary;
  d.samples = Matrix::Constant(2, 2, 0.5);
  EXPECT_THROW(d.validate(), DomainError);
  d.kind = ObservationKind::Real;
  d.samples(0, 0) = std::nan("");
  EXPECT_THROW(d.validate(), NonFiniteError);
}

TEST_F(Files, PgmGridLayout)
{
  Matrix tiles(3, 4);
  tiles << 0, 1, 1, 0, //
      1, 1, 1, 1,      //
      0.5, 0, 0, 0;
  write_pgm_grid(path("g.pgm"), tiles, 2, 2, 2);
  auto bytes = read_bytes(path("g.pgm"));
  // Two columns and two rows of 2x2 tiles, with 2-pixel gutters all round: 10x10.
  const std::string header = "P5\n10 10\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 100);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + header.size()), header);
  auto px = [&](int y, int x) { return bytes[header.size() + y * 10 + x]; };
  EXPECT_EQ(px(0, 0), 255);
  EXPECT_EQ(px(2, 2), 0);
  EXPECT_EQ(px(2, 3), 255);
  EXPECT_EQ(px(6, 2), 128);
  EXPECT_THROW(write_pgm_grid(path("bad.pgm"), tiles, 3, 2, 2), ShapeError);
}

TEST_F(Files, MnistLoaderDownsamplesAndBinarizes)
{
  IdxArray a;
  a.magic = kIdxImageMagic;
  a.dims = {5, 4, 4};
  a.data.assign(80, 0);
  for (std::size_t i = 16; i < 32; ++i)
    a.data[i] = 255;
  write_idx(path("mnist-subset-images-idx3-ubyte"), a);
  MnistOptions opt;
  opt.limit = 3;
  auto d = load_binarized_mnist(dir_.string(), opt);
  EXPECT_EQ(d.kind, ObservationKind::Binary);
  EXPECT_EQ(d.shape, (std::vector<std::uint64_t>{2, 2}));
  ASSERT_EQ(d.samples.rows(), 3);
  EXPECT_EQ(d.samples.row(0).sum(), 0.0);
  EXPECT_EQ(d.samples.row(1).sum(), 4.0);
  EXPECT_THROW(load_binarized_mnist(path("nowhere"), opt), Error);
}

} // namespace
} // namespace bgan
