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

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "bgan/error.hpp"
#include "bgan/models.hpp"

namespace bgan {

namespace {

constexpr char kMagic[4] = {'B', 'G', 'A', 'N'};
// Guards against absurd sizes in corrupt files.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <class T>
void put_le(std::ostream& out, T value)
{
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const std::string& path)
{
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw FormatError(path + ": truncated checkpoint");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

} // namespace

void write_checkpoint(const std::string& path, const std::vector<NamedArray>& arrays)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    std::uint64_t count = 1;
    for (auto d : a.dims)
      count *= d;
    if (count != a.values.size())
      throw ShapeError("checkpoint array '" + a.name + "' has inconsistent dims");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.dims.size()));
    for (auto d : a.dims)
      put_le<std::uint64_t>(out, d);
    for (double v : a.values)
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out)
    throw Error("write failed for " + path);
}

std::vector<NamedArray> read_checkpoint(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError(path + ": bad checkpoint magic");
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw FormatError(path + ": unsupported checkpoint version " +
                      std::to_string(version));
  const auto count = get_le<std::uint32_t>(in, path);
  std::vector<NamedArray> arrays;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    const auto name_len = get_le<std::uint32_t>(in, path);
    if (name_len > 4096)
      throw FormatError(path + ": implausible tensor name length");
    a.name.resize(name_len);
    if (!in.read(a.name.data(), name_len))
      throw FormatError(path + ": truncated checkpoint");
    const auto rank = get_le<std::uint32_t>(in, path);
    if (rank > 16)
      throw FormatError(path + ": implausible rank");
    std::uint64_t elements = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto d = get_le<std::uint64_t>(in, path);
      if (d != 0 && elements > kMaxElements / d)
        throw FormatError(path + ": dimension overflow");
      elements *= d;
      a.dims.push_back(d);
    }
    if (elements > kMaxElements)
      throw FormatError(path + ": dimension overflow");
    a.values.resize(elements);
    for (auto& v : a.values)
      v = std::bit_cast<double>(get_le<std::uint64_t>(in, path));
    arrays.push_back(std::move(a));
  }
  return arrays;
}

std::vector<NamedArray> to_arrays(const std::string& prefix, const Mlp& net)
{
  std::vector<NamedArray> arrays;
  for (const auto& [name, t] : net.named_parameters()) {
    auto v = t.values();
    arrays.push_back({prefix + name, {t.rows(), t.cols()}, {v.begin(), v.end()}});
  }
  return arrays;
}

void load_arrays(const std::vector<NamedArray>& arrays, const std::string& prefix,
                 Mlp& net)
{
  for (auto& [name, t] : net.named_parameters()) {
    const NamedArray* found = nullptr;
    for (const auto& a : arrays)
      if (a.name == prefix + name)
        found = &a;
    if (!found)
      throw FormatError("checkpoint lacks tensor '" + prefix + name + "'");
    if (found->dims.size() != 2 || found->dims[0] != t.rows() ||
        found->dims[1] != t.cols())
      throw ShapeError("checkpoint tensor '" + prefix + name +
                       "' has the wrong shape");
    auto dst = t.mutable_values();
    std::copy(found->values.begin(), found->values.end(), dst.begin());
  }
}

} // namespace bgan
