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

#ifndef BGAN_RANDOM_HPP
#define BGAN_RANDOM_HPP

#include <cstdint>
#include <random>

namespace bgan {

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so uniform and
/// normal variates are derived directly from mt19937_64 output to keep runs
/// bit-reproducible across standard libraries.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via the Marsaglia polar method.
  double normal();
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  // Independent child stream; deterministic in the parent's state.
  Rng split() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace bgan

#endif // BGAN_RANDOM_HPP
