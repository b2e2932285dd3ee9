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

#ifndef BGAN_BENCHMARK_HPP
#define BGAN_BENCHMARK_HPP

#include <cstdint>
#include <vector>

#include "bgan/discrete.hpp"
#include "bgan/oracle.hpp"

namespace bgan {

// A 4-bit Bernoulli generator with a one-dimensional uniform latent and a
// fixed random statistic network, small enough to enumerate exactly.
struct FourBitBenchmark
{
  Generator generator;
  StatisticNetwork statistic;
  EnumerableSpace space;
  std::vector<double> F; // statistic value per outcome
};

FourBitBenchmark make_four_bit_benchmark(std::uint64_t seed);

// Flattened Monte-Carlo estimate from one N x M sample block. REINFORCE
// uses `baseline` without updating it.
std::vector<double> sampled_gradient(Estimator estimator, const FourBitBenchmark& bench,
                                     std::size_t n, std::size_t m, Rng& rng,
                                     double baseline = 0.0);

// The exact target each estimator approaches: conditional KL for alpha,
// marginal KL for beta, reversed KL for REINFORCE.
std::vector<double> oracle_gradient(Estimator estimator, const FourBitBenchmark& bench);

double exact_log_beta(const FourBitBenchmark& bench);

} // namespace bgan

#endif // BGAN_BENCHMARK_HPP
