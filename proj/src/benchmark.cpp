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

#include "bgan/benchmark.hpp"

#include <cmath>

namespace bgan {

namespace {

// A freshly initialized pair is nearly flat: every conditional is close to
// Bernoulli(0.5) whatever z is, and F stays within a fraction of a nat. The
// gains push both into the regime of a partly trained model, with sharp
// latent-dependent conditionals and weights spanning several nats.
constexpr double kGeneratorGain = 8.0;
constexpr double kStatisticGain = 4.0;

void scale_output_layer(const std::vector<Tensor>& params, double gain)
{
  // parameters() lists weight then bias per layer, output layer last
  for (std::size_t i = params.size() - 2; i < params.size(); ++i) {
    Tensor t = params[i];
    for (double& v : t.mutable_values())
      v *= gain;
  }
}

} // namespace

FourBitBenchmark make_four_bit_benchmark(std::uint64_t seed)
{
  FourBitBenchmark b;
  const Prior prior{PriorKind::Uniform01, 1};
  b.generator = Generator(prior, ConditionalFamily::bernoulli(4), {8}, Activation::Tanh,
                          seed);
  b.statistic = StatisticNetwork(4, {8}, Activation::Tanh, seed + 1);
  b.space = make_space(binary_outcomes(4), prior);
  scale_output_layer(b.generator.parameters(), kGeneratorGain);
  scale_output_layer(b.statistic.parameters(), kStatisticGain);
  b.F = b.statistic.evaluate(b.space.outcomes);
  return b;
}

std::vector<double> sampled_gradient(Estimator estimator, const FourBitBenchmark& bench,
                                     std::size_t n, std::size_t m, Rng& rng,
                                     double baseline)
{
  auto sample = draw_generator_sample(bench.generator, bench.statistic, n, m, rng);
  BaselineState state{baseline, 0.9};
  return flatten_grads(estimator_gradient(estimator, bench.generator, sample, state));
}

std::vector<double> oracle_gradient(Estimator estimator, const FourBitBenchmark& bench)
{
  switch (estimator) {
  case Estimator::Alpha:
    return flatten_grads(exact_conditional_kl_gradient(bench.generator, bench.space, bench.F));
  case Estimator::Beta:
    return flatten_grads(exact_marginal_kl_gradient(bench.generator, bench.space, bench.F));
  case Estimator::Reinforce:
    return flatten_grads(exact_reverse_kl_gradient(bench.generator, bench.space, bench.F));
  }
  return {};
}

double exact_log_beta(const FourBitBenchmark& bench)
{
  return std::log(exact_partition_beta(exact_marginal(bench.generator, bench.space), bench.F));
}

} // namespace bgan
