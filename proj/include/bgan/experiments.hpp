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

// Experiment registry shared by the command-line tool, the acceptance
// binary and the Python module. Every run takes an ExperimentConfig and,
// when given an output directory, leaves behind a config snapshot, an
// environment record, metrics CSVs and (where meaningful) a checkpoint and
// sample grids.
#ifndef BGAN_EXPERIMENTS_HPP
#define BGAN_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgan/benchmark.hpp"
#include "bgan/continuous.hpp"
#include "bgan/data.hpp"
#include "bgan/discrete.hpp"

namespace bgan {

// ---------------------------------------------------------------------------
// key = value configuration

/// Flat, ordered map of configuration entries. Lines are `key = value`;
/// `#` starts a comment; blank lines are ignored. Keys are case-sensitive.
class ConfigMap
{
public:
  static ConfigMap parse(std::istream& in, const std::string& source = "<config>");
  static ConfigMap load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // One `key = value` line per entry, sorted by key.
  std::string serialize() const;

private:
  std::map<std::string, std::string> entries_;
};

enum class DatasetKind
{
  Toy,   // categorical grid with a named target pattern
  Mnist, // binarized, downsampled MNIST from the data directory
  Ring,  // 2-D Gaussian ring
  Blobs  // two labelled Gaussian blobs
};

DatasetKind parse_dataset_kind(const std::string& name);
std::string dataset_kind_name(DatasetKind kind);

struct ExperimentConfig
{
  std::string experiment = "train-discrete";

  // data
  DatasetKind dataset = DatasetKind::Toy;
  std::string pattern = "skewed";
  std::size_t positions = 2;
  std::size_t classes = 2;
  std::size_t data_size = 10000;
  std::uint64_t data_seed = 100;
  std::string data_dir; // empty: BGAN_DATA_DIR, then ./data
  std::size_t mnist_limit = 10000;
  std::size_t downsample = 2;
  std::size_t ring_modes = 8;
  double ring_radius = 2.0;
  double ring_sigma = 0.05;
  double blob_separation = 4.0;
  std::size_t test_size = 2000;

  // models
  PriorKind prior = PriorKind::Uniform01;
  std::size_t z_dim = 1;
  std::vector<std::size_t> hidden{16, 16};
  Activation activation = Activation::Relu;
  std::vector<std::size_t> disc_hidden{16, 16};

  // training
  Divergence divergence = Divergence::Gan;
  Estimator estimator = Estimator::Alpha;
  GeneratorLossKind loss = GeneratorLossKind::BoundarySeeking;
  std::size_t n_prior = 64;
  std::size_t m_conditional = 20;
  std::size_t iterations = 2000;
  std::size_t epochs = 0; // > 0 overrides iterations with epochs * ceil(size / N)
  OptimizerKind optimizer = OptimizerKind::Adam;
  double gamma_d = 1e-2;
  double gamma_g = 5e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double penalty = 1.0;
  PenaltySide penalty_side = PenaltySide::RealOnly;
  std::size_t gen_steps_per_disc = 5;
  std::size_t batch_size = 64;
  std::size_t coverage_every = 1000;
  double baseline_decay = 0.9;
  bool record_timing = false;

  // experiment-specific
  std::uint64_t seed = 0;
  std::size_t seeds = 1;
  std::vector<GeneratorLossKind> losses{GeneratorLossKind::BoundarySeeking,
                                        GeneratorLossKind::Minimax,
                                        GeneratorLossKind::Proxy};
  std::vector<std::size_t> ratios{5, 1};
  std::uint64_t bench_seed = 1;
  std::size_t variance_trials = 30;
  std::size_t finetune_steps = 1000;
  std::size_t pixel_steps = 1000;
  double pixel_step_size = 1e-3;
  std::size_t pixel_samples = 256;
  std::optional<Divergence> only_divergence;
  std::size_t grid_samples = 64;
  std::size_t grid_columns = 8;

  std::string out; // empty: no artifacts

  /// Defaults for a named experiment; unknown names throw ConfigError.
  static ExperimentConfig defaults_for(const std::string& experiment);
  /// Applies every entry of `map` on top of `base`. Unknown keys and
  /// malformed values throw ConfigError naming the key.
  static ExperimentConfig apply(ExperimentConfig base, const ConfigMap& map);

  ConfigMap to_map() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;

  TrainConfig train_config() const;
  ContinuousConfig continuous_config() const;
  std::size_t effective_iterations(std::size_t dataset_rows) const;
};

/// All experiment names accepted by defaults_for.
const std::vector<std::string>& experiment_names();

// ---------------------------------------------------------------------------
// Runs

struct DiscreteRunResult
{
  std::vector<DiscreteMetrics> rows;
  double final_bound = 0.0; // mean bound over the last 10% of iterations
  std::optional<double> final_tv; // exact-oracle TV where the space is enumerable
  Generator generator;
  StatisticNetwork statistic;
  Dataset data;
};

struct ContinuousRunResult
{
  std::vector<ContinuousMetrics> rows;
  int final_coverage = -1;
  Generator generator;
  StatisticNetwork statistic;
};

struct CoverageSummary
{
  GeneratorLossKind loss = GeneratorLossKind::BoundarySeeking;
  std::size_t ratio = 1;
  std::vector<int> final_coverage; // one per seed
  double median = 0.0;
};

struct VarianceRow
{
  std::size_t n = 0;
  std::size_t m = 0;
  Estimator estimator = Estimator::Alpha;
  double trace = 0.0;
};

struct CurveRow
{
  std::size_t n = 0;
  std::size_t m = 0;
  Estimator estimator = Estimator::Alpha;
  double final_bound = 0.0;
  double min_bound = 0.0;
};

struct VarianceReport
{
  std::vector<VarianceRow> variance;
  std::vector<CurveRow> curves;
};

struct PixelDescentReport
{
  std::vector<std::pair<GeneratorLossKind, PixelDescentResult>> runs;
};

struct AccuracyRow
{
  std::string method; // "cross_entropy" or "bgan"
  std::optional<Divergence> divergence;
  std::optional<Estimator> estimator;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct OracleReport
{
  std::vector<OracleCheck> checks;
  bool all_passed() const;
};

Dataset load_experiment_data(const ExperimentConfig& config);

DiscreteRunResult run_train_discrete(const ExperimentConfig& config);
ContinuousRunResult run_train_continuous(const ExperimentConfig& config);
std::vector<CoverageSummary> run_overtrain(const ExperimentConfig& config);
VarianceReport run_variance(const ExperimentConfig& config);
PixelDescentReport run_pixel_descent(const ExperimentConfig& config);
std::vector<AccuracyRow> run_adv_class(const ExperimentConfig& config);
OracleReport run_oracle(const ExperimentConfig& config);

/// Reloads the checkpoint written by a train-discrete or train-continuous
/// run in `config.out` and recomputes its summary metrics into eval.csv.
std::map<std::string, double> run_eval(const ExperimentConfig& config);

/// Trace of the empirical covariance of a sampled gradient over `trials`
/// independent draws on the benchmark.
double gradient_covariance_trace(Estimator estimator, const FourBitBenchmark& bench,
                                 std::size_t n, std::size_t m, std::size_t trials,
                                 std::uint64_t seed);

double median(std::vector<double> values);

} // namespace bgan

#endif // BGAN_EXPERIMENTS_HPP
