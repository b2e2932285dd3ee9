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

#include "bgan/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/Core>

#include "bgan/csv.hpp"
#include "bgan/error.hpp"
#include "bgan/oracle.hpp"

namespace bgan {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// ConfigMap

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source)
{
  ConfigMap map;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(number) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    map.set(key, trim(line.substr(eq + 1)));
  }
  return map;
}

ConfigMap ConfigMap::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  return parse(in, path);
}

void ConfigMap::set(const std::string& key, const std::string& value)
{
  entries_[key] = value;
}

const std::string& ConfigMap::get(const std::string& key) const
{
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

std::string ConfigMap::serialize() const
{
  std::string text;
  for (const auto& [k, v] : entries_)
    text += k + " = " + v + "\n";
  return text;
}

// ---------------------------------------------------------------------------
// ExperimentConfig

DatasetKind parse_dataset_kind(const std::string& name)
{
  if (name == "toy")
    return DatasetKind::Toy;
  if (name == "mnist")
    return DatasetKind::Mnist;
  if (name == "ring")
    return DatasetKind::Ring;
  if (name == "blobs")
    return DatasetKind::Blobs;
  throw ConfigError("unknown dataset '" + name + "' (expected toy|mnist|ring|blobs)");
}

std::string dataset_kind_name(DatasetKind kind)
{
  switch (kind) {
  case DatasetKind::Toy: return "toy";
  case DatasetKind::Mnist: return "mnist";
  case DatasetKind::Ring: return "ring";
  case DatasetKind::Blobs: return "blobs";
  }
  return "?";
}

const std::vector<std::string>& experiment_names()
{
  static const std::vector<std::string> names{
      "train-discrete", "train-continuous", "exp-variance", "exp-overtrain",
      "exp-pixel-descent", "exp-adv-class", "oracle", "eval"};
  return names;
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& experiment)
{
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("experiment: unknown name '" + experiment + "'");
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "train-continuous" || experiment == "exp-overtrain" ||
      experiment == "exp-pixel-descent") {
    c.dataset = DatasetKind::Ring;
    c.data_size = 20000;
    c.data_seed = 500;
    c.prior = PriorKind::StandardNormal;
    c.z_dim = 2;
    c.hidden = {64, 64};
    c.disc_hidden = {64, 64};
    c.iterations = 20000;
    c.gamma_d = 1e-3;
    c.gamma_g = 1e-4;
    c.penalty = 0.1;
    c.gen_steps_per_disc = 5;
    c.coverage_every = 1000;
  }
  if (experiment == "exp-overtrain")
    c.seeds = 5;
  if (experiment == "exp-pixel-descent") {
    c.iterations = 5000;
    c.gen_steps_per_disc = 1;
    c.losses = {GeneratorLossKind::BoundarySeeking, GeneratorLossKind::Minimax,
                GeneratorLossKind::Proxy};
  }
  if (experiment == "exp-adv-class") {
    c.dataset = DatasetKind::Blobs;
    c.data_size = 200;
    c.data_seed = 11;
    c.test_size = 2000;
    c.prior = PriorKind::StandardNormal;
    c.z_dim = 2;
    c.hidden = {};
    c.activation = Activation::Identity;
    c.disc_hidden = {16};
    c.iterations = 3000;
    c.gamma_d = 1e-3;
    c.gamma_g = 1e-2;
    c.seed = 12;
    c.batch_size = 32;
  }
  if (experiment == "exp-variance") {
    c.iterations = 1000;
  }
  return c;
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

// Typed field readers: each throws ConfigError naming `key`.
template <class T>
T parse_number(const std::string& key, const std::string& value)
{
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last)
    throw ConfigError(key + ": '" + value + "' is not a valid number");
  return out;
}

double parse_real(const std::string& key, const std::string& value)
{
  const double v = parse_number<double>(key, value);
  if (!std::isfinite(v))
    throw ConfigError(key + ": value must be finite");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value)
{
  if (value == "true" || value == "1" || value == "yes")
    return true;
  if (value == "false" || value == "0" || value == "no")
    return false;
  throw ConfigError(key + ": '" + value + "' is not a boolean");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& value)
{
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value))
    out.push_back(parse_number<std::size_t>(key, item));
  return out;
}

// Wraps enum parsers so their message names the key.
template <class F>
auto with_key(const std::string& key, F&& parse) -> decltype(parse())
{
  try {
    return parse();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(key + ":", 0) == 0)
      throw ConfigError(what);
    throw ConfigError(key + ": " + what);
  }
}

std::string prior_name(PriorKind k)
{
  return k == PriorKind::Uniform01 ? "uniform" : "normal";
}

std::string optimizer_name(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

} // namespace

ExperimentConfig ExperimentConfig::apply(ExperimentConfig c, const ConfigMap& map)
{
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_number<std::size_t>(k, v);
    };
  };
  auto u64 = [](std::uint64_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_number<std::uint64_t>(k, v);
    };
  };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = parse_real(k, v); };
  };
  auto text = [](std::string& field) -> Setter {
    return [&field](const std::string&, const std::string& v) { field = v; };
  };

  const std::map<std::string, Setter> setters{
      {"experiment",
       [&c](const std::string& k, const std::string& v) {
         if (v != c.experiment)
           throw ConfigError(k + ": config is for '" + v + "', not '" + c.experiment + "'");
       }},
      {"dataset",
       [&c](const std::string& k, const std::string& v) {
         c.dataset = with_key(k, [&] { return parse_dataset_kind(v); });
       }},
      {"pattern", text(c.pattern)},
      {"positions", size(c.positions)},
      {"classes", size(c.classes)},
      {"data_size", size(c.data_size)},
      {"data_seed", u64(c.data_seed)},
      {"data_dir", text(c.data_dir)},
      {"mnist_limit", size(c.mnist_limit)},
      {"downsample", size(c.downsample)},
      {"ring_modes", size(c.ring_modes)},
      {"ring_radius", real(c.ring_radius)},
      {"ring_sigma", real(c.ring_sigma)},
      {"blob_separation", real(c.blob_separation)},
      {"test_size", size(c.test_size)},
      {"prior",
       [&c](const std::string& k, const std::string& v) {
         c.prior = with_key(k, [&] { return parse_prior_kind(v); });
       }},
      {"z_dim", size(c.z_dim)},
      {"hidden",
       [&c](const std::string& k, const std::string& v) { c.hidden = parse_sizes(k, v); }},
      {"disc_hidden",
       [&c](const std::string& k, const std::string& v) {
         c.disc_hidden = parse_sizes(k, v);
       }},
      {"activation",
       [&c](const std::string& k, const std::string& v) {
         c.activation = with_key(k, [&] { return parse_activation(v); });
       }},
      {"divergence",
       [&c](const std::string& k, const std::string& v) {
         c.divergence = with_key(k, [&] { return parse_divergence(v); });
       }},
      {"estimator",
       [&c](const std::string& k, const std::string& v) {
         c.estimator = with_key(k, [&] { return parse_estimator(v); });
       }},
      {"loss",
       [&c](const std::string& k, const std::string& v) {
         c.loss = with_key(k, [&] { return parse_loss_kind(v); });
       }},
      {"n_prior", size(c.n_prior)},
      {"m_cond", size(c.m_conditional)},
      {"iterations", size(c.iterations)},
      {"epochs", size(c.epochs)},
      {"optimizer",
       [&c](const std::string& k, const std::string& v) {
         c.optimizer = with_key(k, [&] { return parse_optimizer_kind(v); });
       }},
      {"gamma_d", real(c.gamma_d)},
      {"gamma_g", real(c.gamma_g)},
      {"beta1", real(c.beta1)},
      {"beta2", real(c.beta2)},
      {"penalty", real(c.penalty)},
      {"penalty_side",
       [&c](const std::string& k, const std::string& v) {
         if (v == "real")
           c.penalty_side = PenaltySide::RealOnly;
         else if (v == "both")
           c.penalty_side = PenaltySide::Both;
         else
           throw ConfigError(k + ": expected real|both, got '" + v + "'");
       }},
      {"gen_steps_per_disc", size(c.gen_steps_per_disc)},
      {"batch_size", size(c.batch_size)},
      {"coverage_every", size(c.coverage_every)},
      {"baseline_decay", real(c.baseline_decay)},
      {"record_timing",
       [&c](const std::string& k, const std::string& v) { c.record_timing = parse_bool(k, v); }},
      {"seed", u64(c.seed)},
      {"seeds", size(c.seeds)},
      {"losses",
       [&c](const std::string& k, const std::string& v) {
         c.losses.clear();
         for (const auto& item : split_list(v))
           c.losses.push_back(with_key(k, [&] { return parse_loss_kind(item); }));
       }},
      {"ratios",
       [&c](const std::string& k, const std::string& v) { c.ratios = parse_sizes(k, v); }},
      {"bench_seed", u64(c.bench_seed)},
      {"variance_trials", size(c.variance_trials)},
      {"finetune_steps", size(c.finetune_steps)},
      {"pixel_steps", size(c.pixel_steps)},
      {"pixel_step_size", real(c.pixel_step_size)},
      {"pixel_samples", size(c.pixel_samples)},
      {"only_divergence",
       [&c](const std::string& k, const std::string& v) {
         if (v.empty() || v == "all")
           c.only_divergence.reset();
         else
           c.only_divergence = with_key(k, [&] { return parse_divergence(v); });
       }},
      {"grid_samples", size(c.grid_samples)},
      {"grid_columns", size(c.grid_columns)},
      {"out", text(c.out)},
  };

  for (const auto& [key, value] : map.entries()) {
    auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError(key + ": unknown configuration key");
    it->second(key, value);
  }
  return c;
}

ConfigMap ExperimentConfig::to_map() const
{
  ConfigMap m;
  auto num = [](double v) { return format_double(v); };
  m.set("experiment", experiment);
  m.set("dataset", dataset_kind_name(dataset));
  m.set("pattern", pattern);
  m.set("positions", std::to_string(positions));
  m.set("classes", std::to_string(classes));
  m.set("data_size", std::to_string(data_size));
  m.set("data_seed", std::to_string(data_seed));
  m.set("data_dir", data_dir);
  m.set("mnist_limit", std::to_string(mnist_limit));
  m.set("downsample", std::to_string(downsample));
  m.set("ring_modes", std::to_string(ring_modes));
  m.set("ring_radius", num(ring_radius));
  m.set("ring_sigma", num(ring_sigma));
  m.set("blob_separation", num(blob_separation));
  m.set("test_size", std::to_string(test_size));
  m.set("prior", prior_name(prior));
  m.set("z_dim", std::to_string(z_dim));
  m.set("hidden", join_sizes(hidden));
  m.set("disc_hidden", join_sizes(disc_hidden));
  m.set("activation", activation_name(activation));
  m.set("divergence", std::string(short_name(divergence)));
  m.set("estimator", estimator_name(estimator));
  m.set("loss", loss_kind_name(loss));
  m.set("n_prior", std::to_string(n_prior));
  m.set("m_cond", std::to_string(m_conditional));
  m.set("iterations", std::to_string(iterations));
  m.set("epochs", std::to_string(epochs));
  m.set("optimizer", optimizer_name(optimizer));
  m.set("gamma_d", num(gamma_d));
  m.set("gamma_g", num(gamma_g));
  m.set("beta1", num(beta1));
  m.set("beta2", num(beta2));
  m.set("penalty", num(penalty));
  m.set("penalty_side", penalty_side == PenaltySide::Both ? "both" : "real");
  m.set("gen_steps_per_disc", std::to_string(gen_steps_per_disc));
  m.set("batch_size", std::to_string(batch_size));
  m.set("coverage_every", std::to_string(coverage_every));
  m.set("baseline_decay", num(baseline_decay));
  m.set("record_timing", record_timing ? "true" : "false");
  m.set("seed", std::to_string(seed));
  m.set("seeds", std::to_string(seeds));
  std::string ls;
  for (std::size_t i = 0; i < losses.size(); ++i)
    ls += (i ? "," : "") + loss_kind_name(losses[i]);
  m.set("losses", ls);
  m.set("ratios", join_sizes(ratios));
  m.set("bench_seed", std::to_string(bench_seed));
  m.set("variance_trials", std::to_string(variance_trials));
  m.set("finetune_steps", std::to_string(finetune_steps));
  m.set("pixel_steps", std::to_string(pixel_steps));
  m.set("pixel_step_size", num(pixel_step_size));
  m.set("pixel_samples", std::to_string(pixel_samples));
  m.set("only_divergence",
        only_divergence ? std::string(short_name(*only_divergence)) : std::string("all"));
  m.set("grid_samples", std::to_string(grid_samples));
  m.set("grid_columns", std::to_string(grid_columns));
  m.set("out", out);
  return m;
}

void ExperimentConfig::validate() const
{
  auto require = [](bool ok, const char* field, const std::string& why) {
    if (!ok)
      throw ConfigError(std::string(field) + ": " + why);
  };
  require(n_prior >= 1, "n_prior", "must be at least 1");
  require(m_conditional >= 1, "m_cond", "must be at least 1");
  require(gamma_d >= 0.0, "gamma_d", "must be non-negative");
  require(gamma_g >= 0.0, "gamma_g", "must be non-negative");
  require(penalty >= 0.0, "penalty", "must be non-negative");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1", "must lie in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2", "must lie in [0, 1)");
  require(baseline_decay >= 0.0 && baseline_decay < 1.0, "baseline_decay",
          "must lie in [0, 1)");
  require(gen_steps_per_disc >= 1, "gen_steps_per_disc", "must be at least 1");
  require(batch_size >= 1, "batch_size", "must be at least 1");
  require(z_dim >= 1, "z_dim", "must be at least 1");
  require(positions >= 1, "positions", "must be at least 1");
  require(classes >= 2, "classes", "must be at least 2");
  require(data_size >= 1, "data_size", "must be at least 1");
  require(seeds >= 1, "seeds", "must be at least 1");
  require(!losses.empty(), "losses", "must name at least one loss");
  require(!ratios.empty(), "ratios", "must list at least one ratio");
  for (std::size_t r : ratios)
    require(r >= 1, "ratios", "every ratio must be at least 1");
  require(ring_modes >= 1, "ring_modes", "must be at least 1");
  require(ring_sigma > 0.0, "ring_sigma", "must be positive");
  require(downsample >= 1, "downsample", "must be at least 1");
  require(grid_columns >= 1, "grid_columns", "must be at least 1");
  require(pixel_step_size >= 0.0, "pixel_step_size", "must be non-negative");
  require(variance_trials >= 2, "variance_trials", "must be at least 2");
  for (std::size_t h : hidden)
    require(h >= 1, "hidden", "layer widths must be positive");
  for (std::size_t h : disc_hidden)
    require(h >= 1, "disc_hidden", "layer widths must be positive");
  if (experiment == "train-discrete" || experiment == "exp-variance")
    require(dataset == DatasetKind::Toy || dataset == DatasetKind::Mnist, "dataset",
            "discrete training needs toy or mnist");
  if (experiment == "train-continuous" || experiment == "exp-overtrain" ||
      experiment == "exp-pixel-descent")
    require(dataset == DatasetKind::Ring || dataset == DatasetKind::Mnist, "dataset",
            "continuous training needs ring or mnist");
  if (experiment == "exp-overtrain")
    require(dataset == DatasetKind::Ring, "dataset", "coverage needs the ring");
  if (experiment == "exp-adv-class")
    require(dataset == DatasetKind::Blobs, "dataset", "classification needs blobs");
  if (dataset == DatasetKind::Toy)
    with_key("pattern", [&] { return categorical_pattern(pattern, positions, classes); });
}

TrainConfig ExperimentConfig::train_config() const
{
  TrainConfig t;
  t.n_prior = n_prior;
  t.m_conditional = m_conditional;
  t.disc_optimizer = {optimizer, gamma_d, beta1, beta2, 1e-8};
  t.gen_optimizer = {optimizer, gamma_g, beta1, beta2, 1e-8};
  t.divergence = divergence;
  t.penalty_coefficient = penalty;
  t.estimator = estimator;
  t.iterations = iterations;
  t.baseline_decay = baseline_decay;
  t.seed = seed;
  t.record_timing = record_timing;
  return t;
}

ContinuousConfig ExperimentConfig::continuous_config() const
{
  ContinuousConfig c;
  c.divergence = divergence;
  c.loss = loss;
  c.batch_size = batch_size;
  c.generator_steps = iterations;
  c.gen_steps_per_disc = gen_steps_per_disc;
  c.disc_optimizer = {optimizer, gamma_d, beta1, beta2, 1e-8};
  c.gen_optimizer = {optimizer, gamma_g, beta1, beta2, 1e-8};
  c.penalty_coefficient = penalty;
  c.penalty_side = penalty_side;
  c.coverage_every = coverage_every;
  c.seed = seed;
  c.record_timing = record_timing;
  return c;
}

std::size_t ExperimentConfig::effective_iterations(std::size_t dataset_rows) const
{
  if (epochs == 0)
    return iterations;
  return epochs * ((dataset_rows + n_prior - 1) / n_prior);
}

// ---------------------------------------------------------------------------
// Shared helpers

double median(std::vector<double> values)
{
  if (values.empty())
    throw ShapeError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool OracleReport::all_passed() const
{
  return std::all_of(checks.begin(), checks.end(),
                     [](const OracleCheck& c) { return c.passed; });
}

namespace {

// Artifact directory: config snapshot and environment record are written
// up front so a failed run still documents what it tried.
class RunDir
{
public:
  explicit RunDir(const ExperimentConfig& config) : enabled_(!config.out.empty())
  {
    if (!enabled_)
      return;
    root_ = config.out;
    fs::create_directories(root_);
    std::ofstream(root_ / "config.txt", std::ios::binary) << config.to_map().serialize();
    std::ofstream env(root_ / "env.txt", std::ios::binary);
    env << "program = bgan 0.1.0\n"
        << "compiler = " << __VERSION__ << "\n"
        << "cxx_standard = " << __cplusplus << "\n"
#ifdef NDEBUG
        << "build = release\n"
#else
        << "build = debug\n"
#endif
        << "eigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
        << EIGEN_MINOR_VERSION << "\n"
        << "threads = 1\n"
        << "seed = " << config.seed << "\n"
        << "data_seed = " << config.data_seed << "\n"
        << "dataset = " << dataset_kind_name(config.dataset) << "\n";
    if (config.dataset == DatasetKind::Mnist)
      env << "data_dir = " << resolve_data_dir(optional_dir(config)) << "\n";
  }

  bool enabled() const { return enabled_; }
  std::string path(const std::string& name) const { return (root_ / name).string(); }

  static std::optional<std::string> optional_dir(const ExperimentConfig& c)
  {
    return c.data_dir.empty() ? std::nullopt : std::optional<std::string>(c.data_dir);
  }

private:
  bool enabled_;
  fs::path root_;
};

Generator make_discrete_generator(const ExperimentConfig& c, const Dataset& data)
{
  const ConditionalFamily family =
      data.kind == ObservationKind::OneHot
          ? ConditionalFamily::categorical(data.shape.at(0), data.shape.at(1))
          : ConditionalFamily::bernoulli(static_cast<std::size_t>(data.samples.cols()));
  return Generator(Prior{c.prior, c.z_dim}, family, c.hidden, c.activation, c.seed);
}

Generator make_continuous_generator(const ExperimentConfig& c, std::size_t dim)
{
  return Generator(Prior{c.prior, c.z_dim}, ConditionalFamily::deterministic(dim), c.hidden,
                   c.activation, c.seed);
}

StatisticNetwork make_statistic(const ExperimentConfig& c, std::size_t input_dim)
{
  return StatisticNetwork(input_dim, c.disc_hidden, c.activation == Activation::Identity
                                                        ? Activation::Relu
                                                        : c.activation,
                          c.seed + 1000);
}

double tail_mean_bound(const std::vector<DiscreteMetrics>& rows)
{
  if (rows.empty())
    return 0.0;
  const std::size_t start = rows.size() - std::max<std::size_t>(1, rows.size() / 10);
  double s = 0.0;
  for (std::size_t i = start; i < rows.size(); ++i)
    s += rows[i].bound_estimate;
  return s / static_cast<double>(rows.size() - start);
}

std::optional<double> exact_tv(const ExperimentConfig& c, const Generator& gen)
{
  if (c.dataset != DatasetKind::Toy)
    return std::nullopt;
  auto target = categorical_pattern(c.pattern, c.positions, c.classes);
  try {
    auto space = make_space(categorical_outcomes(c.positions, c.classes), gen.prior(),
                            c.z_dim == 1 ? kDefaultQuadratureNodes : 4);
    return total_variation(exact_marginal(gen, space), target.probabilities);
  } catch (const BudgetError&) {
    return std::nullopt;
  }
}

void write_checkpoint_pair(const std::string& path, const Generator& gen,
                           const StatisticNetwork& net)
{
  auto arrays = to_arrays("generator.", gen.network());
  auto more = to_arrays("statistic.", net.network());
  arrays.insert(arrays.end(), more.begin(), more.end());
  write_checkpoint(path, arrays);
}

void write_summary(const std::string& path, const std::map<std::string, double>& values)
{
  CsvWriter csv(path, {"metric", "value"});
  for (const auto& [k, v] : values)
    csv.cell(k).cell(v).end_row();
}

// Centres (Bernoulli) or class probabilities (categorical) of a fixed set of
// latent draws, one tile per draw.
void write_center_grid(const std::string& path, const ExperimentConfig& c,
                       const Generator& gen, const Dataset& data)
{
  Rng rng(c.seed + 7);
  Matrix z = sample_prior(gen.prior(), c.grid_samples, rng);
  NoGradGuard guard;
  Matrix tiles = to_matrix(gen.parameters_for(z));
  std::size_t h = 1, w = static_cast<std::size_t>(tiles.cols());
  if (data.shape.size() == 2) {
    h = data.shape[0];
    w = data.shape[1];
  }
  write_pgm_grid(path, tiles, h, w, c.grid_columns);
}

void write_points(const std::string& path, const Matrix& x)
{
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    header.push_back("x" + std::to_string(j));
  CsvWriter csv(path, header);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      csv.cell(x(i, j));
    csv.end_row();
  }
}

// Grid for image-shaped data, point list otherwise.
void write_samples(const RunDir& dir, const std::string& stem, const ExperimentConfig& c,
                   const Dataset& data, const Matrix& x)
{
  if (data.shape.size() == 2 && c.dataset == DatasetKind::Mnist) {
    Matrix tiles = x.topRows(std::min<Eigen::Index>(x.rows(), c.grid_samples))
                       .cwiseMax(0.0)
                       .cwiseMin(1.0);
    write_pgm_grid(dir.path(stem + ".pgm"), tiles, data.shape[0], data.shape[1],
                   c.grid_columns);
  } else {
    write_points(dir.path(stem + ".csv"), x);
  }
}

Matrix generate(const Generator& gen, std::size_t n, Rng& rng)
{
  Matrix z = sample_prior(gen.prior(), n, rng);
  NoGradGuard guard;
  return to_matrix(gen.parameters_for(z));
}

Matrix generate(const Generator& gen, std::size_t n, std::uint64_t seed)
{
  Rng rng(seed);
  return generate(gen, n, rng);
}

} // namespace

// ---------------------------------------------------------------------------
// Runs

Dataset load_experiment_data(const ExperimentConfig& c)
{
  switch (c.dataset) {
  case DatasetKind::Toy:
    return synth_categorical_grid(categorical_pattern(c.pattern, c.positions, c.classes),
                                  c.data_size, c.data_seed);
  case DatasetKind::Mnist: {
    MnistOptions opt;
    opt.limit = c.mnist_limit;
    opt.downsample_factor = c.downsample;
    opt.binarize_seed = c.data_seed;
    return load_binarized_mnist(resolve_data_dir(RunDir::optional_dir(c)), opt);
  }
  case DatasetKind::Ring:
    return synth_gaussian_ring(c.ring_modes, c.ring_radius, c.ring_sigma, c.data_size,
                               c.data_seed);
  case DatasetKind::Blobs: {
    auto b = synth_blobs(c.data_size, c.blob_separation, c.data_seed);
    Dataset d;
    d.kind = ObservationKind::Real;
    d.shape = {2};
    d.samples = b.x;
    for (Eigen::Index i = 0; i < b.y.rows(); ++i)
      d.labels.push_back(b.y(i, 1));
    return d;
  }
  }
  throw ConfigError("dataset: unsupported");
}

DiscreteRunResult run_train_discrete(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  DiscreteRunResult r;
  r.data = load_experiment_data(config);
  r.generator = make_discrete_generator(config, r.data);
  r.statistic = make_statistic(config, static_cast<std::size_t>(r.data.samples.cols()));

  TrainConfig t = config.train_config();
  t.iterations = config.effective_iterations(static_cast<std::size_t>(r.data.samples.rows()));
  r.rows = train_discrete(t, r.generator, r.statistic, r.data.samples);
  r.final_bound = tail_mean_bound(r.rows);
  r.final_tv = exact_tv(config, r.generator);

  if (dir.enabled()) {
    write_discrete_csv(dir.path("metrics.csv"), r.rows);
    write_checkpoint_pair(dir.path("checkpoint.bin"), r.generator, r.statistic);
    write_center_grid(dir.path("samples.pgm"), config, r.generator, r.data);
    std::map<std::string, double> summary{{"final_bound", r.final_bound},
                                          {"iterations", static_cast<double>(t.iterations)}};
    if (r.final_tv)
      summary["final_tv"] = *r.final_tv;
    write_summary(dir.path("summary.csv"), summary);
  }
  return r;
}

ContinuousRunResult run_train_continuous(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  Dataset data = load_experiment_data(config);
  const auto dim = static_cast<std::size_t>(data.samples.cols());
  ContinuousRunResult r;
  r.generator = make_continuous_generator(config, dim);
  r.statistic = make_statistic(config, dim);

  std::optional<ModeSet> modes;
  if (config.dataset == DatasetKind::Ring)
    modes = ring_modes(config.ring_modes, config.ring_radius, config.ring_sigma);
  r.rows = train_continuous(config.continuous_config(), r.generator, r.statistic,
                            data.samples, modes ? &*modes : nullptr);
  if (modes)
    r.final_coverage = modes_covered(*modes, generate(r.generator, 2000, config.seed + 9));

  if (dir.enabled()) {
    write_continuous_csv(dir.path("metrics.csv"), r.rows);
    write_checkpoint_pair(dir.path("checkpoint.bin"), r.generator, r.statistic);
    write_samples(dir, "samples", config, data, generate(r.generator, 2000, config.seed + 9));
    write_summary(dir.path("summary.csv"),
                  {{"final_coverage", static_cast<double>(r.final_coverage)}});
  }
  return r;
}

std::vector<CoverageSummary> run_overtrain(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  std::optional<CsvWriter> csv;
  if (dir.enabled())
    csv.emplace(dir.path("coverage.csv"),
                std::vector<std::string>{"loss", "ratio", "seed", "iteration", "modes_covered"});

  std::vector<CoverageSummary> summaries;
  for (std::size_t ratio : config.ratios)
    for (GeneratorLossKind loss : config.losses) {
      CoverageSummary s;
      s.loss = loss;
      s.ratio = ratio;
      std::vector<double> finals;
      for (std::size_t k = 0; k < config.seeds; ++k) {
        ExperimentConfig run = config;
        run.out.clear();
        run.loss = loss;
        run.gen_steps_per_disc = ratio;
        run.seed = config.seed + k;
        run.data_seed = config.data_seed + k;
        auto result = run_train_continuous(run);
        if (csv)
          for (const auto& row : result.rows)
            if (row.modes_covered >= 0)
              csv->cell(loss_kind_name(loss))
                  .cell(ratio)
                  .cell(static_cast<std::size_t>(run.seed))
                  .cell(row.iteration)
                  .cell(row.modes_covered)
                  .end_row();
        s.final_coverage.push_back(result.final_coverage);
        finals.push_back(result.final_coverage);
      }
      s.median = median(finals);
      summaries.push_back(std::move(s));
    }

  if (dir.enabled()) {
    CsvWriter sum(dir.path("summary.csv"), {"loss", "ratio", "median_coverage"});
    for (const auto& s : summaries)
      sum.cell(loss_kind_name(s.loss)).cell(s.ratio).cell(s.median).end_row();
  }
  return summaries;
}

double gradient_covariance_trace(Estimator estimator, const FourBitBenchmark& bench,
                                 std::size_t n, std::size_t m, std::size_t trials,
                                 std::uint64_t seed)
{
  if (trials < 2)
    throw ConfigError("variance_trials: need at least 2 trials");
  Rng rng(seed);
  std::vector<std::vector<double>> draws;
  for (std::size_t t = 0; t < trials; ++t)
    draws.push_back(sampled_gradient(estimator, bench, n, m, rng));
  const std::size_t d = draws.front().size();
  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& g : draws)
      mean += g[j];
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (const auto& g : draws)
      var += (g[j] - mean) * (g[j] - mean);
    trace += var / static_cast<double>(trials - 1);
  }
  return trace;
}

VarianceReport run_variance(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  const std::vector<std::pair<std::size_t, std::size_t>> budgets{
      {64, 5}, {64, 10}, {64, 20}, {64, 100}, {640, 1}};
  VarianceReport report;

  const auto bench = make_four_bit_benchmark(config.bench_seed);
  for (const auto& [n, m] : budgets)
    for (Estimator e : {Estimator::Alpha, Estimator::Beta})
      report.variance.push_back(
          {n, m, e,
           gradient_covariance_trace(e, bench, n, m, config.variance_trials, config.seed)});

  std::optional<CsvWriter> curves;
  if (dir.enabled())
    curves.emplace(dir.path("curves.csv"),
                   std::vector<std::string>{"n", "m", "estimator", "iteration", "bound"});
  for (const auto& [n, m] : budgets)
    for (Estimator e : {Estimator::Alpha, Estimator::Beta}) {
      ExperimentConfig run = config;
      run.experiment = "train-discrete";
      run.out.clear();
      run.n_prior = n;
      run.m_conditional = m;
      run.estimator = e;
      auto result = run_train_discrete(run);
      CurveRow row{n, m, e, result.final_bound, 0.0};
      row.min_bound = INFINITY;
      for (const auto& r : result.rows) {
        row.min_bound = std::min(row.min_bound, r.bound_estimate);
        if (curves)
          curves->cell(n).cell(m).cell(estimator_name(e)).cell(r.iteration)
              .cell(r.bound_estimate).end_row();
      }
      report.curves.push_back(row);
    }

  if (dir.enabled()) {
    CsvWriter v(dir.path("variance.csv"), {"n", "m", "estimator", "covariance_trace"});
    for (const auto& r : report.variance)
      v.cell(r.n).cell(r.m).cell(estimator_name(r.estimator)).cell(r.trace).end_row();
    CsvWriter s(dir.path("summary.csv"),
                {"n", "m", "estimator", "final_bound", "min_bound"});
    for (const auto& r : report.curves)
      s.cell(r.n).cell(r.m).cell(estimator_name(r.estimator)).cell(r.final_bound)
          .cell(r.min_bound).end_row();
  }
  return report;
}

PixelDescentReport run_pixel_descent(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  Dataset data = load_experiment_data(config);
  const auto dim = static_cast<std::size_t>(data.samples.cols());

  // Stage 1: an ordinary proxy-loss GAN.
  ExperimentConfig base = config;
  base.loss = GeneratorLossKind::Proxy;
  Generator gen = make_continuous_generator(base, dim);
  StatisticNetwork net = make_statistic(base, dim);
  train_continuous(base.continuous_config(), gen, net, data.samples, nullptr);

  // Stage 2: the discriminator catches up against the frozen generator.
  const FDivergence div(config.divergence);
  auto opt = make_optimizer({config.optimizer, config.gamma_d, config.beta1, config.beta2,
                             1e-8});
  Rng rng(config.seed + 3);
  for (std::size_t s = 0; s < config.finetune_steps; ++s) {
    Matrix real(static_cast<Eigen::Index>(config.batch_size), data.samples.cols());
    for (Eigen::Index i = 0; i < real.rows(); ++i)
      real.row(i) = data.samples.row(static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(data.samples.rows()))));
    Matrix fake = generate(gen, config.batch_size, rng);
    discriminator_step(div, net, *opt, real, fake, config.penalty, kDefaultStatisticClamp,
                       config.penalty_side);
  }

  // Stage 3: descend the generated points themselves under each loss.
  const Matrix x0 = generate(gen, config.pixel_samples, config.seed + 11);
  PixelDescentReport report;
  for (GeneratorLossKind loss : config.losses)
    report.runs.emplace_back(
        loss, pixel_descent(net, x0, loss, div, config.pixel_steps, config.pixel_step_size));

  if (dir.enabled()) {
    CsvWriter csv(dir.path("pixel_descent.csv"),
                  {"loss", "step", "objective", "median_abs_statistic"});
    for (const auto& [loss, res] : report.runs)
      for (std::size_t i = 0; i < res.losses.size(); ++i)
        csv.cell(loss_kind_name(loss)).cell(i).cell(res.losses[i])
            .cell(res.median_abs_statistic[i]).end_row();
    write_samples(dir, "before", config, data, x0);
    for (const auto& [loss, res] : report.runs)
      write_samples(dir, "after_" + loss_kind_name(loss), config, data, res.final);
    write_checkpoint_pair(dir.path("checkpoint.bin"), gen, net);
  }
  return report;
}

std::vector<AccuracyRow> run_adv_class(const ExperimentConfig& config)
{
  config.validate();
  RunDir dir(config);
  const auto train = synth_blobs(config.data_size, config.blob_separation, config.data_seed);
  const auto test =
      synth_blobs(config.test_size, config.blob_separation, config.data_seed + 900);

  AdvClassConfig acfg;
  acfg.train = config.train_config();
  acfg.batch_size = config.batch_size;
  auto classifier = [&] {
    return Generator(Prior{PriorKind::StandardNormal, 2}, ConditionalFamily::categorical(1, 2),
                     config.hidden, config.activation, config.seed + 1);
  };

  std::vector<AccuracyRow> rows;
  {
    Generator base = classifier();
    train_cross_entropy(acfg, base, train.x, train.y);
    rows.push_back({"cross_entropy", std::nullopt, std::nullopt,
                    classification_accuracy(base, train.x, train.y),
                    classification_accuracy(base, test.x, test.y)});
  }
  for (Divergence d : kAllDivergences) {
    if (config.only_divergence && *config.only_divergence != d)
      continue;
    for (Estimator e : {Estimator::Alpha, Estimator::Reinforce}) {
      Generator cls = classifier();
      StatisticNetwork net(4, config.disc_hidden, Activation::Relu, config.seed + 2);
      acfg.train.divergence = d;
      acfg.train.estimator = e;
      train_adversarial_classifier(acfg, cls, net, train.x, train.y);
      rows.push_back({"bgan", d, e, classification_accuracy(cls, train.x, train.y),
                      classification_accuracy(cls, test.x, test.y)});
    }
  }

  if (dir.enabled()) {
    CsvWriter csv(dir.path("accuracy.csv"),
                  {"method", "divergence", "estimator", "train_accuracy", "test_accuracy"});
    for (const auto& r : rows)
      csv.cell(r.method)
          .cell(r.divergence ? std::string(short_name(*r.divergence)) : std::string())
          .cell(r.estimator ? estimator_name(*r.estimator) : std::string())
          .cell(r.train_accuracy)
          .cell(r.test_accuracy)
          .end_row();
  }
  return rows;
}

OracleReport run_oracle(const ExperimentConfig& config)
{
  RunDir dir(config);
  OracleReport report{run_oracle_suite(config.only_divergence, config.seed)};
  if (dir.enabled()) {
    CsvWriter csv(dir.path("report.csv"), {"check", "measured", "tolerance", "passed"});
    for (const auto& c : report.checks)
      csv.cell(c.name).cell(c.measured).cell(c.tolerance)
          .cell(std::string(c.passed ? "pass" : "FAIL")).end_row();
  }
  return report;
}

std::map<std::string, double> run_eval(const ExperimentConfig& config)
{
  if (config.out.empty())
    throw ConfigError("out: eval needs the run directory holding checkpoint.bin");
  const fs::path root(config.out);
  const auto arrays = read_checkpoint((root / "checkpoint.bin").string());

  // The run's own snapshot describes the architecture.
  const auto snapshot = ConfigMap::load((root / "config.txt").string());
  const std::string kind = snapshot.get("experiment");
  ExperimentConfig run = ExperimentConfig::apply(ExperimentConfig::defaults_for(kind), snapshot);
  run.validate();
  Dataset data = load_experiment_data(run);
  const auto dim = static_cast<std::size_t>(data.samples.cols());

  std::map<std::string, double> metrics;
  if (kind == "train-discrete") {
    Generator gen = make_discrete_generator(run, data);
    StatisticNetwork net = make_statistic(run, dim);
    load_arrays(arrays, "generator.", gen.network());
    load_arrays(arrays, "statistic.", net.network());
    if (auto tv = exact_tv(run, gen))
      metrics["tv"] = *tv;
    const auto f = net.evaluate(data.samples);
    metrics["mean_statistic_data"] =
        std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  } else if (kind == "train-continuous" || kind == "exp-pixel-descent") {
    Generator gen = make_continuous_generator(run, dim);
    StatisticNetwork net = make_statistic(run, dim);
    load_arrays(arrays, "generator.", gen.network());
    load_arrays(arrays, "statistic.", net.network());
    if (run.dataset == DatasetKind::Ring)
      metrics["modes_covered"] =
          modes_covered(ring_modes(run.ring_modes, run.ring_radius, run.ring_sigma),
                        generate(gen, 2000, run.seed + 9));
    const auto f = net.evaluate(generate(gen, 2000, run.seed + 9));
    metrics["mean_statistic_generated"] =
        std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  } else {
    throw ConfigError("experiment: eval supports train-discrete, train-continuous and "
                      "exp-pixel-descent runs, not '" + kind + "'");
  }
  write_summary((root / "eval.csv").string(), metrics);
  return metrics;
}

} // namespace bgan
