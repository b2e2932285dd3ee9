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

// bgan: command-line front end for the training runs and experiments.
//
// Configuration precedence, lowest to highest:
//   1. built-in defaults of the subcommand
//   2. --config FILE (key = value lines, # comments)
//   3. --set key=value, in the order given
//   4. named flags (--seed, --iters, ...)
//
// Exit codes: 0 success, 1 runtime failure or failed oracle check,
// 2 invalid configuration (the message names the field).

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bgan/error.hpp"
#include "bgan/experiments.hpp"

namespace {

using bgan::ConfigMap;
using bgan::ExperimentConfig;

struct Flags
{
  std::string config_file;
  std::vector<std::string> sets;
  // flag name (without dashes) -> config key, value
  std::map<std::string, std::string> named;
};

void add_common_flags(CLI::App* cmd, Flags& flags)
{
  cmd->add_option("--config", flags.config_file, "key = value configuration file");
  cmd->add_option("--set", flags.sets, "override any configuration key (key=value)");
  const std::vector<std::pair<std::string, std::string>> named{
      {"seed", "seed"},
      {"out", "out"},
      {"data-dir", "data_dir"},
      {"divergence", "divergence"},
      {"estimator", "estimator"},
      {"iters", "iterations"},
      {"gamma-d", "gamma_d"},
      {"gamma-g", "gamma_g"},
      {"penalty", "penalty"},
      {"n-prior", "n_prior"},
      {"m-cond", "m_cond"},
      {"gen-steps-per-disc", "gen_steps_per_disc"},
  };
  for (const auto& [flag, key] : named) {
    cmd->add_option_function<std::string>(
        "--" + flag, [&flags, key = key](const std::string& v) { flags.named[key] = v; },
        "sets '" + key + "'");
  }
}

ExperimentConfig resolve(const std::string& experiment, const Flags& flags)
{
  ExperimentConfig config = ExperimentConfig::defaults_for(experiment);
  if (!flags.config_file.empty())
    config = ExperimentConfig::apply(config, ConfigMap::load(flags.config_file));
  ConfigMap overrides;
  for (const auto& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw bgan::ConfigError("--set: expected key=value, got '" + s + "'");
    overrides.set(s.substr(0, eq), s.substr(eq + 1));
  }
  config = ExperimentConfig::apply(config, overrides);
  ConfigMap named;
  for (const auto& [k, v] : flags.named)
    named.set(k, v);
  config = ExperimentConfig::apply(config, named);
  if (experiment != "oracle" && experiment != "eval")
    config.validate();
  return config;
}

void print_checks(const bgan::OracleReport& report)
{
  for (const auto& c : report.checks)
    std::printf("%-4s %-44s measured %.3e  tolerance %.1e\n", c.passed ? "pass" : "FAIL",
                c.name.c_str(), c.measured, c.tolerance);
}

int run(const std::string& experiment, const ExperimentConfig& config)
{
  using namespace bgan;
  if (experiment == "train-discrete") {
    auto r = run_train_discrete(config);
    std::printf("train-discrete: iterations %zu, final bound %.6f", r.rows.size(),
                r.final_bound);
    if (r.final_tv)
      std::printf(", final TV %.6f", *r.final_tv);
    std::printf("\n");
  } else if (experiment == "train-continuous") {
    auto r = run_train_continuous(config);
    std::printf("train-continuous: generator steps %zu, modes covered %d\n",
                config.iterations, r.final_coverage);
  } else if (experiment == "exp-overtrain") {
    for (const auto& s : run_overtrain(config)) {
      std::printf("%-8s ratio %zu:1  coverage", loss_kind_name(s.loss).c_str(), s.ratio);
      for (int c : s.final_coverage)
        std::printf(" %d", c);
      std::printf("  median %.1f\n", s.median);
    }
  } else if (experiment == "exp-variance") {
    auto rep = run_variance(config);
    for (const auto& v : rep.variance)
      std::printf("N=%-4zu M=%-4zu %-6s covariance trace %.4e\n", v.n, v.m,
                  estimator_name(v.estimator).c_str(), v.trace);
    for (const auto& c : rep.curves)
      std::printf("N=%-4zu M=%-4zu %-6s final bound %.4f  min %.4f\n", c.n, c.m,
                  estimator_name(c.estimator).c_str(), c.final_bound, c.min_bound);
  } else if (experiment == "exp-pixel-descent") {
    for (const auto& [loss, res] : run_pixel_descent(config).runs)
      std::printf("%-8s objective %.4f -> %.4f  median |F| %.4f -> %.4f\n",
                  loss_kind_name(loss).c_str(), res.losses.front(), res.losses.back(),
                  res.median_abs_statistic.front(), res.median_abs_statistic.back());
  } else if (experiment == "exp-adv-class") {
    for (const auto& r : run_adv_class(config))
      std::printf("%-13s %-4s %-9s train %.3f  test %.3f\n", r.method.c_str(),
                  r.divergence ? std::string(short_name(*r.divergence)).c_str() : "",
                  r.estimator ? estimator_name(*r.estimator).c_str() : "",
                  r.train_accuracy, r.test_accuracy);
  } else if (experiment == "oracle") {
    auto report = run_oracle(config);
    print_checks(report);
    return report.all_passed() ? 0 : 1;
  } else if (experiment == "eval") {
    for (const auto& [k, v] : run_eval(config))
      std::printf("%s = %.6g\n", k.c_str(), v);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Importance-weighted GAN training and experiments"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> help{
      {"train-discrete", "train a discrete generator (toy grid or binarized MNIST)"},
      {"train-continuous", "train a continuous generator on the Gaussian ring"},
      {"exp-variance", "alpha vs beta estimator variance and training curves"},
      {"exp-overtrain", "mode coverage under generator over-training"},
      {"exp-pixel-descent", "descend generated samples under each generator loss"},
      {"exp-adv-class", "adversarial classification against a cross-entropy baseline"},
      {"oracle", "exact-oracle invariant suite"},
      {"eval", "recompute summary metrics from a run directory (--out)"},
  };
  std::map<std::string, Flags> flags;
  for (const auto& name : bgan::experiment_names()) {
    auto* cmd = app.add_subcommand(name, help.at(name));
    add_common_flags(cmd, flags[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto* cmd : app.get_subcommands()) {
    const std::string name = cmd->get_name();
    try {
      return run(name, resolve(name, flags[name]));
    } catch (const bgan::ConfigError& e) {
      std::fprintf(stderr, "bgan %s: invalid configuration: %s\n", name.c_str(), e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "bgan %s: %s\n", name.c_str(), e.what());
      return 1;
    }
  }
  return 0;
}
