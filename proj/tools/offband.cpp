// Copyright 2026 The offband Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// offband command-line driver.
//
// Exit codes: 0 success, 1 usage or config error, 2 runtime error
// (including a failed verification property).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offband/offband.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
  std::vector<std::string> algos;
  std::vector<double> alphas;
};

struct BoundsFlags {
  double num_actions = 0;
  std::uint64_t n = 0;
  double coverage = 0;
  int theorem = 1;
  std::optional<double> eta;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Base seed (overrides config base_seed)");
  cmd->add_option("--workers", f.workers, "Worker threads (default: $OFFBAND_WORKERS, then config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory (overrides config output)");
  cmd->add_option("--algo", f.algos, "Algorithm: Exp3, Exp3IX, Exp3IXPlugin, LinProd (repeatable)");
  cmd->add_option("--alpha", f.alphas, "Behavior mixing weight in [0, 1] (repeatable, overrides grid)")
      ->check(CLI::Range(0.0, 1.0));
}

offband::ExperimentConfig resolve_config(const RunFlags& f) {
  using offband::Error;
  using offband::ErrorCode;
  offband::ExperimentConfig config = offband::load_config(f.config);
  if (f.seed) config.base_seed = *f.seed;
  if (f.workers) {
    config.workers = *f.workers;
  } else if (const char* env = std::getenv("OFFBAND_WORKERS"); env != nullptr && *env != '\0') {
    try {
      std::size_t pos = 0;
      const long long w = std::stoll(env, &pos);
      if (pos != std::string(env).size() || w < 1) throw std::invalid_argument(env);
      config.workers = static_cast<std::size_t>(w);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, std::string("OFFBAND_WORKERS must be a positive integer, got '") + env + "'");
    }
  }
  if (!f.out.empty()) config.output = f.out;
  if (!f.algos.empty()) {
    config.algorithms.clear();
    for (const auto& name : f.algos) config.algorithms.push_back(offband::parse_algorithm(name));
  }
  if (!f.alphas.empty()) config.alpha_grid = f.alphas;
  config.validate();
  return config;
}

int cmd_run(const RunFlags& f, bool with_figure) {
  const offband::ExperimentConfig config = resolve_config(f);
  const offband::SweepResult result = offband::sweep(config);
  const std::filesystem::path dir(config.output);
  // Render everything before touching the output directory.
  const std::string runs = offband::runs_csv(result.records);
  const std::string aggregate = offband::aggregate_csv(result.stats);
  const std::string trajectories = offband::trajectories_csv(result.records);
  const std::string metadata = offband::metadata_json(config).dump(2) + "\n";
  const std::string figure = with_figure ? offband::render_svg(result.stats) : std::string();
  offband::write_file_atomic(dir / "runs.csv", runs);
  offband::write_file_atomic(dir / "aggregate.csv", aggregate);
  offband::write_file_atomic(dir / "trajectories.csv", trajectories);
  offband::write_file_atomic(dir / "metadata.json", metadata);
  if (with_figure) offband::write_file_atomic(dir / "figure.svg", figure);
  std::cout << "wrote " << result.records.size() << " runs to " << dir.string() << "\n";
  return kExitOk;
}

void print_bound(const offband::BoundReport& report) {
  std::cout << report.bound_name << " " << offband::format_double(report.value) << "\n";
}

int cmd_bounds(const BoundsFlags& f) {
  switch (f.theorem) {
    case 1:
      print_bound(offband::bound_thm1_uniform(f.num_actions, f.n, f.coverage));
      print_bound(offband::bound_thm1_tuned(f.num_actions, f.n, f.coverage));
      break;
    case 2:
      print_bound(offband::bound_thm2_explicit(f.num_actions, f.n, f.coverage, f.eta));
      break;
    case 3:
      if (f.eta) print_bound(offband::bound_thm3(*f.eta, f.num_actions, f.n, f.coverage));
      print_bound(offband::bound_thm3_uniform(f.num_actions, f.n, f.coverage));
      print_bound(offband::bound_thm3_tuned(f.num_actions, f.n, f.coverage));
      break;
    default:
      throw offband::Error(offband::ErrorCode::kConfig, "--theorem must be 1, 2 or 3");
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  std::vector<std::string> names;
  if (suite == "all") {
    for (auto name : offband::verify::suite_names()) names.emplace_back(name);
  } else {
    names.push_back(suite);
  }
  std::optional<std::string> first_failure;
  for (const auto& name : names) {
    const auto result = offband::verify::run_suite(name, seed);
    std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << ": " << result.detail << "\n";
    if (!result.passed && !first_failure) first_failure = result.name;
  }
  if (first_failure) {
    std::cerr << "property failed: " << *first_failure << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_plot(const std::string& in, const std::string& out) {
  offband::emit_plot(offband::read_aggregate_csv(in), out);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offband: off-policy adversarial bandit simulations, bounds and checks"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(offband::kVersion));

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run every (alpha, algorithm, replication) episode and write CSVs");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Like run, and also render figure.svg");
  add_run_flags(sweep, sweep_flags);

  BoundsFlags bounds_flags;
  auto* bounds = app.add_subcommand("bounds", "Evaluate regret bounds");
  bounds->add_option("--K", bounds_flags.num_actions, "Number of actions")->required()->check(CLI::Range(2.0, 1e18));
  bounds->add_option("--n", bounds_flags.n, "Horizon")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--coverage", bounds_flags.coverage, "Coverage ratio C (or C_phi for theorem 3)")->required();
  bounds->add_option("--theorem", bounds_flags.theorem, "Which bound: 1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));
  bounds->add_option("--eta", bounds_flags.eta, "Learning rate (theorems 2 and 3)")->check(CLI::PositiveNumber);

  std::string suite = "all";
  std::uint64_t verify_seed = offband::verify::kDefaultSeed;
  auto* verify = app.add_subcommand("verify", "Run property suites");
  std::vector<std::string> suites{"all"};
  for (auto name : offband::verify::suite_names()) suites.emplace_back(name);
  verify->add_option("--suite", suite, "Suite name or all")->check(CLI::IsMember(suites));
  verify->add_option("--seed", verify_seed, "Seed for the suites");

  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plot", "Render an SVG from aggregate.csv");
  plot->add_option("--in", plot_in, "aggregate.csv to read")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "SVG file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* help_for = &app;
    for (const auto* sub : app.get_subcommands()) help_for = sub;
    std::cerr << help_for->help();
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, false);
    if (sweep->parsed()) return cmd_run(sweep_flags, true);
    if (bounds->parsed()) return cmd_bounds(bounds_flags);
    if (verify->parsed()) return cmd_verify(suite, verify_seed);
    if (plot->parsed()) return cmd_plot(plot_in, plot_out);
  } catch (const offband::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == offband::ErrorCode::kConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
