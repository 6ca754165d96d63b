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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "offband/core.hpp"
#include "offband/environments.hpp"
#include "offband/estimators.hpp"
#include "offband/learners.hpp"
#include "offband/metrics.hpp"
#include "offband/rng.hpp"

namespace offband {

enum class Algorithm { kExp3, kExp3IX, kExp3IXPlugin, kLinProd };

inline std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kExp3: return "Exp3";
    case Algorithm::kExp3IX: return "Exp3IX";
    case Algorithm::kExp3IXPlugin: return "Exp3IXPlugin";
    case Algorithm::kLinProd: return "LinProd";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kExp3, Algorithm::kExp3IX, Algorithm::kExp3IXPlugin, Algorithm::kLinProd}) {
    if (algorithm_name(a) == name) return a;
  }
  throw Error(ErrorCode::kConfig, "unknown algorithm '" + std::string(name) +
                                      "' (expected Exp3, Exp3IX, Exp3IXPlugin or LinProd)");
}

inline std::string_view eta_mode_name(EtaMode mode) {
  switch (mode) {
    case EtaMode::kUniform: return "uniform";
    case EtaMode::kCoverageTuned: return "coverage_tuned";
    case EtaMode::kLinearUniform: return "linear_uniform";
    case EtaMode::kLinearTuned: return "linear_tuned";
  }
  return "?";
}

inline EtaMode parse_eta_mode(std::string_view name) {
  for (EtaMode m : {EtaMode::kUniform, EtaMode::kCoverageTuned, EtaMode::kLinearUniform, EtaMode::kLinearTuned}) {
    if (eta_mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kConfig, "unknown eta_mode '" + std::string(name) + "'");
}

struct DiracComparator {
  std::size_t action = 0;
};

// Either a point mass on one action or an explicit probability vector. In a
// linear environment the same policy is used in every context.
using ComparatorSpec = std::variant<DiracComparator, std::vector<double>>;

struct PiecewiseBernoulliSpec {};

using EnvSpec = std::variant<PiecewiseBernoulliSpec, ScriptedEnv, LinearEnv>;

struct ExperimentConfig {
  std::size_t num_actions = 100;
  std::uint64_t n = 10000;
  std::vector<Algorithm> algorithms{Algorithm::kExp3, Algorithm::kExp3IX};
  std::vector<double> alpha_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t runs = 100;
  std::uint64_t base_seed = 0;
  ComparatorSpec comparator = DiracComparator{0};
  EnvSpec env = PiecewiseBernoulliSpec{};
  std::string env_description = "piecewise_bernoulli";
  EtaMode eta_mode = EtaMode::kUniform;
  std::uint64_t thin = 10;
  std::size_t workers = 1;
  std::string output = "results";

  bool is_linear() const noexcept { return std::holds_alternative<LinearEnv>(env); }

  Policy comparator_policy() const {
    if (const auto* dirac = std::get_if<DiracComparator>(&comparator)) {
      return Policy::dirac(num_actions, ActionId{dirac->action});
    }
    const auto& probs = std::get<std::vector<double>>(comparator);
    if (probs.size() != num_actions) throw Error(ErrorCode::kConfig, "comparator policy must have K entries");
    return Policy(probs);
  }

  // Throws ErrorCode::kConfig describing the first problem found.
  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
    if (num_actions < 2) fail("K must be at least 2");
    if (runs < 1) fail("runs must be at least 1");
    if (algorithms.empty()) fail("algorithms must not be empty");
    if (alpha_grid.empty()) fail("alpha_grid must not be empty");
    for (double alpha : alpha_grid) {
      if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha_grid entries must lie in [0, 1]");
    }
    if (workers < 1) fail("workers must be at least 1");
    try {
      (void)comparator_policy();
    } catch (const Error& e) {
      fail("invalid comparator: " + e.detail());
    }
    const bool linear_mode = eta_mode == EtaMode::kLinearUniform || eta_mode == EtaMode::kLinearTuned;
    if (const auto* env_linear = std::get_if<LinearEnv>(&env)) {
      if (env_linear->num_actions() != num_actions) fail("K differs from the linear environment's action count");
      if (env_linear->horizon() < n) fail("theta_sequence is shorter than n");
      for (Algorithm a : algorithms) {
        if (a != Algorithm::kLinProd) fail("only LinProd runs in a linear environment");
      }
      if (!linear_mode) fail("linear environments need eta_mode linear_uniform or linear_tuned");
    } else {
      for (Algorithm a : algorithms) {
        if (a == Algorithm::kLinProd) fail("LinProd needs a linear environment");
      }
      if (linear_mode) fail("linear eta modes need a linear environment");
      if (const auto* scripted = std::get_if<ScriptedEnv>(&env)) {
        if (scripted->num_actions() != num_actions) fail("K differs from the reward table width");
        if (scripted->horizon() < n) fail("reward table has fewer than n rows");
      }
    }
  }
};

// Substreams of one replication's RngStream.
enum class Substream : std::uint64_t { kEnvironment = 0, kBehavior = 1, kLearner = 2, kContext = 3 };

inline RngStream episode_stream(std::uint64_t base_seed, std::uint64_t run_index, Substream which) {
  return RngStream(base_seed, run_index, static_cast<std::uint64_t>(which));
}

struct RunRecord {
  double alpha = 0.0;
  Algorithm algorithm = Algorithm::kExp3;
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  // (t, cumulative regret) every `thin` rounds, plus the last round.
  std::vector<std::pair<std::uint64_t, double>> trajectory;
  double eta = 0.0;
  // Plug-in value of the naive importance-weighting bound; K-armed runs only.
  std::optional<double> naive_exp3_bound;
};

struct AggregateStats {
  double alpha = 0.0;
  Algorithm algorithm = Algorithm::kExp3;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t run_count = 0;
  double std_error = 0.0;
};

// Per-round view handed to an optional observer; used by tests and audits.
struct RoundTrace {
  std::uint64_t t = 0;
  std::size_t context = 0;
  const Policy* learner_policy = nullptr;
  ActionId learner_action;
  ActionId behavior_action;
  double cumulative_regret = 0.0;
};

using RoundObserver = std::function<void(const RoundTrace&)>;

class EpisodeError : public Error {
 public:
  EpisodeError(const Error& cause, std::uint64_t round)
      : Error(cause.code(), "round " + std::to_string(round) + ": " + cause.detail()), round_(round) {}

  std::uint64_t round() const noexcept { return round_; }

 private:
  std::uint64_t round_;
};

// Learning rate an episode will use for the given behavior policy.
inline double episode_eta(const ExperimentConfig& config, const Policy& behavior) {
  const auto k = static_cast<double>(config.num_actions);
  switch (config.eta_mode) {
    case EtaMode::kUniform:
    case EtaMode::kLinearUniform:
      return tune_eta(config.eta_mode, k, config.n);
    case EtaMode::kCoverageTuned:
      return tune_eta(config.eta_mode, k, config.n, coverage_ratio(config.comparator_policy(), behavior));
    case EtaMode::kLinearTuned: {
      const auto& env = std::get<LinearEnv>(config.env);
      const auto vb = compute_vbar(env, same_policy_everywhere(behavior, env.num_contexts()), "behavior");
      const auto vc =
          compute_vbar(env, same_policy_everywhere(config.comparator_policy(), env.num_contexts()), "comparator");
      return tune_eta(config.eta_mode, k, config.n, feature_coverage_ratio(vb, vc));
    }
  }
  return 0.0;
}

namespace detail {

inline void record_point(RunRecord& record, const ExperimentConfig& config, std::uint64_t t, double cumulative) {
  if (config.thin > 0 && (t % config.thin == 0 || t == config.n)) record.trajectory.emplace_back(t, cumulative);
}

inline ExpWeightsLearner make_exp_learner(Algorithm algorithm, const Policy& behavior, double eta) {
  switch (algorithm) {
    case Algorithm::kExp3: return ExpWeightsLearner::exp3(behavior, eta);
    case Algorithm::kExp3IX: return ExpWeightsLearner::exp3_ix(behavior, eta);
    case Algorithm::kExp3IXPlugin: return ExpWeightsLearner::exp3_ix_plugin(behavior.size(), eta);
    case Algorithm::kLinProd: break;
  }
  throw Error(ErrorCode::kConfig, "LinProd is not an exponential-weights learner");
}

inline void run_k_armed(const ExperimentConfig& config, const RewardProcess& env, const Policy& behavior,
                        RunRecord& record, const RoundObserver& observer) {
  RngStream env_rng = episode_stream(config.base_seed, record.run_index, Substream::kEnvironment);
  RngStream behavior_rng = episode_stream(config.base_seed, record.run_index, Substream::kBehavior);
  RngStream learner_rng = episode_stream(config.base_seed, record.run_index, Substream::kLearner);

  ExpWeightsLearner learner = make_exp_learner(record.algorithm, behavior, record.eta);
  RegretTrajectory regret(config.comparator_policy(), std::string(algorithm_name(record.algorithm)));
  NaiveExp3Diagnostic naive(record.eta, config.num_actions);

  for (std::uint64_t t = 1; t <= config.n; ++t) {
    try {
      const RewardVector rewards = draw_reward_vector(env, t, env_rng);
      const Policy policy = learner.policy();
      const ActionId learner_action = sample_action(policy, learner_rng);
      const ActionId behavior_action = sample_action(behavior, behavior_rng);
      // The learner only ever sees the behavior pair.
      learner.update(observe(rewards, behavior_action, t));
      regret.accumulate(policy, rewards);
      naive.add(policy, behavior);
      record_point(record, config, t, regret.total());
      if (observer) observer(RoundTrace{t, 0, &policy, learner_action, behavior_action, regret.total()});
    } catch (const Error& e) {
      throw EpisodeError(e, t);
    }
  }
  record.final_regret = regret.total();
  record.naive_exp3_bound = naive.value();
}

inline void run_linear(const ExperimentConfig& config, const LinearEnv& env, const Policy& behavior,
                       RunRecord& record, const RoundObserver& observer) {
  RngStream context_rng = episode_stream(config.base_seed, record.run_index, Substream::kContext);
  RngStream behavior_rng = episode_stream(config.base_seed, record.run_index, Substream::kBehavior);
  RngStream learner_rng = episode_stream(config.base_seed, record.run_index, Substream::kLearner);

  const ContextPolicy behavior_ctx = same_policy_everywhere(behavior, env.num_contexts());
  const Eigen::MatrixXd vbar_inverse = invert_vbar(compute_vbar(env, behavior_ctx, "behavior"));
  LinProdLearner learner(env.num_contexts(), env.num_actions(), record.eta);
  RegretTrajectory regret(same_policy_everywhere(config.comparator_policy(), env.num_contexts()), "LinProd");

  for (std::uint64_t t = 1; t <= config.n; ++t) {
    try {
      const std::size_t context = env.draw_context(context_rng);
      const RewardVector rewards = env.rewards(t, context);
      const Policy policy = learner.policy(context);
      const ActionId learner_action = sample_action(policy, learner_rng);
      const ActionId behavior_action = sample_action(behavior_ctx[context], behavior_rng);
      const double behavior_reward = rewards(behavior_action);
      const Eigen::VectorXd theta_hat =
          linear_theta_estimate(vbar_inverse, env.features()(context, behavior_action.index), behavior_reward);
      learner.update(theta_hat, env.features());
      regret.accumulate(policy, rewards, context);
      record_point(record, config, t, regret.total());
      if (observer) observer(RoundTrace{t, context, &policy, learner_action, behavior_action, regret.total()});
    } catch (const Error& e) {
      throw EpisodeError(e, t);
    }
  }
  record.final_regret = regret.total();
}

}  // namespace detail

// Runs one n-round episode. All randomness comes from
// RngStream(config.base_seed, run_index, substream), so the record depends
// only on (config, alpha, algorithm, run_index).
inline RunRecord run_episode(const ExperimentConfig& config, double alpha, Algorithm algorithm,
                             std::uint64_t run_index, const RoundObserver& observer = {}) {
  RunRecord record;
  record.alpha = alpha;
  record.algorithm = algorithm;
  record.run_index = run_index;
  record.seed = config.base_seed;
  if (config.n == 0) return record;

  const Policy behavior = behavior_alpha_policy(alpha, config.num_actions);
  record.eta = episode_eta(config, behavior);

  if (const auto* linear = std::get_if<LinearEnv>(&config.env)) {
    detail::run_linear(config, *linear, behavior, record, observer);
  } else if (const auto* scripted = std::get_if<ScriptedEnv>(&config.env)) {
    detail::run_k_armed(config, RewardProcess{*scripted}, behavior, record, observer);
  } else {
    detail::run_k_armed(config, RewardProcess{PiecewiseBernoulliEnv(config.num_actions, config.n)}, behavior, record,
                        observer);
  }
  return record;
}

struct EpisodeTask {
  double alpha = 0.0;
  Algorithm algorithm = Algorithm::kExp3;
  std::uint64_t run_index = 0;
};

// Executes tasks on `workers` threads. Each task writes only its own slot,
// so the result is identical for every worker count.
inline std::vector<RunRecord> run_tasks(const ExperimentConfig& config, const std::vector<EpisodeTask>& tasks,
                                        std::size_t workers) {
  std::vector<RunRecord> records(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      try {
        records[i] = run_episode(config, tasks[i].alpha, tasks[i].algorithm, tasks[i].run_index);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(tasks.size(), 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
  }

  std::string summary;
  std::optional<ErrorCode> first_code;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!failures[i]) continue;
    std::string message;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      if (!first_code) first_code = e.code();
      message = e.what();
    } catch (const std::exception& e) {
      if (!first_code) first_code = ErrorCode::kInvalidArgument;
      message = e.what();
    }
    summary += "\n  alpha=" + std::to_string(tasks[i].alpha) + " algorithm=" +
               std::string(algorithm_name(tasks[i].algorithm)) + " run=" + std::to_string(tasks[i].run_index) +
               ": " + message;
  }
  if (first_code) throw Error(*first_code, "episode failures:" + summary);
  return records;
}

inline std::vector<RunRecord> run_replications(const ExperimentConfig& config, double alpha, Algorithm algorithm) {
  config.validate();
  std::vector<EpisodeTask> tasks;
  for (std::uint64_t r = 0; r < config.runs; ++r) tasks.push_back({alpha, algorithm, r});
  return run_tasks(config, tasks, config.workers);
}

// All (alpha, algorithm, run) records, ordered by alpha grid position, then
// algorithm list position, then run index.
inline std::vector<RunRecord> run_all(const ExperimentConfig& config) {
  config.validate();
  std::vector<EpisodeTask> tasks;
  for (double alpha : config.alpha_grid) {
    for (Algorithm algorithm : config.algorithms) {
      for (std::uint64_t r = 0; r < config.runs; ++r) tasks.push_back({alpha, algorithm, r});
    }
  }
  return run_tasks(config, tasks, config.workers);
}

// Empirical quantile with linear interpolation between order statistics at
// the 1-based position 1 + (m - 1) p.
inline double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline constexpr std::string_view kQuantileRule =
    "linear interpolation between order statistics at 1-based position 1 + (m - 1) p";

inline AggregateStats aggregate(double alpha, Algorithm algorithm, const std::vector<double>& final_regrets) {
  if (final_regrets.empty()) throw Error(ErrorCode::kInvalidArgument, "no runs to aggregate");
  const auto m = static_cast<double>(final_regrets.size());
  double sum = 0.0;
  for (double v : final_regrets) sum += v;
  const double mean = sum / m;
  double sq = 0.0;
  for (double v : final_regrets) sq += (v - mean) * (v - mean);
  const double sd = final_regrets.size() > 1 ? std::sqrt(sq / (m - 1.0)) : 0.0;
  return AggregateStats{alpha,
                        algorithm,
                        mean,
                        empirical_quantile(final_regrets, 0.25),
                        empirical_quantile(final_regrets, 0.75),
                        final_regrets.size(),
                        sd / std::sqrt(m)};
}

// Groups records by (alpha, algorithm) in order of first appearance.
inline std::vector<AggregateStats> aggregate_records(const std::vector<RunRecord>& records) {
  std::vector<std::pair<std::pair<double, Algorithm>, std::vector<double>>> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return g.first.first == r.alpha && g.first.second == r.algorithm;
    });
    if (it == groups.end()) {
      groups.push_back({{r.alpha, r.algorithm}, {}});
      it = std::prev(groups.end());
    }
    it->second.push_back(r.final_regret);
  }
  std::vector<AggregateStats> stats;
  stats.reserve(groups.size());
  for (const auto& [key, values] : groups) stats.push_back(aggregate(key.first, key.second, values));
  return stats;
}

struct SweepResult {
  std::vector<RunRecord> records;
  std::vector<AggregateStats> stats;
};

inline SweepResult sweep(const ExperimentConfig& config) {
  SweepResult result;
  result.records = run_all(config);
  result.stats = aggregate_records(result.records);
  return result;
}

inline std::vector<AggregateStats> sweep_alpha(const ExperimentConfig& config) { return sweep(config).stats; }

}  // namespace offband
