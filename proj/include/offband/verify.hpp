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

// Statistical and algebraic property suites for the estimators, plus the
// small reference scenarios they (and the acceptance tests) run on.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "offband/core.hpp"
#include "offband/environments.hpp"
#include "offband/estimators.hpp"
#include "offband/metrics.hpp"
#include "offband/rng.hpp"

namespace offband::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240229;

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Uniform on (lo, hi].
inline double open_closed(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * (1.0 - rng.uniform()); }

inline Policy random_policy(RngStream& rng, std::size_t k, double min_weight) {
  std::vector<double> w(k);
  for (auto& v : w) v = min_weight + rng.uniform();
  return policy_from_weights(w);
}

}  // namespace detail

// The IX-versus-Prod inequality on `count` random tuples with r in [0, 1],
// pb in (0.001, 1], gamma in (0, 2] and a random indicator.
inline SuiteResult ix_inequality_suite(std::uint64_t seed = kDefaultSeed, std::size_t count = 100000) {
  RngStream rng(seed, 0);
  double worst = kInfinity;
  for (std::size_t i = 0; i < count; ++i) {
    const double reward = rng.uniform() <= 0.05 ? 1.0 : rng.uniform();
    const int indicator = rng.uniform() < 0.5 ? 0 : 1;
    const double pb = detail::open_closed(rng, 0.001, 1.0);
    const double gamma = detail::open_closed(rng, 0.0, 2.0);
    worst = std::min(worst, ix_prod_inequality_gap(reward, indicator, pb, gamma));
  }
  const bool ok = worst >= -1e-12;
  return {"ix-inequality", ok, std::to_string(count) + " tuples, smallest gap " + detail::num(worst)};
}

// Monte Carlo mean of the IX estimate at one action against
// r pi_B / (pi_B + gamma), and against r when gamma = 0, within 3 standard
// errors, for `configs` random (r, pi_B, gamma).
inline SuiteResult pessimism_suite(std::uint64_t seed = kDefaultSeed, std::size_t configs = 20,
                                   std::size_t draws = 100000) {
  RngStream rng(seed, 1);
  std::string failures;
  double worst_z = 0.0;
  for (std::size_t c = 0; c < configs; ++c) {
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 8.0);
    const Policy behavior = detail::random_policy(rng, k, 0.05);
    std::vector<double> r(k);
    for (auto& v : r) v = rng.uniform();
    const RewardVector rewards(r);
    const ActionId target{static_cast<std::size_t>(rng.uniform() * static_cast<double>(k))};
    const double gamma = detail::open_closed(rng, 0.0, 1.0);

    RngStream draws_rng(seed, 1000 + c);
    double sum_ix = 0.0;
    double sum_ips = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      const Observation obs = observe(rewards, sample_action(behavior, draws_rng), 1);
      sum_ix += ix_estimate(obs, behavior, gamma).at(target);
      sum_ips += ix_estimate(obs, behavior, 0.0).at(target);
    }
    const double n = static_cast<double>(draws);
    const double pb = behavior(target);
    const double rt = rewards(target);
    const double binomial_sd = std::sqrt(pb * (1.0 - pb) / n);

    const double expected_ix = rt * pb / (pb + gamma);
    const double se_ix = rt / (pb + gamma) * binomial_sd;
    const double expected_ips = rt;
    const double se_ips = rt / pb * binomial_sd;

    const double dev_ix = std::abs(sum_ix / n - expected_ix);
    const double dev_ips = std::abs(sum_ips / n - expected_ips);
    if (se_ix > 0) worst_z = std::max(worst_z, dev_ix / se_ix);
    if (se_ips > 0) worst_z = std::max(worst_z, dev_ips / se_ips);
    if (dev_ix > 3.0 * se_ix) failures += " config " + std::to_string(c) + " (gamma > 0)";
    if (dev_ips > 3.0 * se_ips) failures += " config " + std::to_string(c) + " (gamma = 0)";
    if (expected_ix > rt) failures += " config " + std::to_string(c) + " (bias not pessimistic)";
  }
  return {"pessimism", failures.empty(),
          std::to_string(configs) + " configurations x " + std::to_string(draws) + " draws, largest |z| " +
              detail::num(worst_z) + (failures.empty() ? "" : "; failed:" + failures)};
}

// Frequency of sup_a |pi_hat_t(a) - pi_B(a)| > eps_t over independent
// replications must not exceed delta_t + 3 sqrt(delta_t / reps).
inline SuiteResult plugin_concentration_suite(std::uint64_t seed = kDefaultSeed, std::size_t reps = 10000,
                                              std::size_t num_actions = 10) {
  static constexpr std::uint64_t kCheckpoints[] = {11, 101, 1001};
  RngStream setup(seed, 2);
  const Policy behavior = detail::random_policy(setup, num_actions, 0.0);
  const IxGammaSchedule schedule(0.1, BehaviorMode::kPlugin, num_actions);

  std::vector<std::size_t> violations(std::size(kCheckpoints), 0);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    RngStream rng(seed, 10000 + rep);
    PluginBehaviorEstimate state(num_actions);
    std::size_t next = 0;
    while (next < std::size(kCheckpoints)) {
      const std::uint64_t t = kCheckpoints[next];
      if (state.rounds_seen() == t - 1) {
        if (state.max_abs_deviation(behavior) > schedule.epsilon_at(t)) ++violations[next];
        ++next;
        continue;
      }
      state.observe(sample_action(behavior, rng));
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < std::size(kCheckpoints); ++i) {
    const std::uint64_t t = kCheckpoints[i];
    const double delta = schedule.delta_at(t);
    const double freq = static_cast<double>(violations[i]) / static_cast<double>(reps);
    const double limit = delta + 3.0 * std::sqrt(delta / static_cast<double>(reps));
    ok = ok && freq <= limit;
    detail += "t=" + std::to_string(t) + ": " + detail::num(freq) + " <= " + detail::num(limit) + "; ";
  }
  return {"plugin-concentration", ok, detail};
}

// |X| = 4, K = 3, d = 3 environment with phi(x, a) = (1 - s_x) e_a + s_x / 3,
// s = (0, 0.2, 0.4, 0.6) and context probabilities (0.1, 0.2, 0.3, 0.4).
// theta_t favours action 0 during the first half and action 2 afterwards,
// with seeded jitter. All rewards lie in [0, 1].
inline LinearEnv reference_linear_env(std::uint64_t n, std::uint64_t seed = kDefaultSeed) {
  static constexpr double kShrink[] = {0.0, 0.2, 0.4, 0.6};
  FeatureMap features(4, 3, 3);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t a = 0; a < 3; ++a) {
      Eigen::VectorXd phi = Eigen::VectorXd::Constant(3, kShrink[x] / 3.0);
      phi[static_cast<Eigen::Index>(a)] += 1.0 - kShrink[x];
      features.set(x, a, std::move(phi));
    }
  }
  RngStream rng(seed, 3);
  std::vector<Eigen::VectorXd> thetas;
  thetas.reserve(n);
  for (std::uint64_t t = 1; t <= n; ++t) {
    Eigen::Vector3d base = t <= n / 2 ? Eigen::Vector3d(0.8, 0.5, 0.3) : Eigen::Vector3d(0.3, 0.5, 0.9);
    for (Eigen::Index i = 0; i < 3; ++i) base[i] = std::clamp(base[i] + 0.2 * (rng.uniform() - 0.5), 0.0, 1.0);
    thetas.emplace_back(base);
  }
  return LinearEnv({"x0", "x1", "x2", "x3"}, Policy({0.1, 0.2, 0.3, 0.4}), std::move(features), std::move(thetas));
}

// Context-dependent behavior policy for the reference environment.
inline ContextPolicy reference_linear_behavior() {
  return {Policy({0.5, 0.3, 0.2}), Policy({0.2, 0.5, 0.3}), Policy({1.0 / 3, 1.0 / 3, 1.0 / 3}),
          Policy({0.25, 0.25, 0.5})};
}

// Exact expectation of theta_hat_t over contexts and behavior actions,
// sum_x p(x) sum_a pi_B(a | x) V^-1 phi(x, a) r_t(x, a), against theta_t; and
// C_phi(pi_B; pi_B) against d.
inline SuiteResult linprod_unbiased_suite(std::uint64_t seed = kDefaultSeed, std::uint64_t n = 200) {
  const LinearEnv env = reference_linear_env(n, seed);
  const ContextPolicy behavior = reference_linear_behavior();
  const CovarianceMatrix vbar = compute_vbar(env, behavior, "behavior");
  const Eigen::MatrixXd inverse = invert_vbar(vbar);
  double worst = 0.0;
  for (std::uint64_t t = 1; t <= n; ++t) {
    Eigen::VectorXd expectation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(env.dim()));
    for (std::size_t x = 0; x < env.num_contexts(); ++x) {
      for (std::size_t a = 0; a < env.num_actions(); ++a) {
        expectation += env.context_probs()[x] * behavior[x][a] *
                       linear_theta_estimate(inverse, env.features()(x, a), env.reward(t, x, a));
      }
    }
    worst = std::max(worst, (expectation - env.theta(t)).cwiseAbs().maxCoeff());
  }
  const double coverage = feature_coverage_ratio(vbar, vbar);
  const double coverage_err = std::abs(coverage - static_cast<double>(env.dim()));
  const bool ok = worst <= 1e-10 && coverage_err <= 1e-10;
  return {"linprod-unbiased", ok,
          "max |E[theta_hat_t] - theta_t| = " + detail::num(worst) + " over " + std::to_string(n) +
              " rounds; C_phi(pi_B; pi_B) - d = " + detail::num(coverage - static_cast<double>(env.dim()))};
}

inline const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> kNames{"ix-inequality", "pessimism", "plugin-concentration",
                                                    "linprod-unbiased"};
  return kNames;
}

inline SuiteResult run_suite(std::string_view name, std::uint64_t seed = kDefaultSeed) {
  if (name == "ix-inequality") return ix_inequality_suite(seed);
  if (name == "pessimism") return pessimism_suite(seed);
  if (name == "plugin-concentration") return plugin_concentration_suite(seed);
  if (name == "linprod-unbiased") return linprod_unbiased_suite(seed);
  throw Error(ErrorCode::kConfig, "unknown suite '" + std::string(name) + "'");
}

}  // namespace offband::verify
