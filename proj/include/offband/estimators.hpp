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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "offband/core.hpp"

namespace offband {

enum class BehaviorMode { kKnown, kPlugin };

// Exploration parameter sequence gamma_t for the IX estimator.
//
// Known behavior policy: gamma_t = eta / 2.
// Plugin estimate: gamma_t = eta / 2 + eps_t, where eps_t is the Hoeffding
// radius of the empirical behavior frequencies at confidence delta_t:
//   eps_1 = 1, delta_1 = 0,
//   eps_t = sqrt(log(K / delta_t) / (2 (t - 1))), delta_t = (t - 1)^-2.
class IxGammaSchedule {
 public:
  IxGammaSchedule(double eta, BehaviorMode mode, std::size_t num_actions)
      : eta_(eta), mode_(mode), num_actions_(num_actions) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw Error(ErrorCode::kInvalidArgument, "eta must be positive and finite");
    }
    if (num_actions == 0) throw Error(ErrorCode::kInvalidArgument, "K must be positive");
  }

  double eta() const noexcept { return eta_; }
  BehaviorMode mode() const noexcept { return mode_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  double epsilon_at(std::uint64_t t) const {
    check_round(t);
    if (mode_ == BehaviorMode::kKnown) return 0.0;
    if (t == 1) return 1.0;
    const double past = static_cast<double>(t - 1);
    return std::sqrt(std::log(static_cast<double>(num_actions_) * past * past) / (2.0 * past));
  }

  double delta_at(std::uint64_t t) const {
    check_round(t);
    if (mode_ == BehaviorMode::kKnown || t == 1) return 0.0;
    const double past = static_cast<double>(t - 1);
    return 1.0 / (past * past);
  }

  double gamma_at(std::uint64_t t) const { return eta_ / 2.0 + epsilon_at(t); }

 private:
  static void check_round(std::uint64_t t) {
    if (t == 0) throw Error(ErrorCode::kRoundOutOfRange, "rounds are numbered from 1");
  }

  double eta_;
  BehaviorMode mode_;
  std::size_t num_actions_;
};

inline double gamma_at(const IxGammaSchedule& schedule, std::uint64_t t) {
  return schedule.gamma_at(t);
}

// Empirical behavior frequencies built from behavior actions of past rounds.
// With no rounds seen the estimate is zero everywhere.
class PluginBehaviorEstimate {
 public:
  explicit PluginBehaviorEstimate(std::size_t num_actions) : counts_(num_actions, 0) {}

  std::size_t num_actions() const noexcept { return counts_.size(); }
  std::uint64_t rounds_seen() const noexcept { return rounds_seen_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  double estimate(ActionId a) const {
    const std::uint64_t c = counts_.at(a.index);
    if (rounds_seen_ == 0) return 0.0;
    return static_cast<double>(c) / static_cast<double>(rounds_seen_);
  }

  void observe(ActionId behavior_action) {
    if (behavior_action.index >= counts_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "behavior action out of range");
    }
    ++counts_[behavior_action.index];
    ++rounds_seen_;
  }

  double max_abs_deviation(const Policy& behavior) const {
    if (behavior.size() != counts_.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "behavior policy size differs from K");
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      worst = std::max(worst, std::abs(estimate(ActionId{a}) - behavior[a]));
    }
    return worst;
  }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t rounds_seen_ = 0;
};

inline PluginBehaviorEstimate plugin_update(PluginBehaviorEstimate state, ActionId behavior_action) {
  state.observe(behavior_action);
  return state;
}

// Reward estimate with a single non-zero coordinate at `action`.
struct SparseRewardEstimate {
  ActionId action;
  double value = 0.0;

  double at(ActionId a) const noexcept { return a == action ? value : 0.0; }
};

// IX estimate with a known behavior policy: R / (pi_B(A) + gamma) at the
// behavior action. gamma = 0 gives the unbiased importance-weighted estimate.
inline SparseRewardEstimate ix_estimate(const Observation& obs, const Policy& behavior_policy,
                                        double gamma) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be non-negative");
  const double denominator = behavior_policy(obs.behavior_action) + gamma;
  if (!(denominator > 0.0)) {
    throw Error(ErrorCode::kZeroDenominator,
                "behavior probability is zero at action " + std::to_string(obs.behavior_action.index) +
                    " and gamma is zero");
  }
  return SparseRewardEstimate{obs.behavior_action, obs.behavior_reward / denominator};
}

// IX estimate using the plugin behavior estimate. `state` must hold only
// actions from rounds strictly before obs.round.
inline SparseRewardEstimate ix_estimate_plugin(const Observation& obs,
                                               const PluginBehaviorEstimate& state, double gamma_t) {
  if (!(gamma_t > 0.0)) throw Error(ErrorCode::kNonPositiveGamma, "plugin gamma must be positive");
  const double denominator = state.estimate(obs.behavior_action) + gamma_t;
  return SparseRewardEstimate{obs.behavior_action, obs.behavior_reward / denominator};
}

// theta_hat = V^-1 phi(X, A^B) R^B.
inline Eigen::VectorXd linear_theta_estimate(const Eigen::MatrixXd& vbar_inverse,
                                             const Eigen::VectorXd& feature, double behavior_reward) {
  if (vbar_inverse.rows() != vbar_inverse.cols() || vbar_inverse.cols() != feature.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance inverse and feature dimensions differ");
  }
  return vbar_inverse * feature * behavior_reward;
}

// Right-hand side minus left-hand side of
//   r 1{A = a} / (pb + gamma) <= log(1 + 2 gamma r 1{A = a} / pb) / (2 gamma),
// which holds for r in [0, 1]. The result is never negative beyond rounding.
inline double ix_prod_inequality_gap(double reward, int indicator, double pb, double gamma) {
  const double x = reward * static_cast<double>(indicator);
  const double lhs = x / (pb + gamma);
  const double rhs = std::log1p(2.0 * gamma * x / pb) / (2.0 * gamma);
  return rhs - lhs;
}

}  // namespace offband
