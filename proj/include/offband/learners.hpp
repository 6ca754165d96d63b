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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "offband/core.hpp"
#include "offband/estimators.hpp"
#include "offband/feature_map.hpp"

namespace offband {

// Exponential weights over cumulative IX reward estimates.
//
// Three configurations share the update:
//   exp3()            known pi_B, gamma_t = 0 (plain importance weighting),
//   exp3_ix()         known pi_B, gamma_t = eta / 2,
//   exp3_ix_plugin()  pi_B replaced by empirical frequencies of past
//                     behavior actions, gamma_t from the plugin schedule.
//
// Weights are never materialized: pi_t(a) is proportional to
// exp(eta * (S_t(a) - max_b S_t(b))) where S_t(a) sums past estimates.
class ExpWeightsLearner {
 public:
  static ExpWeightsLearner exp3(Policy behavior, double eta) {
    const std::size_t k = behavior.size();
    return ExpWeightsLearner(k, IxGammaSchedule(eta, BehaviorMode::kKnown, k), std::move(behavior),
                             /*zero_gamma=*/true);
  }

  static ExpWeightsLearner exp3_ix(Policy behavior, double eta) {
    const std::size_t k = behavior.size();
    return ExpWeightsLearner(k, IxGammaSchedule(eta, BehaviorMode::kKnown, k), std::move(behavior),
                             /*zero_gamma=*/false);
  }

  static ExpWeightsLearner exp3_ix_plugin(std::size_t num_actions, double eta) {
    return ExpWeightsLearner(num_actions, IxGammaSchedule(eta, BehaviorMode::kPlugin, num_actions),
                             std::nullopt, /*zero_gamma=*/false);
  }

  std::size_t num_actions() const noexcept { return scores_.size(); }
  double eta() const noexcept { return schedule_.eta(); }
  std::uint64_t round() const noexcept { return round_; }
  const std::vector<double>& scores() const noexcept { return scores_; }
  const IxGammaSchedule& gamma_schedule() const noexcept { return schedule_; }
  const std::optional<Policy>& known_behavior() const noexcept { return known_behavior_; }
  const std::optional<PluginBehaviorEstimate>& plugin_state() const noexcept { return plugin_state_; }

  double gamma() const { return zero_gamma_ ? 0.0 : schedule_.gamma_at(round_); }

  Policy policy() const {
    const double top = *std::max_element(scores_.begin(), scores_.end());
    std::vector<double> weights(scores_.size());
    for (std::size_t a = 0; a < scores_.size(); ++a) {
      weights[a] = std::exp(eta() * (scores_[a] - top));
    }
    return policy_from_weights(weights);
  }

  // Folds in the round-t observation. In plugin mode the estimate uses the
  // frequencies of rounds 1..t-1, and A^B_t is counted only afterwards.
  void update(const Observation& obs) {
    if (obs.round != round_) {
      throw Error(ErrorCode::kRoundOutOfRange, "observation for round " + std::to_string(obs.round) +
                                                   " given to learner at round " + std::to_string(round_));
    }
    if (obs.behavior_action.index >= scores_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "behavior action out of range");
    }
    SparseRewardEstimate estimate;
    if (plugin_state_) {
      estimate = ix_estimate_plugin(obs, *plugin_state_, gamma());
      plugin_state_->observe(obs.behavior_action);
    } else {
      estimate = ix_estimate(obs, *known_behavior_, gamma());
    }
    double& score = scores_[estimate.action.index];
    score += estimate.value;
    if (!std::isfinite(score)) {
      throw Error(ErrorCode::kNonFiniteWeight, "score became non-finite at round " + std::to_string(round_));
    }
    ++round_;
  }

 private:
  ExpWeightsLearner(std::size_t num_actions, IxGammaSchedule schedule, std::optional<Policy> behavior,
                    bool zero_gamma)
      : scores_(num_actions, 0.0),
        schedule_(schedule),
        known_behavior_(std::move(behavior)),
        zero_gamma_(zero_gamma) {
    if (num_actions == 0) throw Error(ErrorCode::kInvalidArgument, "K must be positive");
    if (!known_behavior_) plugin_state_.emplace(num_actions);
  }

  std::vector<double> scores_;
  IxGammaSchedule schedule_;
  std::optional<Policy> known_behavior_;
  std::optional<PluginBehaviorEstimate> plugin_state_;
  bool zero_gamma_;
  std::uint64_t round_ = 1;
};

inline Policy exp_policy(const ExpWeightsLearner& learner) { return learner.policy(); }

inline ExpWeightsLearner exp_update(ExpWeightsLearner learner, const Observation& obs) {
  learner.update(obs);
  return learner;
}

// Prod-style weights over a finite context set:
//   w_t(x, a) = prod_{k < t} (1 + eta <theta_hat_k, phi(x, a)>),
// kept as a table of log-weights updated for every context each round.
class LinProdLearner {
 public:
  LinProdLearner(std::size_t num_contexts, std::size_t num_actions, double eta, bool keep_history = false)
      : num_contexts_(num_contexts),
        num_actions_(num_actions),
        eta_(eta),
        keep_history_(keep_history),
        log_weights_(num_contexts * num_actions, 0.0) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw Error(ErrorCode::kInvalidArgument, "eta must be positive and finite");
    }
    if (num_contexts == 0 || num_actions == 0) {
      throw Error(ErrorCode::kInvalidArgument, "need at least one context and one action");
    }
  }

  std::size_t num_contexts() const noexcept { return num_contexts_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double eta() const noexcept { return eta_; }
  std::uint64_t round() const noexcept { return round_; }
  const std::vector<Eigen::VectorXd>& theta_hat_history() const noexcept { return history_; }

  double log_weight(std::size_t context, std::size_t action) const {
    check_context(context);
    return log_weights_.at(context * num_actions_ + action);
  }

  Policy policy(std::size_t context) const {
    check_context(context);
    const auto row = log_weights_.begin() + static_cast<std::ptrdiff_t>(context * num_actions_);
    const double top = *std::max_element(row, row + static_cast<std::ptrdiff_t>(num_actions_));
    std::vector<double> weights(num_actions_);
    for (std::size_t a = 0; a < num_actions_; ++a) weights[a] = std::exp(row[static_cast<std::ptrdiff_t>(a)] - top);
    return policy_from_weights(weights);
  }

  // Multiplies every w(x, a) by 1 + eta <theta_hat, phi(x, a)>. Fails without
  // modifying the table if any factor is non-positive.
  void update(const Eigen::VectorXd& theta_hat, const FeatureMap& features) {
    if (features.num_contexts() != num_contexts_ || features.num_actions() != num_actions_) {
      throw Error(ErrorCode::kDimensionMismatch, "feature map shape differs from the learner");
    }
    if (static_cast<std::size_t>(theta_hat.size()) != features.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "theta_hat dimension differs from the features");
    }
    std::vector<double> increments(log_weights_.size());
    for (std::size_t x = 0; x < num_contexts_; ++x) {
      for (std::size_t a = 0; a < num_actions_; ++a) {
        const double factor = 1.0 + eta_ * theta_hat.dot(features(x, a));
        if (!(factor > 0.0)) {
          throw Error(ErrorCode::kProdFactorNonPositive,
                      "1 + eta <theta_hat, phi> = " + std::to_string(factor) + " at context " + std::to_string(x) +
                          ", action " + std::to_string(a) + " in round " + std::to_string(round_) +
                          "; the step size violates lambda_min(V) >= 2 eta max |phi|^2");
        }
        increments[x * num_actions_ + a] = std::log(factor);
      }
    }
    for (std::size_t i = 0; i < log_weights_.size(); ++i) {
      log_weights_[i] += increments[i];
      if (!std::isfinite(log_weights_[i])) {
        throw Error(ErrorCode::kNonFiniteWeight, "log-weight became non-finite in round " + std::to_string(round_));
      }
    }
    if (keep_history_) history_.push_back(theta_hat);
    ++round_;
  }

 private:
  void check_context(std::size_t context) const {
    if (context >= num_contexts_) {
      throw Error(ErrorCode::kUnknownContext, "context " + std::to_string(context) + " is not in the context set");
    }
  }

  std::size_t num_contexts_;
  std::size_t num_actions_;
  double eta_;
  bool keep_history_;
  std::vector<double> log_weights_;
  std::vector<Eigen::VectorXd> history_;
  std::uint64_t round_ = 1;
};

inline Policy linprod_policy(const LinProdLearner& learner, std::size_t context) {
  return learner.policy(context);
}

inline LinProdLearner linprod_update(LinProdLearner learner, const Eigen::VectorXd& theta_hat,
                                     const FeatureMap& features) {
  learner.update(theta_hat, features);
  return learner;
}

enum class EtaMode { kUniform, kCoverageTuned, kLinearUniform, kLinearTuned };

// Learning rates: sqrt(log K / n) for the uniform modes and
// sqrt(log K / (C n)) for the tuned modes, C being the (feature) coverage.
// K is real-valued so that nominal values such as K = e can be evaluated.
inline double tune_eta(EtaMode mode, double num_actions, std::uint64_t n,
                       std::optional<double> coverage = std::nullopt) {
  if (!(num_actions >= 2.0)) throw Error(ErrorCode::kInvalidArgument, "K must be at least 2");
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  const double log_k = std::log(num_actions);
  const double rounds = static_cast<double>(n);
  switch (mode) {
    case EtaMode::kUniform:
    case EtaMode::kLinearUniform:
      return std::sqrt(log_k / rounds);
    case EtaMode::kCoverageTuned:
    case EtaMode::kLinearTuned:
      if (!coverage) throw Error(ErrorCode::kMissingCoverage, "tuned learning rate needs a coverage value");
      if (!(*coverage > 0.0) || !std::isfinite(*coverage)) {
        throw Error(ErrorCode::kInvalidArgument, "coverage must be positive and finite to tune eta");
      }
      return std::sqrt(log_k / (*coverage * rounds));
  }
  return 0.0;
}

}  // namespace offband
