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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "offband/core.hpp"
#include "offband/environments.hpp"

namespace offband {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Cumulative expected regret sum_t <pi* - pi_t, r_t> against a fixed
// comparator. Non-contextual comparators are stored as a single policy.
class RegretTrajectory {
 public:
  RegretTrajectory(ContextPolicy comparator, std::string algorithm_label)
      : comparator_(std::move(comparator)), label_(std::move(algorithm_label)) {
    if (comparator_.empty()) throw Error(ErrorCode::kInvalidArgument, "comparator is empty");
  }

  RegretTrajectory(const Policy& comparator, std::string algorithm_label)
      : RegretTrajectory(ContextPolicy{comparator}, std::move(algorithm_label)) {}

  const std::vector<double>& cumulative() const noexcept { return cumulative_; }
  const ContextPolicy& comparator() const noexcept { return comparator_; }
  const std::string& algorithm_label() const noexcept { return label_; }
  double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  void accumulate(const Policy& learner_policy, const RewardVector& reward, std::size_t context = 0) {
    const Policy& target = comparator_.at(comparator_.size() == 1 ? 0 : context);
    if (learner_policy.size() != reward.size() || target.size() != reward.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "policy and reward sizes differ");
    }
    double increment = 0.0;
    for (std::size_t a = 0; a < reward.size(); ++a) {
      increment += (target[a] - learner_policy[a]) * reward[a];
    }
    cumulative_.push_back(total() + increment);
  }

 private:
  ContextPolicy comparator_;
  std::string label_;
  std::vector<double> cumulative_;
};

inline RegretTrajectory accumulate_regret(RegretTrajectory traj, const Policy& learner_policy,
                                          const RewardVector& reward) {
  traj.accumulate(learner_policy, reward);
  return traj;
}

// C(pi*; pi_B) = sum_a pi*(a) / pi_B(a), with 0/0 = 0 and p/0 = +inf.
inline double coverage_ratio(const Policy& comparator, const Policy& behavior) {
  if (comparator.size() != behavior.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "policies have different sizes");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < comparator.size(); ++a) {
    if (comparator[a] == 0.0) continue;
    if (behavior[a] == 0.0) return kInfinity;
    total += comparator[a] / behavior[a];
  }
  return total;
}

// C_phi(pi*; pi_B) = Tr[V(pi_B)^-1 V(pi*)].
inline double feature_coverage_ratio(const CovarianceMatrix& vbar_behavior,
                                     const CovarianceMatrix& vbar_comparator,
                                     double eig_floor = kDefaultEigFloor) {
  if (vbar_behavior.matrix.rows() != vbar_comparator.matrix.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance dimensions differ");
  }
  const Eigen::MatrixXd inverse = invert_vbar(vbar_behavior, eig_floor);
  return (inverse * vbar_comparator.matrix).trace();
}

struct BoundInputs {
  double eta = 0.0;
  double num_actions = 0.0;
  std::uint64_t n = 0;
  std::optional<double> coverage;
  std::optional<double> feature_coverage;
  bool worst_case_rewards = false;
};

struct BoundReport {
  std::string bound_name;
  double value = 0.0;
  BoundInputs inputs;
};

namespace detail {

inline void require_positive_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
}

inline void require_coverage(double c) {
  if (std::isnan(c) || c < 0.0) throw Error(ErrorCode::kInvalidArgument, "coverage must be non-negative");
}

inline double thm1_summand(const Policy& comparator, const Policy& behavior, std::span<const double> rewards,
                           double half_eta) {
  double acc = 0.0;
  for (std::size_t a = 0; a < comparator.size(); ++a) {
    acc += rewards[a] * comparator[a] / (behavior[a] + half_eta);
  }
  return acc;
}

}  // namespace detail

// log K / eta + (eta / 2) sum_t sum_a r_t(a) pi*(a) / (pi_B(a) + eta / 2),
// evaluated on the given n x K reward table.
inline BoundReport bound_thm1_full(double eta, const std::vector<std::vector<double>>& reward_means,
                                   const Policy& comparator, const Policy& behavior) {
  detail::require_positive_eta(eta);
  if (comparator.size() != behavior.size()) throw Error(ErrorCode::kDimensionMismatch, "policy sizes differ");
  const double k = static_cast<double>(comparator.size());
  double sum = 0.0;
  for (const auto& row : reward_means) {
    if (row.size() != comparator.size()) throw Error(ErrorCode::kDimensionMismatch, "reward row has wrong length");
    sum += detail::thm1_summand(comparator, behavior, row, eta / 2.0);
  }
  BoundInputs inputs{eta, k, reward_means.size(), coverage_ratio(comparator, behavior), std::nullopt, false};
  return BoundReport{"thm1_full", std::log(k) / eta + eta / 2.0 * sum, inputs};
}

// Same expression with the worst case r = 1 in every round.
inline BoundReport bound_thm1_full(double eta, std::uint64_t n, const Policy& comparator, const Policy& behavior) {
  detail::require_positive_eta(eta);
  if (comparator.size() != behavior.size()) throw Error(ErrorCode::kDimensionMismatch, "policy sizes differ");
  const double k = static_cast<double>(comparator.size());
  const std::vector<double> ones(comparator.size(), 1.0);
  const double per_round = detail::thm1_summand(comparator, behavior, ones, eta / 2.0);
  BoundInputs inputs{eta, k, n, coverage_ratio(comparator, behavior), std::nullopt, true};
  return BoundReport{"thm1_full", std::log(k) / eta + eta / 2.0 * static_cast<double>(n) * per_round, inputs};
}

// sqrt(n log K) (1 + C / 2), from eta = sqrt(log K / n).
inline BoundReport bound_thm1_uniform(double num_actions, std::uint64_t n, double coverage) {
  detail::require_coverage(coverage);
  const double root = std::sqrt(static_cast<double>(n) * std::log(num_actions));
  const double value = std::isinf(coverage) ? kInfinity : root * (1.0 + 0.5 * coverage);
  return BoundReport{"thm1_uniform", value, BoundInputs{std::sqrt(std::log(num_actions) / static_cast<double>(n)),
                                                        num_actions, n, coverage, std::nullopt, true}};
}

// sqrt(2 C n log K): the minimum over eta of log K / eta + eta n C / 2,
// attained at eta = sqrt(2 log K / (C n)), which is what `inputs.eta` holds.
// Plugging the rate sqrt(log K / (C n)) into the same expression gives
// 1.5 sqrt(C n log K) instead.
inline BoundReport bound_thm1_tuned(double num_actions, std::uint64_t n, double coverage) {
  detail::require_coverage(coverage);
  const double value = std::isinf(coverage)
                           ? kInfinity
                           : std::sqrt(2.0 * coverage * static_cast<double>(n) * std::log(num_actions));
  const double eta = std::sqrt(2.0 * std::log(num_actions) / (coverage * static_cast<double>(n)));
  return BoundReport{"thm1_tuned", value, BoundInputs{eta, num_actions, n, coverage, std::nullopt, true}};
}

// Plugin behavior estimate, explicit constants:
//   (16 + log K) / eta + (eta n / 2 + 2 sqrt(n log(K n))) C + 2.
// eta defaults to sqrt(log K / n).
inline BoundReport bound_thm2_explicit(double num_actions, std::uint64_t n, double coverage,
                                       std::optional<double> eta = std::nullopt) {
  detail::require_coverage(coverage);
  const double rounds = static_cast<double>(n);
  const double log_k = std::log(num_actions);
  const double rate = eta.value_or(std::sqrt(log_k / rounds));
  detail::require_positive_eta(rate);
  double value = kInfinity;
  if (!std::isinf(coverage)) {
    const double middle = rate * rounds / 2.0 + 2.0 * std::sqrt(rounds * std::log(num_actions * rounds));
    value = (16.0 + log_k) / rate + middle * coverage + 2.0;
  }
  return BoundReport{"thm2_explicit", value, BoundInputs{rate, num_actions, n, coverage, std::nullopt, true}};
}

// LinProd: log K / eta + eta n C_phi. Valid when the step-size condition holds.
inline BoundReport bound_thm3(double eta, double num_actions, std::uint64_t n, double feature_coverage) {
  detail::require_positive_eta(eta);
  detail::require_coverage(feature_coverage);
  const double value = std::isinf(feature_coverage)
                           ? kInfinity
                           : std::log(num_actions) / eta + eta * static_cast<double>(n) * feature_coverage;
  return BoundReport{"thm3", value, BoundInputs{eta, num_actions, n, std::nullopt, feature_coverage, true}};
}

inline BoundReport bound_thm3_uniform(double num_actions, std::uint64_t n, double feature_coverage) {
  detail::require_coverage(feature_coverage);
  const double value = std::isinf(feature_coverage)
                           ? kInfinity
                           : std::sqrt(static_cast<double>(n) * std::log(num_actions)) * (1.0 + feature_coverage);
  return BoundReport{"thm3_uniform", value,
                     BoundInputs{std::sqrt(std::log(num_actions) / static_cast<double>(n)), num_actions, n,
                                 std::nullopt, feature_coverage, true}};
}

inline BoundReport bound_thm3_tuned(double num_actions, std::uint64_t n, double feature_coverage) {
  detail::require_coverage(feature_coverage);
  const double value =
      std::isinf(feature_coverage)
          ? kInfinity
          : 2.0 * std::sqrt(feature_coverage * static_cast<double>(n) * std::log(num_actions));
  const double eta = std::sqrt(std::log(num_actions) / (feature_coverage * static_cast<double>(n)));
  return BoundReport{"thm3_tuned", value, BoundInputs{eta, num_actions, n, std::nullopt, feature_coverage, true}};
}

// Plug-in value of the naive importance-weighting bound
//   log K / eta + eta sum_t sum_a pi_t(a) / pi_B(a)
// accumulated along one run. It depends on the random pi_t, so it is a
// per-run diagnostic only, not a certified bound.
class NaiveExp3Diagnostic {
 public:
  NaiveExp3Diagnostic(double eta, std::size_t num_actions) : eta_(eta), num_actions_(num_actions) {}

  void add(const Policy& learner_policy, const Policy& behavior) {
    sum_ += coverage_ratio(learner_policy, behavior);
  }

  double value() const {
    return std::log(static_cast<double>(num_actions_)) / eta_ + eta_ * sum_;
  }

 private:
  double eta_;
  std::size_t num_actions_;
  double sum_ = 0.0;
};

}  // namespace offband
