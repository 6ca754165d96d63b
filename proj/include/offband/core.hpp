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

#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace offband {

enum class ErrorCode {
  kAllZeroWeights,
  kNonFiniteWeight,
  kInvalidPolicy,
  kInvalidReward,
  kZeroDenominator,
  kNonPositiveGamma,
  kDimensionMismatch,
  kProdFactorNonPositive,
  kUnknownContext,
  kMissingCoverage,
  kRoundOutOfRange,
  kSingularCovariance,
  kInvalidArgument,
  kConfig,
  kIo,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllZeroWeights: return "AllZeroWeights";
    case ErrorCode::kNonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kInvalidReward: return "InvalidReward";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kNonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kProdFactorNonPositive: return "ProdFactorNonPositive";
    case ErrorCode::kUnknownContext: return "UnknownContext";
    case ErrorCode::kMissingCoverage: return "MissingCoverage";
    case ErrorCode::kRoundOutOfRange: return "RoundOutOfRange";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception type; code()
// identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

struct ActionId {
  std::size_t index = 0;

  friend auto operator<=>(const ActionId&, const ActionId&) = default;
};

// A probability vector over K actions. Construction validates and
// renormalizes, so every live Policy sums to one.
class Policy {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Policy(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw Error(ErrorCode::kInvalidPolicy, "policy needs at least one action");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(ErrorCode::kInvalidPolicy,
                    "probabilities must be finite and non-negative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::kInvalidPolicy,
                  "probabilities sum to " + std::to_string(total));
    }
    for (double& p : probs_) p /= total;
  }

  static Policy uniform(std::size_t num_actions) {
    return Policy(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)));
  }

  static Policy dirac(std::size_t num_actions, ActionId action) {
    if (action.index >= num_actions) {
      throw Error(ErrorCode::kInvalidArgument, "dirac action out of range");
    }
    std::vector<double> probs(num_actions, 0.0);
    probs[action.index] = 1.0;
    return Policy(std::move(probs));
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double operator()(ActionId a) const { return probs_.at(a.index); }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<double> probs_;
};

// Realized rewards of every arm for one round, each in [0, 1].
class RewardVector {
 public:
  explicit RewardVector(std::vector<double> rewards) : rewards_(std::move(rewards)) {
    for (double r : rewards_) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw Error(ErrorCode::kInvalidReward, "reward outside [0, 1]");
      }
    }
  }

  std::size_t size() const noexcept { return rewards_.size(); }
  double operator[](std::size_t i) const { return rewards_[i]; }
  double operator()(ActionId a) const { return rewards_.at(a.index); }
  std::span<const double> values() const noexcept { return rewards_; }

 private:
  std::vector<double> rewards_;
};

// What the learner sees in round t: the behavior policy's action and reward.
struct Observation {
  ActionId behavior_action;
  double behavior_reward = 0.0;
  std::size_t round = 1;
};

inline Observation observe(const RewardVector& rewards, ActionId behavior_action,
                           std::size_t round) {
  return Observation{behavior_action, rewards(behavior_action), round};
}

inline Policy policy_from_weights(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kNonFiniteWeight, "weight is NaN or infinite");
    if (w < 0.0) throw Error(ErrorCode::kInvalidArgument, "weight is negative");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kAllZeroWeights, "every weight is zero");
  std::vector<double> probs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / total;
  return Policy(std::move(probs));
}

inline double inner_product(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner product of unequal lengths");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace offband
