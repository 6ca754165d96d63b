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
#include <utility>
#include <variant>
#include <vector>

#include "offband/core.hpp"
#include "offband/feature_map.hpp"
#include "offband/rng.hpp"

namespace offband {

// Bernoulli arms with mean 0.5, except that the last arm has mean 0.8 for
// rounds t <= floor(n / 2) and the first arm has mean 1.0 afterwards.
class PiecewiseBernoulliEnv {
 public:
  static constexpr double kBaseMean = 0.5;
  static constexpr double kFirstHalfBoost = 0.8;
  static constexpr double kSecondHalfBoost = 1.0;

  PiecewiseBernoulliEnv(std::size_t num_actions, std::uint64_t horizon)
      : num_actions_(num_actions), horizon_(horizon) {
    if (num_actions < 2) throw Error(ErrorCode::kInvalidArgument, "piecewise environment needs K >= 2");
  }

  std::size_t num_actions() const noexcept { return num_actions_; }
  std::uint64_t horizon() const noexcept { return horizon_; }
  std::uint64_t switch_round() const noexcept { return horizon_ / 2; }
  ActionId boosted_arm_first_half() const noexcept { return ActionId{num_actions_ - 1}; }
  ActionId boosted_arm_second_half() const noexcept { return ActionId{0}; }

  double mean(std::uint64_t t, ActionId a) const {
    check_round(t);
    if (t <= switch_round()) {
      return a == boosted_arm_first_half() ? kFirstHalfBoost : kBaseMean;
    }
    return a == boosted_arm_second_half() ? kSecondHalfBoost : kBaseMean;
  }

  std::vector<double> means(std::uint64_t t) const {
    std::vector<double> out(num_actions_);
    for (std::size_t a = 0; a < num_actions_; ++a) out[a] = mean(t, ActionId{a});
    return out;
  }

  // Draws every arm, K uniforms per call.
  RewardVector draw(std::uint64_t t, RngStream& rng) const {
    std::vector<double> rewards(num_actions_);
    for (std::size_t a = 0; a < num_actions_; ++a) {
      rewards[a] = rng.bernoulli(mean(t, ActionId{a})) ? 1.0 : 0.0;
    }
    return RewardVector(std::move(rewards));
  }

 private:
  void check_round(std::uint64_t t) const {
    if (t < 1 || t > horizon_) {
      throw Error(ErrorCode::kRoundOutOfRange, "round " + std::to_string(t) + " outside [1, " +
                                                   std::to_string(horizon_) + "]");
    }
  }

  std::size_t num_actions_;
  std::uint64_t horizon_;
};

// Oblivious adversary replaying a fixed n x K reward table.
class ScriptedEnv {
 public:
  explicit ScriptedEnv(std::vector<std::vector<double>> reward_table) : table_(std::move(reward_table)) {
    if (table_.empty() || table_.front().empty()) {
      throw Error(ErrorCode::kInvalidArgument, "reward table must be non-empty");
    }
    for (const auto& row : table_) {
      if (row.size() != table_.front().size()) {
        throw Error(ErrorCode::kDimensionMismatch, "reward table rows differ in length");
      }
      for (double r : row) {
        if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::kInvalidReward, "reward table entry outside [0, 1]");
      }
    }
  }

  std::size_t num_actions() const noexcept { return table_.front().size(); }
  std::uint64_t horizon() const noexcept { return table_.size(); }
  const std::vector<std::vector<double>>& table() const noexcept { return table_; }

  RewardVector draw(std::uint64_t t, RngStream& /*rng*/) const {
    if (t < 1 || t > horizon()) {
      throw Error(ErrorCode::kRoundOutOfRange, "round " + std::to_string(t) + " outside the reward table");
    }
    return RewardVector(table_[t - 1]);
  }

 private:
  std::vector<std::vector<double>> table_;
};

using RewardProcess = std::variant<PiecewiseBernoulliEnv, ScriptedEnv>;

inline RewardVector draw_reward_vector(const RewardProcess& env, std::uint64_t t, RngStream& rng) {
  return std::visit([&](const auto& e) { return e.draw(t, rng); }, env);
}

inline std::size_t num_actions(const RewardProcess& env) {
  return std::visit([](const auto& e) { return e.num_actions(); }, env);
}

inline std::uint64_t horizon(const RewardProcess& env) {
  return std::visit([](const auto& e) { return e.horizon(); }, env);
}

// pi_{B,alpha}(i) proportional to (1 - alpha) i / K + alpha (1 - (i - 1) / K)
// for 1-based arm index i = 1..K. alpha = 0.5 is uniform; alpha -> 1 moves
// mass to the first arm, alpha -> 0 to the last.
inline Policy behavior_alpha_policy(double alpha, std::size_t num_actions) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  if (num_actions < 2) throw Error(ErrorCode::kInvalidArgument, "K must be at least 2");
  const double k = static_cast<double>(num_actions);
  std::vector<double> weights(num_actions);
  for (std::size_t a = 0; a < num_actions; ++a) {
    const double i = static_cast<double>(a + 1);
    weights[a] = (1.0 - alpha) * i / k + alpha * (1.0 - (i - 1.0) / k);
  }
  return policy_from_weights(weights);
}

// A policy per context.
using ContextPolicy = std::vector<Policy>;

inline ContextPolicy same_policy_everywhere(const Policy& policy, std::size_t num_contexts) {
  return ContextPolicy(num_contexts, policy);
}

// Finite-context linear environment: r_t(x, a) = <theta_t, phi(x, a)>,
// contexts drawn i.i.d. from context_probs.
class LinearEnv {
 public:
  static constexpr double kRewardTolerance = 1e-12;

  LinearEnv(std::vector<std::string> contexts, Policy context_probs, FeatureMap features,
            std::vector<Eigen::VectorXd> theta_sequence)
      : contexts_(std::move(contexts)),
        context_probs_(std::move(context_probs)),
        features_(std::move(features)),
        thetas_(std::move(theta_sequence)) {
    if (contexts_.size() != context_probs_.size() || contexts_.size() != features_.num_contexts()) {
      throw Error(ErrorCode::kDimensionMismatch, "contexts, context_probs and features disagree on |X|");
    }
    if (thetas_.empty()) throw Error(ErrorCode::kInvalidArgument, "theta_sequence is empty");
    for (std::size_t t = 0; t < thetas_.size(); ++t) {
      if (static_cast<std::size_t>(thetas_[t].size()) != features_.dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "theta_" + std::to_string(t + 1) + " has the wrong dimension");
      }
      for (std::size_t x = 0; x < num_contexts(); ++x) {
        for (std::size_t a = 0; a < num_actions(); ++a) {
          const double r = thetas_[t].dot(features_(x, a));
          if (!(r >= -kRewardTolerance && r <= 1.0 + kRewardTolerance)) {
            throw Error(ErrorCode::kInvalidReward, "<theta_" + std::to_string(t + 1) + ", phi(" +
                                                       std::to_string(x) + ", " + std::to_string(a) +
                                                       ")> = " + std::to_string(r) + " is outside [0, 1]");
          }
        }
      }
    }
  }

  std::size_t num_contexts() const noexcept { return contexts_.size(); }
  std::size_t num_actions() const noexcept { return features_.num_actions(); }
  std::size_t dim() const noexcept { return features_.dim(); }
  std::uint64_t horizon() const noexcept { return thetas_.size(); }
  const std::vector<std::string>& contexts() const noexcept { return contexts_; }
  const Policy& context_probs() const noexcept { return context_probs_; }
  const FeatureMap& features() const noexcept { return features_; }
  const std::vector<Eigen::VectorXd>& theta_sequence() const noexcept { return thetas_; }

  std::size_t context_index(const std::string& name) const {
    const auto it = std::find(contexts_.begin(), contexts_.end(), name);
    if (it == contexts_.end()) throw Error(ErrorCode::kUnknownContext, "unknown context '" + name + "'");
    return static_cast<std::size_t>(it - contexts_.begin());
  }

  const Eigen::VectorXd& theta(std::uint64_t t) const {
    if (t < 1 || t > horizon()) {
      throw Error(ErrorCode::kRoundOutOfRange, "round " + std::to_string(t) + " outside the theta sequence");
    }
    return thetas_[t - 1];
  }

  double reward(std::uint64_t t, std::size_t context, std::size_t action) const {
    return std::clamp(theta(t).dot(features_(context, action)), 0.0, 1.0);
  }

  RewardVector rewards(std::uint64_t t, std::size_t context) const {
    std::vector<double> out(num_actions());
    for (std::size_t a = 0; a < num_actions(); ++a) out[a] = reward(t, context, a);
    return RewardVector(std::move(out));
  }

  std::size_t draw_context(RngStream& rng) const { return sample_action(context_probs_, rng).index; }

 private:
  std::vector<std::string> contexts_;
  Policy context_probs_;
  FeatureMap features_;
  std::vector<Eigen::VectorXd> thetas_;
};

struct CovarianceMatrix {
  Eigen::MatrixXd matrix;
  double min_eigenvalue = 0.0;
  std::string policy_label;
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kEigenvalueTolerance = 1e-10;
inline constexpr double kDefaultEigFloor = 1e-8;

inline CovarianceMatrix make_covariance(Eigen::MatrixXd matrix, std::string label) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::kDimensionMismatch, "covariance must be square");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "covariance is not symmetric");
  }
  matrix = 0.5 * (matrix + matrix.transpose());
  double min_eig = 0.0;
  if (matrix.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    min_eig = solver.eigenvalues().minCoeff();
  }
  if (min_eig < -kEigenvalueTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "covariance has a negative eigenvalue");
  }
  // Rounding noise below zero is reported as an exact zero.
  return CovarianceMatrix{std::move(matrix), std::max(min_eig, 0.0), std::move(label)};
}

// V(pi) = sum_x p(x) sum_a pi(a | x) phi(x, a) phi(x, a)^T, summed exactly.
inline CovarianceMatrix compute_vbar(const Policy& context_probs, const FeatureMap& features,
                                     const ContextPolicy& policy, std::string label = "") {
  if (policy.size() != features.num_contexts() || context_probs.size() != features.num_contexts()) {
    throw Error(ErrorCode::kDimensionMismatch, "policy must be defined for every context");
  }
  const auto d = static_cast<Eigen::Index>(features.dim());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t x = 0; x < features.num_contexts(); ++x) {
    if (policy[x].size() != features.num_actions()) {
      throw Error(ErrorCode::kDimensionMismatch, "policy has the wrong number of actions");
    }
    for (std::size_t a = 0; a < features.num_actions(); ++a) {
      const double w = context_probs[x] * policy[x][a];
      if (w == 0.0) continue;
      const Eigen::VectorXd& phi = features(x, a);
      v.noalias() += w * phi * phi.transpose();
    }
  }
  return make_covariance(std::move(v), std::move(label));
}

inline CovarianceMatrix compute_vbar(const LinearEnv& env, const ContextPolicy& policy, std::string label = "") {
  return compute_vbar(env.context_probs(), env.features(), policy, std::move(label));
}

inline Eigen::MatrixXd invert_vbar(const CovarianceMatrix& vbar, double eig_floor = kDefaultEigFloor) {
  if (!(vbar.min_eigenvalue >= eig_floor)) {
    throw Error(ErrorCode::kSingularCovariance,
                "lambda_min = " + std::to_string(vbar.min_eigenvalue) + " is below the floor " +
                    std::to_string(eig_floor) + "; the behavior policy does not cover the feature space");
  }
  const auto d = vbar.matrix.rows();
  Eigen::MatrixXd inverse = vbar.matrix.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  inverse = 0.5 * (inverse + inverse.transpose());
  const double residual = (vbar.matrix * inverse - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-8)) {
    throw Error(ErrorCode::kSingularCovariance, "inverse residual " + std::to_string(residual) + " exceeds 1e-8");
  }
  return inverse;
}

// lambda_min(V(pi_B)) >= 2 eta max_{x,a} |phi(x, a)|^2.
inline bool check_stepsize_condition(const CovarianceMatrix& vbar, const FeatureMap& features, double eta) {
  return vbar.min_eigenvalue >= 2.0 * eta * features.max_squared_norm();
}

inline bool check_stepsize_condition(const CovarianceMatrix& vbar, const LinearEnv& env, double eta) {
  return check_stepsize_condition(vbar, env.features(), eta);
}

}  // namespace offband
