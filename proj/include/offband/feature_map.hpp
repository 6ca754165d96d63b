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
#include <vector>

#include "offband/core.hpp"

namespace offband {

// Table of feature vectors phi(x, a) over a finite context set.
class FeatureMap {
 public:
  FeatureMap() = default;

  FeatureMap(std::size_t num_contexts, std::size_t num_actions, std::size_t dim)
      : num_contexts_(num_contexts),
        num_actions_(num_actions),
        dim_(dim),
        features_(num_contexts * num_actions, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))) {}

  std::size_t num_contexts() const noexcept { return num_contexts_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::size_t dim() const noexcept { return dim_; }

  const Eigen::VectorXd& operator()(std::size_t context, std::size_t action) const {
    return features_.at(index(context, action));
  }

  void set(std::size_t context, std::size_t action, Eigen::VectorXd phi) {
    if (static_cast<std::size_t>(phi.size()) != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "feature has wrong dimension");
    }
    for (double v : phi) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "feature is not finite");
    }
    features_.at(index(context, action)) = std::move(phi);
  }

  double max_squared_norm() const {
    double best = 0.0;
    for (const auto& phi : features_) best = std::max(best, phi.squaredNorm());
    return best;
  }

 private:
  std::size_t index(std::size_t context, std::size_t action) const {
    if (context >= num_contexts_) throw Error(ErrorCode::kUnknownContext, "context index out of range");
    if (action >= num_actions_) throw Error(ErrorCode::kInvalidArgument, "action index out of range");
    return context * num_actions_ + action;
  }

  std::size_t num_contexts_ = 0;
  std::size_t num_actions_ = 0;
  std::size_t dim_ = 0;
  std::vector<Eigen::VectorXd> features_;
};

}  // namespace offband
