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


#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "offband/estimators.hpp"
#include "offband/rng.hpp"
#include "offband/verify.hpp"

namespace offband {
namespace {

Observation obs_at(std::size_t action, double reward, std::size_t round = 1) {
  return Observation{ActionId{action}, reward, round};
}

TEST(IxEstimate, Examples) {
  const Policy half(std::vector<double>{0.5, 0.5});
  const auto ips = ix_estimate(obs_at(0, 1.0), half, 0.0);
  EXPECT_DOUBLE_EQ(ips.at(ActionId{0}), 2.0);
  EXPECT_DOUBLE_EQ(ips.at(ActionId{1}), 0.0);

  const Policy quarter(std::vector<double>{0.25, 0.75});
  EXPECT_NEAR(ix_estimate(obs_at(0, 0.8), quarter, 0.05).at(ActionId{0}), 0.8 / 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(ix_estimate(obs_at(1, 0.0), quarter, 0.3).at(ActionId{1}), 0.0);
}

TEST(IxEstimate, Errors) {
  const Policy p(std::vector<double>{1.0, 0.0});
  try {
    ix_estimate(obs_at(1, 1.0), p, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDenominator);
  }
  EXPECT_NO_THROW(ix_estimate(obs_at(1, 1.0), p, 0.1));
  EXPECT_THROW(ix_estimate(obs_at(0, 1.0), p, -0.1), Error);
}

TEST(IxEstimate, NonNegativeAndBoundedByInverseGamma) {
  RngStream rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double pb = 0.001 + rng.uniform();
    const Policy p(std::vector<double>{pb / (1 + pb), 1 / (1 + pb)});
    const double gamma = 0.01 + rng.uniform();
    const double value = ix_estimate(obs_at(0, rng.uniform()), p, gamma).value;
    ASSERT_GE(value, 0.0);
    ASSERT_LE(value, 1.0 / gamma);
  }
}

TEST(PluginBehaviorEstimate, Frequencies) {
  PluginBehaviorEstimate s(3);
  for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(s.estimate(ActionId{a}), 0.0);
  s = plugin_update(s, ActionId{0});
  s = plugin_update(s, ActionId{0});
  s = plugin_update(s, ActionId{2});
  EXPECT_DOUBLE_EQ(s.estimate(ActionId{0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.estimate(ActionId{2}), 1.0 / 3.0);
  EXPECT_EQ(s.rounds_seen(), 3u);
  std::uint64_t total = 0;
  for (auto c : s.counts()) total += c;
  EXPECT_EQ(total, s.rounds_seen());
}

TEST(PluginBehaviorEstimate, ConvergesToBehavior) {
  const Policy behavior(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  RngStream rng(17);
  PluginBehaviorEstimate s(4);
  for (int i = 0; i < 100000; ++i) s.observe(sample_action(behavior, rng));
  EXPECT_LT(s.max_abs_deviation(behavior), 0.01);
}

TEST(IxEstimatePlugin, Examples) {
  const IxGammaSchedule schedule(0.1, BehaviorMode::kPlugin, 10);
  const PluginBehaviorEstimate empty(10);
  EXPECT_NEAR(ix_estimate_plugin(obs_at(4, 1.0), empty, schedule.gamma_at(1)).value, 1.0 / 1.05, 1e-12);

  PluginBehaviorEstimate half(2);
  half.observe(ActionId{0});
  half.observe(ActionId{1});
  EXPECT_NEAR(ix_estimate_plugin(obs_at(0, 1.0), half, 0.1).value, 1.0 / 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(ix_estimate_plugin(obs_at(0, 0.0), half, 0.1).value, 0.0);
  try {
    ix_estimate_plugin(obs_at(0, 1.0), half, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveGamma);
  }
}

TEST(IxGammaSchedule, Known) {
  const IxGammaSchedule s(0.2, BehaviorMode::kKnown, 7);
  for (std::uint64_t t : {1u, 2u, 100u, 100000u}) EXPECT_DOUBLE_EQ(gamma_at(s, t), 0.1);
}

TEST(IxGammaSchedule, Plugin) {
  const IxGammaSchedule s(0.1, BehaviorMode::kPlugin, 10);
  EXPECT_DOUBLE_EQ(s.gamma_at(1), 1.05);
  EXPECT_DOUBLE_EQ(s.epsilon_at(1), 1.0);
  EXPECT_DOUBLE_EQ(s.delta_at(1), 0.0);
  EXPECT_NEAR(s.gamma_at(3), 0.05 + std::sqrt(std::log(40.0) / 4.0), 1e-12);
  EXPECT_NEAR(s.gamma_at(3), 1.01032, 5e-6);
  for (std::uint64_t t = 2; t < 2000; t += 37) {
    const double past = static_cast<double>(t - 1);
    const double delta = 1.0 / (past * past);
    EXPECT_NEAR(s.delta_at(t), delta, 1e-15);
    // eps_t is the Hoeffding radius sqrt(log(K / delta_t) / (2 (t - 1))).
    EXPECT_NEAR(s.epsilon_at(t), std::sqrt(std::log(10.0 / delta) / (2 * past)), 1e-12);
    EXPECT_NEAR(s.gamma_at(t) - 0.05, s.epsilon_at(t), 1e-12);
  }
  EXPECT_THROW(s.gamma_at(0), Error);
  EXPECT_THROW(IxGammaSchedule(0.0, BehaviorMode::kKnown, 3), Error);
}

TEST(LinearThetaEstimate, Examples) {
  const Eigen::Vector3d e1(1, 0, 0), e2(0, 1, 0);
  EXPECT_TRUE(linear_theta_estimate(Eigen::Matrix3d::Identity(), e1, 1.0).isApprox(Eigen::VectorXd(e1)));
  EXPECT_TRUE(linear_theta_estimate(0.5 * Eigen::Matrix3d::Identity(), e2, 1.0).isApprox(Eigen::VectorXd(0.5 * e2)));
  const Eigen::Matrix3d any = Eigen::Matrix3d::Random();
  EXPECT_EQ(linear_theta_estimate(any, Eigen::Vector3d(1, 2, 3), 0.0).squaredNorm(), 0.0);
  try {
    linear_theta_estimate(Eigen::Matrix2d::Identity(), e1, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(IxProdInequality, Examples) {
  EXPECT_EQ(ix_prod_inequality_gap(0.7, 0, 0.3, 0.4), 0.0);
  const double lhs = 1.0 / 0.75;
  const double rhs = 2.0 * std::log(2.0);
  EXPECT_NEAR(ix_prod_inequality_gap(1.0, 1, 0.5, 0.25), rhs - lhs, 1e-12);
  EXPECT_NEAR(ix_prod_inequality_gap(1.0, 1, 0.5, 0.25), 0.05296, 1e-5);
}

TEST(IxProdInequality, GridSweep) {
  double worst = 1.0;
  for (int i = 0; i <= 50; ++i) {
    for (int j = 1; j <= 50; ++j) {
      for (int k = 1; k <= 50; ++k) {
        const double r = i / 50.0, pb = 0.001 + (1 - 0.001) * j / 50.0, gamma = 2.0 * k / 50.0;
        worst = std::min(worst, ix_prod_inequality_gap(r, 1, pb, gamma));
      }
    }
  }
  EXPECT_GE(worst, -1e-12);
}

TEST(EstimatorProperties, RandomizedSuites) {
  for (const char* name : {"ix-inequality", "pessimism", "plugin-concentration", "linprod-unbiased"}) {
    const auto result = verify::run_suite(name);
    EXPECT_TRUE(result.passed) << name << ": " << result.detail;
  }
}

}  // namespace
}  // namespace offband
