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
#include <complex>
#include <numbers>
#include <vector>

#include "offband/environments.hpp"
#include "offband/metrics.hpp"
#include "offband/rng.hpp"
#include "offband/verify.hpp"

namespace offband {
namespace {

constexpr double kE = std::numbers::e;

Policy random_full_support(RngStream& rng, std::size_t k) {
  std::vector<double> w(k);
  for (auto& v : w) v = 0.01 + rng.uniform();
  return policy_from_weights(w);
}

TEST(RegretTrajectory, Examples) {
  RegretTrajectory same(Policy::uniform(3), "x");
  for (int t = 0; t < 10; ++t) same.accumulate(Policy::uniform(3), RewardVector(std::vector<double>{0.3, 0.9, 0.1}));
  EXPECT_EQ(same.total(), 0.0);

  RegretTrajectory dirac(Policy::dirac(2, ActionId{0}), "x");
  dirac = accumulate_regret(dirac, Policy::uniform(2), RewardVector(std::vector<double>{1, 0}));
  EXPECT_DOUBLE_EQ(dirac.total(), 0.5);

  RegretTrajectory constant(Policy::dirac(3, ActionId{2}), "x");
  constant.accumulate(Policy(std::vector<double>{0.2, 0.5, 0.3}), RewardVector(std::vector<double>{0.4, 0.4, 0.4}));
  EXPECT_NEAR(constant.total(), 0.0, 1e-15);
}

TEST(RegretTrajectory, IncrementsBounded) {
  RngStream rng(2);
  RegretTrajectory traj(random_full_support(rng, 6), "x");
  for (int t = 0; t < 5000; ++t) {
    std::vector<double> r(6);
    for (auto& v : r) v = rng.uniform() < 0.3 ? 1.0 : rng.uniform();
    traj.accumulate(random_full_support(rng, 6), RewardVector(r));
  }
  double prev = 0.0;
  for (double c : traj.cumulative()) {
    ASSERT_LE(std::abs(c - prev), 1.0);
    prev = c;
  }
}

TEST(CoverageRatio, Examples) {
  EXPECT_DOUBLE_EQ(coverage_ratio(Policy::uniform(4), Policy::uniform(4)), 4.0);
  EXPECT_NEAR(coverage_ratio(Policy::dirac(3, ActionId{0}), Policy(std::vector<double>{0.1, 0.45, 0.45})), 10.0,
              1e-12);
  EXPECT_TRUE(std::isinf(coverage_ratio(Policy::uniform(2), Policy::dirac(2, ActionId{0}))));
  EXPECT_DOUBLE_EQ(coverage_ratio(Policy::dirac(2, ActionId{0}), Policy::dirac(2, ActionId{0})), 1.0);
}

TEST(CoverageRatio, SelfCoverageIsK) {
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 99);
    const Policy p = random_full_support(rng, k);
    EXPECT_NEAR(coverage_ratio(p, p), static_cast<double>(k), 1e-9 * static_cast<double>(k));
  }
}

TEST(FeatureCoverage, Examples) {
  const auto two = make_covariance(2.0 * Eigen::MatrixXd::Identity(3, 3), "b");
  const auto one = make_covariance(Eigen::MatrixXd::Identity(3, 3), "c");
  const auto zero = make_covariance(Eigen::MatrixXd::Zero(3, 3), "z");
  EXPECT_NEAR(feature_coverage_ratio(two, one), 1.5, 1e-15);
  EXPECT_EQ(feature_coverage_ratio(two, zero), 0.0);
  EXPECT_NEAR(feature_coverage_ratio(one, one), 3.0, 1e-15);
}

TEST(FeatureCoverage, EqualsEigenvalueSum) {
  const LinearEnv env = verify::reference_linear_env(4);
  RngStream rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    ContextPolicy b, c;
    for (std::size_t x = 0; x < 4; ++x) {
      b.push_back(random_full_support(rng, 3));
      c.push_back(policy_from_weights(std::vector<double>{rng.uniform(), rng.uniform(), rng.uniform()}));
    }
    const auto vb = compute_vbar(env, b), vc = compute_vbar(env, c);
    const Eigen::MatrixXd product = vb.matrix.inverse() * vc.matrix;
    const Eigen::VectorXcd eig = product.eigenvalues();
    EXPECT_NEAR(feature_coverage_ratio(vb, vc), eig.real().sum(), 1e-8);
    EXPECT_NEAR(feature_coverage_ratio(vb, vb), 3.0, 1e-10);
  }
}

TEST(BoundThm1Full, Examples) {
  const Policy star(std::vector<double>{1, 0}), half = Policy::uniform(2);
  EXPECT_NEAR(bound_thm1_full(1.0, {{1, 1}}, star, half).value, std::log(2.0) + 0.5, 1e-15);
  EXPECT_NEAR(bound_thm1_full(1.0, {{1, 1}}, star, half).value, 1.19315, 5e-6);
  EXPECT_NEAR(bound_thm1_full(0.3, {{0, 0}, {0, 0}}, star, half).value, std::log(2.0) / 0.3, 1e-15);

  const Policy u = Policy::uniform(5);
  const double eta = 0.2;
  const std::uint64_t n = 37;
  const double closed = std::log(5.0) / eta + eta * n / 2 * 5 * (0.2 / (0.2 + eta / 2));
  std::vector<std::vector<double>> ones(n, std::vector<double>(5, 1.0));
  EXPECT_NEAR(bound_thm1_full(eta, ones, u, u).value, closed, 1e-12);
  EXPECT_NEAR(bound_thm1_full(eta, n, u, u).value, closed, 1e-12);
}

TEST(BoundThm1Full, WorstCaseDominates) {
  RngStream rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 10);
    const Policy star = random_full_support(rng, k), behavior = random_full_support(rng, k);
    const std::uint64_t n = 1 + static_cast<std::uint64_t>(rng.uniform() * 50);
    std::vector<std::vector<double>> table(n, std::vector<double>(k));
    for (auto& row : table)
      for (auto& v : row) v = rng.uniform();
    const double eta = 0.01 + rng.uniform();
    EXPECT_LE(bound_thm1_full(eta, table, star, behavior).value, bound_thm1_full(eta, n, star, behavior).value);
  }
}

TEST(BoundThm1, UniformAndTunedExamples) {
  EXPECT_NEAR(bound_thm1_uniform(kE, 100, 2.0).value, 20.0, 1e-12);
  EXPECT_NEAR(bound_thm1_tuned(kE, 100, 2.0).value, 20.0, 1e-12);
  EXPECT_NEAR(bound_thm1_uniform(4, 400, 4.0).value, std::sqrt(400 * std::log(4.0)) * 3.0, 1e-12);
  EXPECT_NEAR(bound_thm1_uniform(4, 400, 4.0).value, 70.64, 5e-3);
  EXPECT_TRUE(std::isinf(bound_thm1_uniform(4, 400, kInfinity).value));
  EXPECT_TRUE(std::isinf(bound_thm1_tuned(4, 400, kInfinity).value));
}

TEST(BoundThm1, TunedIsTheOptimum) {
  for (double c : {1.0, 2.0, 5.0, 17.5, 100.0}) {
    const double k = 100, n = 10000;
    auto worst_case = [&](double eta) { return std::log(k) / eta + eta * n * c / 2.0; };
    double best = kInfinity;
    for (int i = 1; i <= 10000; ++i) best = std::min(best, worst_case(1e-5 * i));
    const double closed = bound_thm1_tuned(k, 10000, c).value;
    EXPECT_GE(best, closed * (1 - 1e-6));
    EXPECT_LE(best, closed * (1 + 1e-3));
    EXPECT_NEAR(worst_case(bound_thm1_tuned(k, 10000, c).inputs.eta), closed, 1e-9 * closed);
  }
}

TEST(BoundThm2, Examples) {
  const double eta = 0.05;
  EXPECT_NEAR(bound_thm2_explicit(10, 1000, 0.0, eta).value, (16 + std::log(10.0)) / eta + 2, 1e-12);
  const double n = 1e4, k = 10, c = 5;
  const double e = std::sqrt(std::log(k) / n);
  const double first = (16 + std::log(k)) / e;
  const double middle = (e * n / 2 + 2 * std::sqrt(n * std::log(k * n))) * c;
  EXPECT_NEAR(bound_thm2_explicit(10, 10000, 5.0).value, first + middle + 2, 1e-9);
  EXPECT_NEAR(bound_thm2_explicit(10, 10000, 5.0).inputs.eta, e, 1e-15);
  EXPECT_TRUE(std::isinf(bound_thm2_explicit(10, 10000, kInfinity).value));
}

TEST(BoundThm3, Examples) {
  EXPECT_NEAR(bound_thm3(0.3, 7, 50, 0.0).value, std::log(7.0) / 0.3, 1e-15);
  EXPECT_NEAR(bound_thm3(0.1, 4, 100, 2.0).value, 33.8629, 5e-5);
  for (double cphi : {0.5, 3.0, 40.0}) {
    const double eta = std::sqrt(std::log(4.0) / (cphi * 100));
    EXPECT_NEAR(bound_thm3(eta, 4, 100, cphi).value, 2 * std::sqrt(cphi * 100 * std::log(4.0)), 1e-10);
    EXPECT_NEAR(bound_thm3_tuned(4, 100, cphi).value, 2 * std::sqrt(cphi * 100 * std::log(4.0)), 1e-10);
    EXPECT_NEAR(bound_thm3_uniform(4, 100, cphi).value, std::sqrt(100 * std::log(4.0)) * (1 + cphi), 1e-10);
  }
  EXPECT_THROW(bound_thm3(0.0, 4, 100, 1.0), Error);
}

TEST(NaiveExp3Diagnostic, Accumulates) {
  NaiveExp3Diagnostic d(0.5, 4);
  d.add(Policy::uniform(4), Policy::uniform(4));
  d.add(Policy::dirac(4, ActionId{0}), Policy(std::vector<double>{0.1, 0.3, 0.3, 0.3}));
  EXPECT_NEAR(d.value(), std::log(4.0) / 0.5 + 0.5 * (4 + 10), 1e-12);
}

}  // namespace
}  // namespace offband
