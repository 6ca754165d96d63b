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

#include <cmath>
#include <string>
#include <vector>

#include "offband/harness.hpp"
#include "offband/results_io.hpp"
#include "offband/verify.hpp"
#include "test_fixtures.hpp"

namespace offband {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.num_actions = 10;
  c.n = 300;
  c.runs = 8;
  c.alpha_grid = {0.0, 0.5, 0.9};
  c.algorithms = {Algorithm::kExp3, Algorithm::kExp3IX, Algorithm::kExp3IXPlugin};
  c.thin = 7;
  c.base_seed = 5;
  return c;
}

TEST(RunEpisode, ZeroRounds) {
  ExperimentConfig c = small_config();
  c.n = 0;
  const RunRecord r = run_episode(c, 0.5, Algorithm::kExp3IX, 0);
  EXPECT_EQ(r.final_regret, 0.0);
  EXPECT_TRUE(r.trajectory.empty());
}

TEST(RunEpisode, MatchingComparatorHasNoRegretInRoundOne) {
  ExperimentConfig c;
  c.num_actions = 4;
  c.n = 5;
  c.runs = 1;
  c.alpha_grid = {0.5};
  c.comparator = std::vector<double>{0.25, 0.25, 0.25, 0.25};
  c.env = ScriptedEnv(std::vector<std::vector<double>>(5, {0.3, 0.3, 0.3, 0.3}));
  c.thin = 1;
  for (Algorithm a : {Algorithm::kExp3, Algorithm::kExp3IX, Algorithm::kExp3IXPlugin}) {
    const RunRecord r = run_episode(c, 0.5, a, 0);
    ASSERT_EQ(r.trajectory.size(), 5u);
    EXPECT_EQ(r.trajectory[0].second, 0.0);
    EXPECT_NEAR(r.final_regret, 0.0, 1e-15);
  }
}

TEST(RunEpisode, DefaultStudySmoke) {
  ExperimentConfig c;
  c.n = 1000;
  c.thin = 1;
  const RunRecord r = run_episode(c, 0.9, Algorithm::kExp3IX, 0);
  ASSERT_EQ(r.trajectory.size(), 1000u);
  EXPECT_TRUE(std::isfinite(r.final_regret));
  EXPECT_EQ(r.final_regret, r.trajectory.back().second);
  EXPECT_EQ(r.trajectory.back().first, 1000u);
  const Policy behavior = behavior_alpha_policy(0.9, 100);
  EXPECT_NEAR(r.eta, std::sqrt(std::log(100.0) / 1000.0), 1e-15);
  EXPECT_LE(r.final_regret, bound_thm1_full(r.eta, 1000, c.comparator_policy(), behavior).value);
  ASSERT_TRUE(r.naive_exp3_bound.has_value());
  EXPECT_GT(*r.naive_exp3_bound, std::log(100.0) / r.eta);
}

TEST(RunEpisode, ThinningKeepsLastRound) {
  const ExperimentConfig c = small_config();
  const RunRecord r = run_episode(c, 0.5, Algorithm::kExp3, 1);
  ASSERT_FALSE(r.trajectory.empty());
  EXPECT_EQ(r.trajectory.front().first, 7u);
  EXPECT_EQ(r.trajectory.back().first, 300u);
  EXPECT_EQ(r.trajectory.back().second, r.final_regret);
  EXPECT_EQ(r.trajectory.size(), 300u / 7u + 1u);
}

TEST(RunEpisode, Deterministic) {
  const ExperimentConfig c = small_config();
  const RunRecord a = run_episode(c, 0.9, Algorithm::kExp3IXPlugin, 3);
  const RunRecord b = run_episode(c, 0.9, Algorithm::kExp3IXPlugin, 3);
  EXPECT_EQ(a.final_regret, b.final_regret);
  EXPECT_EQ(a.trajectory, b.trajectory);
}

// Learner state must not depend on rewards other than R^B_t: replaying the
// run on a table that agrees with the original only at (t, A^B_t) must give
// bit-identical learner policies in every round.
TEST(RunEpisode, LearnerIgnoresUnobservedRewards) {
  constexpr std::size_t kArms = 6;
  constexpr std::uint64_t kRounds = 400;
  RngStream table_rng(77);
  std::vector<std::vector<double>> original(kRounds, std::vector<double>(kArms));
  for (auto& row : original)
    for (auto& v : row) v = table_rng.uniform();

  ExperimentConfig c;
  c.num_actions = kArms;
  c.n = kRounds;
  c.runs = 1;
  c.alpha_grid = {0.8};
  c.env = ScriptedEnv(original);

  for (Algorithm algorithm : {Algorithm::kExp3, Algorithm::kExp3IX, Algorithm::kExp3IXPlugin}) {
    std::vector<ActionId> behavior_actions;
    std::vector<std::vector<double>> policies_a, policies_b;
    run_episode(c, 0.8, algorithm, 2, [&](const RoundTrace& tr) {
      behavior_actions.push_back(tr.behavior_action);
      const auto p = tr.learner_policy->probs();
      policies_a.emplace_back(p.begin(), p.end());
    });
    std::vector<std::vector<double>> corrupted(kRounds, std::vector<double>(kArms));
    for (std::uint64_t t = 0; t < kRounds; ++t) {
      for (std::size_t a = 0; a < kArms; ++a) corrupted[t][a] = 1.0 - original[t][a] * 0.5;
      corrupted[t][behavior_actions[t].index] = original[t][behavior_actions[t].index];
    }
    ExperimentConfig d = c;
    d.env = ScriptedEnv(corrupted);
    std::size_t round = 0;
    run_episode(d, 0.8, algorithm, 2, [&](const RoundTrace& tr) {
      ASSERT_EQ(tr.behavior_action, behavior_actions[round]);
      const auto p = tr.learner_policy->probs();
      ASSERT_EQ(std::vector<double>(p.begin(), p.end()), policies_a[round]) << "round " << tr.t;
      ++round;
    });
    EXPECT_EQ(round, kRounds);
  }
}

TEST(RunEpisode, StepSizeViolationNamesTheRound) {
  const ExperimentConfig c = testing::ill_conditioned_config(testing::failing_seed());
  c.validate();
  const auto vbar = compute_vbar(testing::ill_conditioned_env(), ContextPolicy{Policy::uniform(3)});
  EXPECT_FALSE(check_stepsize_condition(vbar, testing::ill_conditioned_env(), tune_eta(c.eta_mode, 3, 1)));
  try {
    run_episode(c, 0.5, Algorithm::kLinProd, 0);
    FAIL() << "expected ProdFactorNonPositive";
  } catch (const EpisodeError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProdFactorNonPositive);
    EXPECT_EQ(e.round(), 1u);
    EXPECT_NE(std::string(e.what()).find("round 1"), std::string::npos);
  }
}

TEST(RunEpisode, LinearEnvironment) {
  ExperimentConfig c;
  c.num_actions = 3;
  c.n = 200;
  c.runs = 2;
  c.alpha_grid = {0.5};
  c.algorithms = {Algorithm::kLinProd};
  c.env = verify::reference_linear_env(200);
  c.eta_mode = EtaMode::kLinearUniform;
  c.comparator = DiracComparator{2};
  c.thin = 1;
  std::vector<std::size_t> contexts;
  const RunRecord r = run_episode(c, 0.5, Algorithm::kLinProd, 0, [&](const RoundTrace& tr) {
    contexts.push_back(tr.context);
  });
  EXPECT_EQ(r.trajectory.size(), 200u);
  EXPECT_TRUE(std::isfinite(r.final_regret));
  EXPECT_FALSE(r.naive_exp3_bound.has_value());
  std::vector<int> seen(4, 0);
  for (auto x : contexts) ++seen.at(x);
  for (int s : seen) EXPECT_GT(s, 0);
}

TEST(Replications, SingleRunMatchesEpisode) {
  ExperimentConfig c = small_config();
  c.runs = 1;
  const auto records = run_replications(c, 0.5, Algorithm::kExp3IX);
  ASSERT_EQ(records.size(), 1u);
  const RunRecord direct = run_episode(c, 0.5, Algorithm::kExp3IX, 0);
  EXPECT_EQ(records[0].final_regret, direct.final_regret);
  EXPECT_EQ(records[0].trajectory, direct.trajectory);
}

TEST(Replications, WorkerCountDoesNotChangeOutput) {
  ExperimentConfig serial = small_config();
  ExperimentConfig parallel = serial;
  parallel.workers = 4;
  const auto a = run_all(serial), b = run_all(parallel);
  EXPECT_EQ(runs_csv(a), runs_csv(b));
  EXPECT_EQ(trajectories_csv(a), trajectories_csv(b));
  const auto ra = run_replications(serial, 0.9, Algorithm::kExp3), rb = run_replications(parallel, 0.9, Algorithm::kExp3);
  EXPECT_EQ(runs_csv(ra), runs_csv(rb));
}

TEST(Replications, SeedMatters) {
  ExperimentConfig a = small_config(), b = small_config();
  b.base_seed = a.base_seed + 1;
  const auto ra = run_replications(a, 0.5, Algorithm::kExp3IX), rb = run_replications(b, 0.5, Algorithm::kExp3IX);
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_NE(ra[i].final_regret, rb[i].final_regret) << i;
}

TEST(Replications, RecordsOrdered) {
  const ExperimentConfig c = small_config();
  const auto records = run_all(c);
  ASSERT_EQ(records.size(), 3u * 3u * 8u);
  std::size_t i = 0;
  for (double alpha : c.alpha_grid)
    for (Algorithm algorithm : c.algorithms)
      for (std::uint64_t r = 0; r < c.runs; ++r, ++i) {
        EXPECT_EQ(records[i].alpha, alpha);
        EXPECT_EQ(records[i].algorithm, algorithm);
        EXPECT_EQ(records[i].run_index, r);
      }
}

TEST(Replications, FailuresAreCollected) {
  const ExperimentConfig c = testing::ill_conditioned_config(testing::failing_seed());
  try {
    run_all(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProdFactorNonPositive);
    EXPECT_NE(std::string(e.what()).find("round 1"), std::string::npos);
  }
}

TEST(Aggregate, Examples) {
  const AggregateStats one = aggregate(0.3, Algorithm::kExp3, {4.5});
  EXPECT_EQ(one.mean, 4.5);
  EXPECT_EQ(one.q25, 4.5);
  EXPECT_EQ(one.q75, 4.5);
  EXPECT_EQ(one.run_count, 1u);

  const AggregateStats four = aggregate(0.3, Algorithm::kExp3, {4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(four.mean, 2.5);
  EXPECT_DOUBLE_EQ(four.q25, 1.75);
  EXPECT_DOUBLE_EQ(four.q75, 3.25);
  EXPECT_NEAR(four.std_error, std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0) / 2.0, 1e-15);
  EXPECT_THROW(aggregate(0.0, Algorithm::kExp3, {}), Error);
}

TEST(Aggregate, QuantileRule) {
  EXPECT_DOUBLE_EQ(empirical_quantile({10, 20, 30}, 0.5), 20.0);
  EXPECT_DOUBLE_EQ(empirical_quantile({10, 20, 30}, 0.25), 15.0);
  EXPECT_DOUBLE_EQ(empirical_quantile({10, 20, 30}, 1.0), 30.0);
  EXPECT_DOUBLE_EQ(empirical_quantile({10, 20, 30}, 0.0), 10.0);
}

TEST(Aggregate, SweepStatsMatchRecords) {
  const ExperimentConfig c = small_config();
  const SweepResult s = sweep(c);
  ASSERT_EQ(s.stats.size(), 9u);
  for (const auto& st : s.stats) {
    double sum = 0;
    std::vector<double> values;
    for (const auto& r : s.records) {
      if (r.alpha == st.alpha && r.algorithm == st.algorithm) {
        sum += r.final_regret;
        values.push_back(r.final_regret);
      }
    }
    ASSERT_EQ(values.size(), c.runs);
    EXPECT_NEAR(st.mean, sum / static_cast<double>(values.size()), 1e-12);
    EXPECT_LE(st.q25, st.q75);
    EXPECT_EQ(st.run_count, c.runs);
  }
}

TEST(Config, ValidationRejectsBadConfigs) {
  auto code = [](ExperimentConfig c) {
    try {
      c.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  ExperimentConfig c = small_config();
  c.alpha_grid.clear();
  EXPECT_EQ(code(c), ErrorCode::kConfig);
  EXPECT_THROW(run_all(c), Error);
  c = small_config();
  c.alpha_grid = {1.5};
  EXPECT_EQ(code(c), ErrorCode::kConfig);
  c = small_config();
  c.runs = 0;
  EXPECT_EQ(code(c), ErrorCode::kConfig);
  c = small_config();
  c.algorithms = {Algorithm::kLinProd};
  EXPECT_EQ(code(c), ErrorCode::kConfig);
  c = small_config();
  c.comparator = DiracComparator{10};
  EXPECT_EQ(code(c), ErrorCode::kConfig);
  c = small_config();
  c.env = ScriptedEnv(std::vector<std::vector<double>>(10, std::vector<double>(10, 0.5)));
  EXPECT_EQ(code(c), ErrorCode::kConfig);
}

TEST(EpisodeEta, Modes) {
  ExperimentConfig c = small_config();
  const Policy behavior = behavior_alpha_policy(0.9, 10);
  EXPECT_DOUBLE_EQ(episode_eta(c, behavior), std::sqrt(std::log(10.0) / 300.0));
  c.eta_mode = EtaMode::kCoverageTuned;
  const double cov = 1.0 / behavior[0];
  EXPECT_NEAR(episode_eta(c, behavior), std::sqrt(std::log(10.0) / (cov * 300.0)), 1e-12);
}

}  // namespace
}  // namespace offband
