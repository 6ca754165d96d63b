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

// JSON loading for experiment configs and environment files.
//
// Experiment config keys (all optional, defaults reproduce the 100-armed
// study): K, n, runs, base_seed, alpha_grid, algorithms, comparator, env,
// eta_mode, thin, workers, output. Unknown keys are rejected.
//
//   "comparator": {"dirac": 0} | {"policy": [p_1, ..., p_K]}
//   "env": "piecewise_bernoulli" | {"scripted": "file.json"} | {"linear": "file.json"}
//
// Environment files:
//   scripted: {"reward_table": [[r_1(1), ..., r_1(K)], ...]}         n x K
//   linear:   {"contexts": ["x0", ...], "context_probs": [...],
//              "features": [[[phi(x0,a0)], [phi(x0,a1)], ...], ...],  |X| x K x d
//              "theta_sequence": [[theta_1], ...]}                    n x d
// Relative paths are resolved against the directory of the config file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "offband/environments.hpp"
#include "offband/harness.hpp"

namespace offband {

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

template <typename T>
T json_get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad or missing '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ScriptedEnv scripted_env_from_json(const nlohmann::json& j) {
  try {
    return ScriptedEnv(detail::json_get<std::vector<std::vector<double>>>(j, "reward_table"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, "invalid scripted environment: " + e.detail());
  }
}

inline LinearEnv linear_env_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> contexts;
    for (const auto& c : j.at("contexts")) contexts.push_back(c.is_string() ? c.get<std::string>() : c.dump());
    const auto probs = detail::json_get<std::vector<double>>(j, "context_probs");
    const auto features = detail::json_get<std::vector<std::vector<std::vector<double>>>>(j, "features");
    const auto thetas = detail::json_get<std::vector<std::vector<double>>>(j, "theta_sequence");
    if (features.empty() || features.front().empty() || features.front().front().empty()) {
      throw Error(ErrorCode::kConfig, "features must be a non-empty |X| x K x d array");
    }
    const std::size_t num_actions = features.front().size();
    const std::size_t dim = features.front().front().size();
    FeatureMap map(features.size(), num_actions, dim);
    for (std::size_t x = 0; x < features.size(); ++x) {
      if (features[x].size() != num_actions) throw Error(ErrorCode::kConfig, "features rows differ in K");
      for (std::size_t a = 0; a < num_actions; ++a) {
        map.set(x, a, Eigen::Map<const Eigen::VectorXd>(features[x][a].data(),
                                                        static_cast<Eigen::Index>(features[x][a].size())));
      }
    }
    std::vector<Eigen::VectorXd> theta_sequence;
    theta_sequence.reserve(thetas.size());
    for (const auto& th : thetas) {
      theta_sequence.emplace_back(Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size())));
    }
    return LinearEnv(std::move(contexts), Policy(probs), std::move(map), std::move(theta_sequence));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid linear environment: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, "invalid linear environment: " + e.detail());
  }
}

inline ScriptedEnv load_scripted_env(const std::filesystem::path& path) {
  return scripted_env_from_json(detail::read_json_file(path));
}

inline LinearEnv load_linear_env(const std::filesystem::path& path) {
  return linear_env_from_json(detail::read_json_file(path));
}

inline nlohmann::json scripted_env_to_json(const ScriptedEnv& env) {
  return nlohmann::json{{"reward_table", env.table()}};
}

inline nlohmann::json linear_env_to_json(const LinearEnv& env) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t x = 0; x < env.num_contexts(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t a = 0; a < env.num_actions(); ++a) {
      const auto& phi = env.features()(x, a);
      row.push_back(std::vector<double>(phi.data(), phi.data() + phi.size()));
    }
    features.push_back(std::move(row));
  }
  nlohmann::json thetas = nlohmann::json::array();
  for (const auto& th : env.theta_sequence()) thetas.push_back(std::vector<double>(th.data(), th.data() + th.size()));
  const auto probs = env.context_probs().probs();
  return nlohmann::json{{"contexts", env.contexts()},
                        {"context_probs", std::vector<double>(probs.begin(), probs.end())},
                        {"features", std::move(features)},
                        {"theta_sequence", std::move(thetas)}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  static const std::set<std::string> kKeys{"K",   "n",      "runs",     "base_seed", "alpha_grid", "algorithms",
                                           "comparator", "env", "eta_mode", "thin", "workers",    "output"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }

  ExperimentConfig c;
  if (j.contains("K")) c.num_actions = detail::json_get<std::size_t>(j, "K");
  if (j.contains("n")) c.n = detail::json_get<std::uint64_t>(j, "n");
  if (j.contains("runs")) c.runs = detail::json_get<std::size_t>(j, "runs");
  if (j.contains("base_seed")) c.base_seed = detail::json_get<std::uint64_t>(j, "base_seed");
  if (j.contains("alpha_grid")) c.alpha_grid = detail::json_get<std::vector<double>>(j, "alpha_grid");
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& name : detail::json_get<std::vector<std::string>>(j, "algorithms")) {
      c.algorithms.push_back(parse_algorithm(name));
    }
  }
  if (j.contains("comparator")) {
    const auto& comp = j.at("comparator");
    if (comp.is_object() && comp.contains("dirac") && comp.size() == 1) {
      c.comparator = DiracComparator{detail::json_get<std::size_t>(comp, "dirac")};
    } else if (comp.is_object() && comp.contains("policy") && comp.size() == 1) {
      c.comparator = detail::json_get<std::vector<double>>(comp, "policy");
    } else {
      throw Error(ErrorCode::kConfig, "comparator must be {\"dirac\": i} or {\"policy\": [...]}");
    }
  }
  if (j.contains("env")) {
    const auto& env = j.at("env");
    if (env.is_string() && env.get<std::string>() == "piecewise_bernoulli") {
      c.env = PiecewiseBernoulliSpec{};
      c.env_description = "piecewise_bernoulli";
    } else if (env.is_object() && env.size() == 1 && env.contains("scripted")) {
      const auto path = base_dir / detail::json_get<std::string>(env, "scripted");
      c.env = load_scripted_env(path);
      c.env_description = "scripted:" + path.string();
    } else if (env.is_object() && env.size() == 1 && env.contains("linear")) {
      const auto path = base_dir / detail::json_get<std::string>(env, "linear");
      c.env = load_linear_env(path);
      c.env_description = "linear:" + path.string();
    } else {
      throw Error(ErrorCode::kConfig,
                  "env must be \"piecewise_bernoulli\", {\"scripted\": path} or {\"linear\": path}");
    }
  }
  if (j.contains("eta_mode")) c.eta_mode = parse_eta_mode(detail::json_get<std::string>(j, "eta_mode"));
  if (j.contains("thin")) c.thin = detail::json_get<std::uint64_t>(j, "thin");
  if (j.contains("workers")) c.workers = detail::json_get<std::size_t>(j, "workers");
  if (j.contains("output")) c.output = detail::json_get<std::string>(j, "output");

  if (c.n < 1) throw Error(ErrorCode::kConfig, "n must be at least 1");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(detail::read_json_file(path), path.parent_path());
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (Algorithm a : c.algorithms) algorithms.push_back(std::string(algorithm_name(a)));
  nlohmann::json comparator;
  if (const auto* dirac = std::get_if<DiracComparator>(&c.comparator)) {
    comparator = {{"dirac", dirac->action}};
  } else {
    comparator = {{"policy", std::get<std::vector<double>>(c.comparator)}};
  }
  return nlohmann::json{{"K", c.num_actions},
                        {"n", c.n},
                        {"runs", c.runs},
                        {"base_seed", c.base_seed},
                        {"alpha_grid", c.alpha_grid},
                        {"algorithms", std::move(algorithms)},
                        {"comparator", std::move(comparator)},
                        {"env", c.env_description},
                        {"eta_mode", std::string(eta_mode_name(c.eta_mode))},
                        {"thin", c.thin},
                        {"workers", c.workers},
                        {"output", c.output}};
}

}  // namespace offband
