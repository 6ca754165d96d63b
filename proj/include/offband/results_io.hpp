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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "offband/config.hpp"
#include "offband/harness.hpp"
#include "offband/rng.hpp"
#include "offband/version.hpp"

namespace offband {

inline constexpr std::string_view kRunsHeader = "alpha,algorithm,run,seed,final_regret";
inline constexpr std::string_view kAggregateHeader = "alpha,algorithm,mean,q25,q75,runs";
inline constexpr std::string_view kTrajectoryHeader = "alpha,algorithm,run,t,cumulative_regret";

// Shortest decimal string that parses back to the same double; infinities
// print as "inf" / "-inf".
inline std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::kIo, "cannot format number");
  return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
  if (text == "inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kIo, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

// Writes to a sibling temporary file and renames it into place, so a failed
// write never leaves a partial file at `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into '" + path.string() + "'");
  }
}

inline std::string runs_csv(const std::vector<RunRecord>& records) {
  std::string out(kRunsHeader);
  out += '\n';
  for (const auto& r : records) {
    out += format_double(r.alpha) + ',' + std::string(algorithm_name(r.algorithm)) + ',' +
           std::to_string(r.run_index) + ',' + std::to_string(r.seed) + ',' + format_double(r.final_regret) + '\n';
  }
  return out;
}

inline std::string aggregate_csv(const std::vector<AggregateStats>& stats) {
  std::string out(kAggregateHeader);
  out += '\n';
  for (const auto& s : stats) {
    out += format_double(s.alpha) + ',' + std::string(algorithm_name(s.algorithm)) + ',' + format_double(s.mean) +
           ',' + format_double(s.q25) + ',' + format_double(s.q75) + ',' + std::to_string(s.run_count) + '\n';
  }
  return out;
}

inline std::string trajectories_csv(const std::vector<RunRecord>& records) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& r : records) {
    const std::string prefix =
        format_double(r.alpha) + ',' + std::string(algorithm_name(r.algorithm)) + ',' + std::to_string(r.run_index) + ',';
    for (const auto& [t, value] : r.trajectory) out += prefix + std::to_string(t) + ',' + format_double(value) + '\n';
  }
  return out;
}

inline void write_results(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, runs_csv(records));
}

inline void write_results(const std::vector<AggregateStats>& stats, const std::filesystem::path& path) {
  write_file_atomic(path, aggregate_csv(stats));
}

inline void write_trajectories(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, trajectories_csv(records));
}

inline nlohmann::json metadata_json(const ExperimentConfig& config) {
  return nlohmann::json{
      {"artifact", "offband"},
      {"version", std::string(kVersion)},
      {"rng_algorithm", std::string(RngStream::kAlgorithm)},
      {"rng_streams",
       "replication r uses stream_index r on base_seed; substreams 0 environment, 1 behavior, 2 learner, 3 context"},
      {"quantile_rule", std::string(kQuantileRule)},
      {"regret", "expected regret sum_t <pi* - pi_t, r_t> using learner policy vectors"},
      {"config", config_to_json(config)},
  };
}

inline void write_metadata(const ExperimentConfig& config, const std::filesystem::path& path) {
  write_file_atomic(path, metadata_json(config).dump(2) + "\n");
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::kIo, "'" + path.string() + "' does not start with header " + std::string(header));
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

inline std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) throw Error(ErrorCode::kIo, "not an integer: " + text);
  return value;
}

}  // namespace detail

inline std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::vector<RunRecord> records;
  for (const auto& f : detail::read_csv(path, kRunsHeader)) {
    if (f.size() != 5) throw Error(ErrorCode::kIo, "runs row must have 5 fields");
    RunRecord r;
    r.alpha = parse_double(f[0]);
    r.algorithm = parse_algorithm(f[1]);
    r.run_index = detail::parse_u64(f[2]);
    r.seed = detail::parse_u64(f[3]);
    r.final_regret = parse_double(f[4]);
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<AggregateStats> read_aggregate_csv(const std::filesystem::path& path) {
  std::vector<AggregateStats> stats;
  for (const auto& f : detail::read_csv(path, kAggregateHeader)) {
    if (f.size() != 6) throw Error(ErrorCode::kIo, "aggregate row must have 6 fields");
    AggregateStats s;
    s.alpha = parse_double(f[0]);
    s.algorithm = parse_algorithm(f[1]);
    s.mean = parse_double(f[2]);
    s.q25 = parse_double(f[3]);
    s.q75 = parse_double(f[4]);
    s.run_count = detail::parse_u64(f[5]);
    stats.push_back(s);
  }
  return stats;
}

}  // namespace offband
