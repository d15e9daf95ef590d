// Copyright 2026 The rydprep Authors
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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rydprep/cli/config.hpp"

namespace rydprep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::optional<std::string> record;  // "cycle" or "segment"
};

// Config with command-line overrides applied, as embedded in result files.
RunConfig effective_config(const RunConfig& c, const CommandOptions& o);

struct RunFiles {
  std::filesystem::path csv;
  std::filesystem::path json;
  RunResult result;
};

RunFiles cmd_run(const RunConfig& c, const CommandOptions& o);

struct SweepFiles {
  std::filesystem::path csv;
  std::filesystem::path final_csv;
  std::filesystem::path json;
};

// CLI axes replace the config's sweep block when given.
SweepFiles cmd_sweep(const RunConfig& c, const CommandOptions& o, const std::vector<SweepAxis>& cli_axes = {});

struct McFiles {
  std::filesystem::path trajectories_csv;
  std::filesystem::path summary_csv;
  std::filesystem::path series_csv;
  std::filesystem::path json;
  std::vector<MonteCarloSummary> summaries;
};

McFiles cmd_mc(const RunConfig& c, const CommandOptions& o, std::optional<std::size_t> trajectories = {},
               const std::vector<double>& temperatures_uk = {});

nlohmann::json cmd_solve_timing(double omega_a_mhz, int max_k);

void cmd_plot(const std::filesystem::path& in, const std::filesystem::path& out, const std::string& panel,
              const std::string& group, const std::string& title);

// Parses a comma-separated list; numbers become JSON numbers, anything else strings.
std::vector<Json> parse_values(const std::string& list);

// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace rydprep::cli
