// Copyright 2026 The agrihqp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace agrihqp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAbort = 2;

enum class Command { kRun, kValidate, kExport };

struct CliConfig {
  Command command = Command::kRun;
  std::filesystem::path scenario;  // run/validate: scenario file; export: log file
  std::string figure;              // export only
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

/// Figure extracts understood by `export`.
const std::vector<std::string>& figure_ids();

/// Column names kept by a figure extract, given the log header.
/// Throws std::invalid_argument for an unknown id.
std::vector<std::string> figure_columns(const std::string& figure,
                                        const std::vector<std::string>& header);

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int validate(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int export_figure(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Returns the process exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace agrihqp::cli
