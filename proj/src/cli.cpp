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
#include "agrihqp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "agrihqp/sim.hpp"

namespace agrihqp::cli {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool starts_with(const std::string& s, std::string_view p) { return s.rfind(p, 0) == 0; }

bool ends_with(const std::string& s, std::string_view p) {
  return s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0;
}

// Loads and validates; prints violations and returns nullopt on failure.
std::optional<ScenarioConfig> load_checked(const std::filesystem::path& path, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  const auto problems = validate_scenario(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) err << "error: " << p << "\n";
    return std::nullopt;
  }
  return cfg;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig7_distances", "fig9_force_velocity",
                                               "fig16_tracking", "fig18_wrench_phase"};
  return ids;
}

std::vector<std::string> figure_columns(const std::string& figure,
                                        const std::vector<std::string>& header) {
  std::function<bool(const std::string&)> keep;
  if (figure == "fig7_distances") {
    keep = [](const std::string& c) { return starts_with(c, "h_"); };
  } else if (figure == "fig9_force_velocity") {
    keep = [](const std::string& c) {
      if (!starts_with(c, "wcomp_") && !starts_with(c, "ee_left_v") &&
          !starts_with(c, "ee_right_v"))
        return c == "mode";
      return !ends_with(c, "_mx") && !ends_with(c, "_my") && !ends_with(c, "_mz");
    };
  } else if (figure == "fig16_tracking") {
    keep = [](const std::string& c) {
      const bool pos = ends_with(c, "_px") || ends_with(c, "_py") || ends_with(c, "_pz");
      return pos && (starts_with(c, "ee_left_") || starts_with(c, "ee_right_") ||
                     starts_with(c, "ee_des_"));
    };
  } else if (figure == "fig18_wrench_phase") {
    keep = [](const std::string& c) {
      return starts_with(c, "wcomp_") || c == "phase" || c == "mode" || c == "event";
    };
  } else {
    std::string valid;
    for (const auto& id : figure_ids()) valid += (valid.empty() ? "" : ", ") + id;
    throw std::invalid_argument("unknown figure id '" + figure + "' (valid: " + valid + ")");
  }
  std::vector<std::string> cols{"t"};
  for (const auto& c : header)
    if (c != "t" && keep(c)) cols.push_back(c);
  return cols;
}

int validate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto sc = load_checked(cfg.scenario, err);
  if (!sc) return kExitConfig;
  const auto stack = build_safety(Kinematics(sc->robot(), sc->initial_q),
                                  JointState{sc->initial_q, VectorX::Zero(sc->robot().decision_size()), 0.0},
                                  sc->safety);
  out << "safety rows: " << stack.rows() << "\n";
  if (cfg.verbose) {
    for (const auto& b : stack.barriers) out << "  h " << b.label << " = " << b.h << "\n";
  }
  return kExitOk;
}

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  auto sc = load_checked(cfg.scenario, err);
  if (!sc) return kExitConfig;
  if (cfg.seed) sc->sim.seed = *cfg.seed;

  SimResult res;
  try {
    res = run_scenario(*sc);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  const auto log_path = cfg.out / (sc->name + ".csv");
  const auto ev_path = cfg.out / (sc->name + ".events.csv");
  std::ofstream log(log_path), ev(ev_path);
  if (!log || !ev) {
    err << "error: cannot write to " << cfg.out.string() << "\n";
    return kExitConfig;
  }
  write_log_csv(res, log);
  write_events_csv(res, ev);

  if (cfg.verbose) {
    double total = 0.0, worst = 0.0;
    for (const auto& r : res.records) {
      total += r.solve_time;
      worst = std::max(worst, r.solve_time);
    }
    out << "ticks: " << res.records.size() << "\n"
        << "safety rows: " << res.safety_rows << "\n"
        << "mean solve time: " << (res.records.empty() ? 0.0 : total / res.records.size()) * 1e3
        << " ms, max " << worst * 1e3 << " ms\n";
    for (const auto& e : res.events)
      out << "  " << e.t << " " << to_string(e.phase) << " " << to_string(e.mode) << ": " << e.event
          << "\n";
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  }
  out << "wrote " << log_path.string() << "\n";
  if (res.aborted) {
    err << "controller abort at " << res.abort_reason << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

int export_figure(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream in(cfg.scenario);
  if (!in) {
    err << "error: cannot open log " << cfg.scenario.string() << "\n";
    return kExitConfig;
  }
  std::string line;
  std::vector<std::string> comments;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (starts_with(line, "#")) {
      comments.push_back(line);
      continue;
    }
    header = split_csv(line);
    break;
  }
  if (header.empty() || header.front() != "t") {
    err << "error: " << cfg.scenario.string() << " is not a simulation log\n";
    return kExitConfig;
  }
  std::vector<std::string> cols;
  try {
    cols = figure_columns(cfg.figure, header);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<std::size_t> idx;
  for (const auto& c : cols)
    idx.push_back(static_cast<std::size_t>(std::find(header.begin(), header.end(), c) - header.begin()));

  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  const auto path = cfg.out / (cfg.scenario.stem().string() + "." + cfg.figure + ".csv");
  std::ofstream o(path);
  if (!o) {
    err << "error: cannot write " << path.string() << "\n";
    return kExitConfig;
  }
  for (const auto& c : comments) o << c << "\n";
  for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << "\n";
  while (std::getline(in, line)) {
    const auto cells = split_csv(line);
    for (std::size_t i = 0; i < idx.size(); ++i)
      o << (i ? "," : "") << (idx[i] < cells.size() ? cells[idx[i]] : "");
    o << "\n";
  }
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"agrihqp: hierarchical QP whole-body controller and simulator"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string seed_text;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write the CSV logs");
  run_cmd->add_option("scenario", cfg.scenario, "Scenario file")->required();
  run_cmd->add_option("--out", cfg.out, "Output directory");
  run_cmd->add_option("--seed", seed_text, "Noise seed override");
  run_cmd->add_flag("--verbose", cfg.verbose, "Print a run summary");

  auto* val_cmd = app.add_subcommand("validate", "Check a scenario without running it");
  val_cmd->add_option("scenario", cfg.scenario, "Scenario file")->required();
  val_cmd->add_flag("--verbose", cfg.verbose, "Print every barrier value");

  auto* exp_cmd = app.add_subcommand("export", "Extract the columns of one figure from a log");
  exp_cmd->add_option("log", cfg.scenario, "Log CSV written by run")->required();
  exp_cmd->add_option("figure", cfg.figure, "Figure id")->required();
  exp_cmd->add_option("--out", cfg.out, "Output directory");
  exp_cmd->add_flag("--verbose", cfg.verbose, "Unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (!seed_text.empty()) {
    try {
      std::size_t pos = 0;
      cfg.seed = std::stoull(seed_text, &pos);
      if (pos != seed_text.size()) throw std::invalid_argument(seed_text);
    } catch (const std::exception&) {
      err << "error: --seed expects a non-negative integer, got '" << seed_text << "'\n";
      return kExitConfig;
    }
  }
  if (run_cmd->parsed()) return run(cfg, out, err);
  if (val_cmd->parsed()) {
    cfg.command = Command::kValidate;
    return validate(cfg, out, err);
  }
  cfg.command = Command::kExport;
  return export_figure(cfg, out, err);
}

}  // namespace agrihqp::cli
