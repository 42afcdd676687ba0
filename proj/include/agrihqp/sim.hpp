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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "agrihqp/scenario.hpp"

namespace agrihqp {

/// Explicit Euler step; the planar base advances through
/// base_velocity_mapping, every other joint integrates its own rate.
VectorX integrate(const RobotModel& model, const VectorX& q, const VectorX& qdot, double Ts);

/// World-frame wrench of the active segment (tool-frame segments rotated by
/// `tool_orientation`) plus uniform noise in [-amplitude, amplitude] per
/// component. The generator is only advanced when an amplitude is non-zero.
Wrench sample_wrench(const WrenchProfile& profile, double t, const Quat& tool_orientation,
                     double noise_force, double noise_moment, std::mt19937_64& rng);

struct LogRecord {
  double t = 0.0;
  VectorX q;
  VectorX qdot;
  std::array<Pose, 2> ee_pose;
  std::array<Vec6, 2> ee_twist;
  std::array<Pose, 2> ee_desired;
  std::array<Wrench, 2> wrench_raw;   // sensor frame, includes payload
  std::array<Wrench, 2> wrench_comp;  // world frame, payload removed
  VectorX h;                          // barrier values, see SimResult::barrier_labels
  std::array<double, 3> slack_norms{};
  double solve_time = 0.0;
  Phase phase = Phase::kIdle;
  Mode mode = Mode::kAutonomous;
  std::string event;
};

struct EventLine {
  double t;
  Phase phase;
  Mode mode;
  std::string event;
};

struct SimResult {
  std::string scenario;
  std::uint64_t seed = 0;
  double Ts = 0.0;
  std::vector<std::string> state_names;
  std::vector<std::string> decision_names;
  std::vector<std::string> barrier_labels;
  std::vector<LogRecord> records;
  std::vector<EventLine> events;
  std::vector<std::string> warnings;
  int safety_rows = 0;
  bool aborted = false;
  int abort_tick = -1;
  std::string abort_reason;

  std::vector<std::string> columns() const;
};

/// Runs the closed loop for the configured duration. A cascade failure stops
/// the run with `aborted` set; configuration problems throw ConfigError.
SimResult run_scenario(const ScenarioConfig& cfg);

/// CSV writers. Floats use 9 significant digits. The log starts with a
/// '#'-prefixed line carrying the scenario name and seed.
void write_log_csv(const SimResult& result, std::ostream& out);
void write_events_csv(const SimResult& result, std::ostream& out);

}  // namespace agrihqp
