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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agrihqp/model.hpp"
#include "agrihqp/operational.hpp"
#include "agrihqp/safety.hpp"
#include "agrihqp/supervisor.hpp"
#include "agrihqp/traj.hpp"
#include "agrihqp/wrench.hpp"

namespace agrihqp {

struct SimSettings {
  double Ts = 0.01;
  double duration = 10.0;
  std::uint64_t seed = 1;
  double noise_force = 0.0;   // N, uniform amplitude per component
  double noise_moment = 0.0;  // N m
};

struct WrenchSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec6 wrench = Vec6::Zero();  // force, moment
  bool tool_frame = false;     // false: world frame
};

/// Scripted human/environment wrench applied on one end-effector.
struct WrenchProfile {
  std::vector<WrenchSegment> segments;

  /// Throws ConfigError for overlapping or reversed segments.
  void check() const;
};

struct PerceptionEntry {
  double delay = 0.0;  // seconds after the detection phase starts
  PerceptionOutcome outcome;
};

/// Scripted perception results, consumed in order per source.
struct PerceptionScript {
  std::vector<PerceptionEntry> head;
  std::vector<PerceptionEntry> wrist;
};

struct HarvestConfig {
  int arm = 1;  // 0: left, 1: right
  Pose box;
  HarvestPlanConfig plan;
  CartesianLimits limits;
  double grasp_time = 2.0;    // gripper closing, s
  double cut_time = 3.0;      // cutter, s
  double release_time = 2.0;  // gripper opening, s
  double detect_timeout = 30.0;
};

/// Which operational task occupies the second level.
enum class OperationalMode { kSupervisor, kAdmittance, kHandGuiding, kNone };

struct PostureConfig {
  bool enabled = true;
  VectorX gains;    // decision size
  VectorX nominal;  // decision size; empty: the initial configuration
  // Optional sinusoidal driver on `group`: q_d += amplitude sin(2 pi t / period),
  // qdot_d = rate_amplitude sin(2 pi t / period).
  double amplitude = 0.0;
  double rate_amplitude = 0.0;
  double period = 25.0;
  std::string group = "arms";
};

struct HierarchyConfig {
  OperationalMode operational = OperationalMode::kSupervisor;
  double regularization = kDefaultRegularization;
  double safety_weight = kSafetySlackWeight;
  double operational_weight = kOperationalSlackWeight;
  double optimization_weight = kOptimizationSlackWeight;
  double qp_tolerance = kDefaultQpTolerance;
  int qp_max_iter = kDefaultQpMaxIter;
  std::vector<VelocityOverride> hard_boxes;
};

/// Waypoints for a free-running admittance reference (no supervisor).
struct WaypointPlan {
  std::vector<Pose> poses;
  double t_start = 0.0;
};

struct ScenarioConfig {
  std::string name;
  std::filesystem::path model_path;
  std::shared_ptr<const RobotModel> model;
  SimSettings sim;
  VectorX initial_q;
  SafetyConfig safety;
  AdmittanceParams admittance_autonomous = AdmittanceParams::defaults();
  AdmittanceParams admittance_guided = AdmittanceParams::hand_guiding();
  std::array<WrenchProfile, 2> wrench_profiles;
  std::array<PayloadModel, 2> payload;
  ContactConfig contact;
  PerceptionScript perception;
  std::optional<HarvestConfig> harvest;
  std::array<std::optional<WaypointPlan>, 2> waypoints;
  HierarchyConfig hierarchy;
  PostureConfig posture;
  FsmConfig fsm;

  const RobotModel& robot() const { return *model; }
};

/// Reads a scenario document. Relative model paths resolve against
/// `base_dir`. Throws ConfigError with the JSON path of the first problem.
ScenarioConfig parse_scenario(std::string_view json_text,
                              const std::filesystem::path& base_dir = ".");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Semantic checks beyond parsing: initial state inside limits and every
/// barrier positive at t = 0. Returns one message per violation.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

}  // namespace agrihqp
