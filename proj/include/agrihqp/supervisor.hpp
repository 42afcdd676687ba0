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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agrihqp/model.hpp"

namespace agrihqp {

enum class Mode { kAutonomous, kGuided };

enum class Phase {
  kIdle,
  kDetectHead,
  kMovePreGrasp,
  kDetectWrist,
  kAwaitHuman,
  kGrasp,
  kCut,
  kDeposit,
  kHome,
};

std::string_view to_string(Mode m);
std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view s);

enum class PerceptionSource { kHead, kWrist };

struct Detection {
  Pose bunch;
  std::optional<Pose> peduncle;
  double confidence = 0.0;  // [0, 1]
};

struct PerceptionOutcome {
  PerceptionSource source = PerceptionSource::kHead;
  std::vector<Detection> detections;
};

struct FsmConfig {
  double confidence_threshold = 0.9;
};

struct FsmState {
  Phase phase = Phase::kIdle;
  Mode mode = Mode::kAutonomous;
  double phase_since = 0.0;
  double no_contact_dwell = 0.0;  // time since the operator let go
  bool contact_seen = false;      // at least one contact episode in AwaitHuman
  bool peduncle_known = false;
  std::optional<Pose> target;     // peduncle (or bunch while unknown)
  bool finished = false;
};

struct FsmEvent {
  double t = 0.0;
  bool start = false;
  std::optional<PerceptionOutcome> perception;
  bool in_contact = false;  // classifier output, any arm
  double quiet_for = 0.0;   // seconds the contact force has been below release level
  bool trajectory_complete = false;
};

/// Advances the harvesting state machine by one event. Notes about the
/// transition (or ignored inputs) are appended to `log` when given.
FsmState step(const FsmState& state, const FsmEvent& event, const FsmConfig& cfg = {},
              std::vector<std::string>* log = nullptr);

enum class TaskKind { kSafety, kAdmittance, kHandGuiding, kPosture };

std::string_view to_string(TaskKind k);

struct HierarchyOptions {
  bool posture = true;
};

/// Priority levels, highest first, each naming the task builders it holds.
struct HierarchySpec {
  std::vector<std::vector<TaskKind>> levels;
};

HierarchySpec hierarchy_for_mode(const FsmState& state, const HierarchyOptions& opts = {});

}  // namespace agrihqp
