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
#include "agrihqp/supervisor.hpp"

#include <array>

namespace agrihqp {

namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 9> kPhaseNames = {{
    {Phase::kIdle, "Idle"},
    {Phase::kDetectHead, "DetectHead"},
    {Phase::kMovePreGrasp, "MovePreGrasp"},
    {Phase::kDetectWrist, "DetectWrist"},
    {Phase::kAwaitHuman, "AwaitHuman"},
    {Phase::kGrasp, "Grasp"},
    {Phase::kCut, "Cut"},
    {Phase::kDeposit, "Deposit"},
    {Phase::kHome, "Home"},
}};

// Most confident detection that clears the threshold.
const Detection* best(const PerceptionOutcome& p, double threshold) {
  const Detection* out = nullptr;
  for (const auto& d : p.detections) {
    if (d.confidence < threshold) continue;
    if (!out || d.confidence > out->confidence) out = &d;
  }
  return out;
}

void note(std::vector<std::string>* log, std::string s) {
  if (log) log->push_back(std::move(s));
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kAutonomous ? "Autonomous" : "Guided"; }

std::string_view to_string(Phase p) {
  for (const auto& [ph, name] : kPhaseNames)
    if (ph == p) return name;
  return "?";
}

std::optional<Phase> parse_phase(std::string_view s) {
  for (const auto& [ph, name] : kPhaseNames)
    if (name == s) return ph;
  return std::nullopt;
}

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kSafety: return "safety";
    case TaskKind::kAdmittance: return "admittance";
    case TaskKind::kHandGuiding: return "hand_guiding";
    case TaskKind::kPosture: return "posture";
  }
  return "?";
}

FsmState step(const FsmState& state, const FsmEvent& ev, const FsmConfig& cfg,
              std::vector<std::string>* log) {
  FsmState s = state;
  auto enter = [&](Phase p, std::string why) {
    s.phase = p;
    s.phase_since = ev.t;
    s.mode = p == Phase::kAwaitHuman ? Mode::kGuided : Mode::kAutonomous;
    note(log, std::move(why));
  };

  if (ev.perception && s.phase != Phase::kDetectHead && s.phase != Phase::kDetectWrist)
    note(log, "ignored perception result in phase " + std::string(to_string(s.phase)));

  switch (s.phase) {
    case Phase::kIdle:
      if (ev.start) enter(Phase::kDetectHead, "harvest command");
      break;

    case Phase::kDetectHead:
      if (ev.perception) {
        if (ev.perception->source != PerceptionSource::kHead) {
          note(log, "ignored wrist result during head detection");
          break;
        }
        const Detection* d = best(*ev.perception, cfg.confidence_threshold);
        if (!d) {
          s.target.reset();
          enter(Phase::kHome, "no bunch detected");
        } else if (d->peduncle) {
          s.target = d->peduncle;
          s.peduncle_known = true;
          enter(Phase::kMovePreGrasp, "peduncle detected by head camera");
        } else {
          s.target = d->bunch;
          s.peduncle_known = false;
          enter(Phase::kMovePreGrasp, "bunch detected, peduncle unknown");
        }
      }
      break;

    case Phase::kMovePreGrasp:
      if (ev.trajectory_complete)
        enter(s.peduncle_known ? Phase::kGrasp : Phase::kDetectWrist, "pre-grasp reached");
      break;

    case Phase::kDetectWrist:
      if (ev.perception) {
        if (ev.perception->source != PerceptionSource::kWrist) {
          note(log, "ignored head result during wrist detection");
          break;
        }
        const Detection* d = best(*ev.perception, cfg.confidence_threshold);
        if (d && d->peduncle) {
          s.target = d->peduncle;
          s.peduncle_known = true;
          enter(Phase::kGrasp, "peduncle detected by wrist camera");
        } else {
          s.contact_seen = false;
          s.no_contact_dwell = 0.0;
          enter(Phase::kAwaitHuman, "peduncle not recognised: operator assistance requested");
        }
      }
      break;

    case Phase::kAwaitHuman:
      s.no_contact_dwell = s.contact_seen ? ev.quiet_for : 0.0;
      if (ev.in_contact) {
        if (!s.contact_seen) note(log, "operator contact");
        s.contact_seen = true;
      } else if (s.contact_seen) {
        // The classifier only reports no-contact after its debounce window.
        s.peduncle_known = false;
        s.target.reset();
        enter(Phase::kGrasp, "no contact: back to autonomous");
      }
      break;

    case Phase::kGrasp:
      if (ev.trajectory_complete) enter(Phase::kCut, "gripper closed");
      break;

    case Phase::kCut:
      if (ev.trajectory_complete) enter(Phase::kDeposit, "peduncle cut");
      break;

    case Phase::kDeposit:
      if (ev.trajectory_complete) enter(Phase::kHome, "bunch released");
      break;

    case Phase::kHome:
      if (ev.trajectory_complete && !s.finished) {
        s.finished = true;
        note(log, "harvest complete");
      }
      break;
  }
  return s;
}

HierarchySpec hierarchy_for_mode(const FsmState& state, const HierarchyOptions& opts) {
  HierarchySpec h;
  h.levels.push_back({TaskKind::kSafety});
  h.levels.push_back(
      {state.mode == Mode::kGuided ? TaskKind::kHandGuiding : TaskKind::kAdmittance});
  if (opts.posture) h.levels.push_back({TaskKind::kPosture});
  return h;
}

}  // namespace agrihqp
