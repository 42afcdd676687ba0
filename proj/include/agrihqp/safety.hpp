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
#include <variant>
#include <vector>

#include "agrihqp/hierarchy.hpp"
#include "agrihqp/model.hpp"

namespace agrihqp {

/// Linear class-K gains: the row bounds are -lower*h and +upper*h.
struct CbfGains {
  double lower = 10.0;
  double upper = 10.0;
};

/// Plane through three points given in `frame` coordinates. The normal
/// (p2-p1)x(p3-p1) points towards the allowed side.
struct VirtualWall {
  std::string name;
  int frame = 0;  // 0: world
  Vec3 p1 = Vec3::Zero(), p2 = Vec3::UnitX(), p3 = Vec3::UnitY();
  double threshold = 0.3;
  double gain = 5.0;
  std::vector<int> points;  // model point indices

  /// Throws ConfigError for collinear points or a non-positive threshold.
  void check() const;
};

/// Segment a-b in `frame` coordinates inflated by `radius`.
struct Capsule {
  int frame = 0;
  Vec3 a = Vec3::Zero(), b = Vec3::UnitZ();
  double radius = 0.0;
};

struct CollisionPair {
  std::string name;
  int point = 0;                          // monitored point j
  std::variant<int, Capsule> obstacle;    // point l or capsule
  double threshold = 0.2;
  double gain = 10.0;

  void check() const;
};

/// Barrier value emitted alongside a constraint row.
struct Barrier {
  std::string label;
  double h = 0.0;
};

struct SegmentProjection {
  Vec3 closest;
  double distance;  // |p - closest| - radius, floored at 0
};

/// Throws std::invalid_argument for a zero-length segment.
SegmentProjection segment_point_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                         double radius);

/// One row per decision variable: identity on joint-rate columns, the
/// heading limit on the yaw-rate column, a vacuous row on the forward-speed
/// column. Each finite side contributes one barrier.
TaskConstraint joint_position_limits(const JointState& state, const RobotModel& model,
                                     const CbfGains& gains, std::vector<Barrier>* barriers = nullptr);

struct VelocityOverride {
  VectorX lo, hi;  // decision size
};

TaskConstraint joint_velocity_limits(const RobotModel& model,
                                     const std::optional<VelocityOverride>& overrides = std::nullopt);

TaskConstraint virtual_wall(const Kinematics& kin, const VirtualWall& wall,
                            std::vector<Barrier>* barriers = nullptr);
TaskConstraint virtual_wall(const RobotModel& model, const JointState& state,
                            const VirtualWall& wall, std::vector<Barrier>* barriers = nullptr);

/// Degenerate pairs (distance below 1e-6) produce a vacuous row and are
/// reported through `degenerate`.
TaskConstraint self_collision(const Kinematics& kin, const std::vector<CollisionPair>& pairs,
                              std::vector<Barrier>* barriers = nullptr,
                              std::vector<std::string>* degenerate = nullptr);
TaskConstraint self_collision(const RobotModel& model, const JointState& state,
                              const std::vector<CollisionPair>& pairs,
                              std::vector<Barrier>* barriers = nullptr,
                              std::vector<std::string>* degenerate = nullptr);

struct SafetyConfig {
  CbfGains joint_position;
  std::optional<VelocityOverride> velocity;
  std::vector<VirtualWall> walls;
  std::vector<CollisionPair> pairs;
  double slack_weight = kSafetySlackWeight;
};

/// Every safety row of one tick, in the fixed order position limits,
/// velocity limits, walls, collision pairs.
struct SafetyStack {
  std::vector<TaskConstraint> tasks;
  std::vector<Barrier> barriers;
  std::vector<std::string> degenerate;

  int rows() const;
};

SafetyStack build_safety(const Kinematics& kin, const JointState& state, const SafetyConfig& cfg);

}  // namespace agrihqp
