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

#include <string>
#include <vector>

#include "agrihqp/model.hpp"

namespace agrihqp {

/// Rest-to-rest trapezoidal velocity profile over a distance d >= 0.
struct TrapezoidalProfile {
  double distance = 0.0;
  double v_max = 0.0;  // cruise speed actually reached
  double a_max = 0.0;
  double t_acc = 0.0;
  double t_cruise = 0.0;
  double t_total = 0.0;

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

/// Throws std::invalid_argument for d < 0 or non-positive limits.
TrapezoidalProfile plan_profile(double d, double v_max, double a_max);

/// Same acceleration, cruise speed lowered so the motion lasts exactly
/// `duration` (which must be at least the minimum time).
TrapezoidalProfile stretch_profile(double d, double a_max, double duration);

struct CartesianSegment {
  Pose start, end;
  Vec3 direction = Vec3::Zero();  // unit translation direction (world)
  Vec3 axis = Vec3::UnitZ();      // unit rotation axis (world)
  TrapezoidalProfile translation, rotation;
  double t_start = 0.0;
  double duration = 0.0;
};

/// Single end-effector trajectory that rests at every waypoint.
struct CartesianTrajectory {
  std::vector<CartesianSegment> segments;
  Pose initial;
  double t_start = 0.0;

  double t_end() const {
    return segments.empty() ? t_start : segments.back().t_start + segments.back().duration;
  }
};

struct CartesianLimits {
  double v_max = 0.25;
  double a_max = 0.5;
  double w_max = 0.5;
  double alpha_max = 1.0;
};

/// Throws std::invalid_argument with fewer than two waypoints.
CartesianTrajectory plan_cartesian(const std::vector<Pose>& waypoints, const CartesianLimits& lim,
                                   double t_start = 0.0);
inline CartesianTrajectory plan_cartesian(const std::vector<Pose>& waypoints, double v_max,
                                          double a_max, double w_max, double alpha_max) {
  return plan_cartesian(waypoints, CartesianLimits{v_max, a_max, w_max, alpha_max});
}

struct TrajectorySample {
  Pose pose;
  Vec6 twist = Vec6::Zero();  // [linear; angular]
  Vec6 accel = Vec6::Zero();
};

/// t is clamped to the trajectory's time span.
TrajectorySample sample(const CartesianTrajectory& traj, double t);

struct HarvestPlanConfig {
  double pre_grasp_offset = 0.15;                 // m
  Vec3 approach_axis = Vec3(-1.0, 0.0, 0.0);      // tool frame
  Pose pre_release;                               // world
  Pose release_offset;                            // relative to the box pose
  Pose home;                                      // world
};

struct HarvestWaypoint {
  std::string label;  // "pre-grasp", "grasp", "pre-release", "release", "home"
  Pose pose;
  std::vector<std::string> events;  // annotations emitted on arrival
};

/// Throws std::invalid_argument for a non-positive offset.
std::vector<HarvestWaypoint> harvest_waypoints(const Pose& peduncle, const Pose& box,
                                               const HarvestPlanConfig& cfg);

}  // namespace agrihqp
