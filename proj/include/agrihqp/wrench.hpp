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

#include <limits>

#include "agrihqp/model.hpp"

namespace agrihqp {

/// Rigid load hanging from the wrist sensor.
struct PayloadModel {
  double mass = 0.0;                    // kg
  Vec3 com = Vec3::Zero();              // sensor frame, m
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);  // world frame, m/s^2
};

/// Removes the payload's gravity wrench from a sensor-frame measurement.
/// `sensor_orientation` rotates sensor coordinates into world coordinates.
Wrench compensate_payload(const Wrench& raw, const Quat& sensor_orientation,
                          const PayloadModel& payload);

struct ContactConfig {
  double theta_hi = 2.0;   // N, enter contact above
  double theta_lo = 1.0;   // N, candidate release below
  double debounce = 3.0;   // s
  bool use_moments = false;
  double moment_hi = 0.5;  // N m, only with use_moments
  double moment_lo = 0.25;
};

struct ContactState {
  bool in_contact = false;
  double since = -std::numeric_limits<double>::infinity();  // last transition
  double below_since = std::numeric_limits<double>::quiet_NaN();  // start of a quiet spell
  Wrench filtered;
};

/// Threshold classifier with hysteresis. Contact starts on the first sample
/// above theta_hi and ends once the force has stayed below theta_lo for
/// `debounce` seconds. No transition happens within `debounce` of the
/// previous one. The filtered wrench is zero unless in contact and above
/// theta_lo.
ContactState classify_contact(const Wrench& w, const ContactState& prev, const ContactConfig& cfg,
                              double t);

}  // namespace agrihqp
