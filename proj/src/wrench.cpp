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
#include "agrihqp/wrench.hpp"

#include <cmath>

namespace agrihqp {

Wrench compensate_payload(const Wrench& raw, const Quat& sensor_orientation,
                          const PayloadModel& payload) {
  const Vec3 fg = sensor_orientation.normalized().conjugate() * (payload.mass * payload.gravity);
  Wrench out = raw;
  out.force = raw.force - fg;
  out.moment = raw.moment - payload.com.cross(fg);
  return out;
}

namespace {

// Small slack so that tick times accumulated in floating point still hit the
// debounce boundary on the intended tick.
constexpr double kTimeEps = 1e-9;

}  // namespace

ContactState classify_contact(const Wrench& w, const ContactState& prev, const ContactConfig& cfg,
                              double t) {
  ContactState s = prev;
  const double f = w.force.norm();
  const double m = w.moment.norm();
  const bool above = f > cfg.theta_hi || (cfg.use_moments && m > cfg.moment_hi);
  const bool below = f < cfg.theta_lo && (!cfg.use_moments || m < cfg.moment_lo);
  const bool dwell_ok = t - prev.since >= cfg.debounce - kTimeEps;

  if (!prev.in_contact) {
    if (above && dwell_ok) {
      s.in_contact = true;
      s.since = t;
      s.below_since = std::numeric_limits<double>::quiet_NaN();
    }
  } else if (below) {
    if (std::isnan(prev.below_since)) s.below_since = t;
    if (t - s.below_since >= cfg.debounce - kTimeEps && dwell_ok) {
      s.in_contact = false;
      s.since = t;
      s.below_since = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    s.below_since = std::numeric_limits<double>::quiet_NaN();
  }

  s.filtered = w;
  if (!s.in_contact || below) {
    s.filtered.force.setZero();
    s.filtered.moment.setZero();
  }
  return s;
}

}  // namespace agrihqp
