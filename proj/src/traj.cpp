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
#include "agrihqp/traj.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agrihqp {

double TrapezoidalProfile::position(double t) const {
  if (t_total <= 0.0 || t <= 0.0) return 0.0;
  if (t >= t_total) return distance;
  const double a = a_max;
  if (t < t_acc) return 0.5 * a * t * t;
  const double s_acc = 0.5 * a * t_acc * t_acc;
  if (t < t_acc + t_cruise) return s_acc + v_max * (t - t_acc);
  const double td = t_total - t;
  return distance - 0.5 * a * td * td;
}

double TrapezoidalProfile::velocity(double t) const {
  if (t_total <= 0.0 || t <= 0.0 || t >= t_total) return 0.0;
  if (t < t_acc) return a_max * t;
  if (t < t_acc + t_cruise) return v_max;
  return a_max * (t_total - t);
}

double TrapezoidalProfile::acceleration(double t) const {
  if (t_total <= 0.0 || t <= 0.0 || t >= t_total) return 0.0;
  if (t < t_acc) return a_max;
  if (t < t_acc + t_cruise) return 0.0;
  return -a_max;
}

TrapezoidalProfile plan_profile(double d, double v_max, double a_max) {
  if (!(v_max > 0.0) || !(a_max > 0.0))
    throw std::invalid_argument("plan_profile: v_max and a_max must be positive");
  if (!(d >= 0.0)) throw std::invalid_argument("plan_profile: negative distance");
  TrapezoidalProfile p;
  p.distance = d;
  p.a_max = a_max;
  if (d == 0.0) return p;
  if (v_max * v_max >= a_max * d) {
    // triangular: peak velocity never reaches v_max
    p.t_acc = std::sqrt(d / a_max);
    p.v_max = a_max * p.t_acc;
    p.t_cruise = 0.0;
  } else {
    p.t_acc = v_max / a_max;
    p.v_max = v_max;
    p.t_cruise = (d - v_max * p.t_acc) / v_max;
  }
  p.t_total = 2.0 * p.t_acc + p.t_cruise;
  return p;
}

TrapezoidalProfile stretch_profile(double d, double a_max, double duration) {
  if (!(a_max > 0.0)) throw std::invalid_argument("stretch_profile: a_max must be positive");
  TrapezoidalProfile p;
  p.distance = d;
  p.a_max = a_max;
  if (d <= 0.0) return p;
  const double t_min = 2.0 * std::sqrt(d / a_max);
  if (duration < t_min * (1.0 - 1e-12))
    throw std::invalid_argument("stretch_profile: duration below the minimum time");
  // v solves d/v + v/a = T; take the smaller root.
  const double disc = std::max(0.0, a_max * a_max * duration * duration - 4.0 * a_max * d);
  const double v = 0.5 * (a_max * duration - std::sqrt(disc));
  p.v_max = v;
  p.t_acc = v / a_max;
  p.t_cruise = std::max(0.0, duration - 2.0 * p.t_acc);
  p.t_total = duration;
  return p;
}

namespace {

CartesianSegment plan_segment(const Pose& from, const Pose& to, const CartesianLimits& lim,
                              double t0) {
  CartesianSegment s;
  s.start = from;
  s.end = to;
  s.t_start = t0;
  const Vec3 dp = to.p - from.p;
  const double d = dp.norm();
  if (d > 0.0) s.direction = dp / d;
  Quat rel = to.o * from.o.conjugate();
  if (rel.w() < 0.0) rel.coeffs() = -rel.coeffs();
  const Eigen::AngleAxisd aa(rel.normalized());
  double angle = aa.angle();
  if (angle > 0.0 && angle < 1e-15) angle = 0.0;
  if (angle > 0.0) s.axis = aa.axis();

  const auto tr = plan_profile(d, lim.v_max, lim.a_max);
  const auto rot = plan_profile(angle, lim.w_max, lim.alpha_max);
  s.duration = std::max(tr.t_total, rot.t_total);
  s.translation = tr.t_total < s.duration ? stretch_profile(d, lim.a_max, s.duration) : tr;
  s.rotation = rot.t_total < s.duration ? stretch_profile(angle, lim.alpha_max, s.duration) : rot;
  return s;
}

}  // namespace

CartesianTrajectory plan_cartesian(const std::vector<Pose>& waypoints, const CartesianLimits& lim,
                                   double t_start) {
  if (waypoints.size() < 2) throw std::invalid_argument("plan_cartesian: need at least 2 waypoints");
  CartesianTrajectory traj;
  traj.initial = waypoints.front();
  traj.t_start = t_start;
  double t = t_start;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    traj.segments.push_back(plan_segment(waypoints[i], waypoints[i + 1], lim, t));
    t += traj.segments.back().duration;
  }
  return traj;
}

TrajectorySample sample(const CartesianTrajectory& traj, double t) {
  TrajectorySample out;
  if (traj.segments.empty() || t <= traj.t_start) {
    out.pose = traj.segments.empty() ? traj.initial : traj.segments.front().start;
    out.pose.o = canonical(out.pose.o);
    return out;
  }
  if (t >= traj.t_end()) {
    out.pose = traj.segments.back().end;
    out.pose.o = canonical(out.pose.o);
    return out;
  }
  const CartesianSegment* seg = &traj.segments.back();
  for (const auto& s : traj.segments) {
    if (t < s.t_start + s.duration) {
      seg = &s;
      break;
    }
  }
  const double tau = t - seg->t_start;
  const double st = seg->translation.position(tau);
  const double sr = seg->rotation.position(tau);
  out.pose.p = seg->start.p + st * seg->direction;
  out.pose.o = canonical(Quat(Eigen::AngleAxisd(sr, seg->axis)) * seg->start.o);
  out.twist.head<3>() = seg->translation.velocity(tau) * seg->direction;
  out.twist.tail<3>() = seg->rotation.velocity(tau) * seg->axis;
  out.accel.head<3>() = seg->translation.acceleration(tau) * seg->direction;
  out.accel.tail<3>() = seg->rotation.acceleration(tau) * seg->axis;
  return out;
}

std::vector<HarvestWaypoint> harvest_waypoints(const Pose& peduncle, const Pose& box,
                                               const HarvestPlanConfig& cfg) {
  if (!(cfg.pre_grasp_offset > 0.0))
    throw std::invalid_argument("harvest_waypoints: pre-grasp offset must be positive");
  const Vec3 axis = cfg.approach_axis.normalized();
  Pose pre = peduncle;
  pre.p = peduncle.p + cfg.pre_grasp_offset * (peduncle.o * axis);
  Pose release;
  release.p = box.p + box.o * cfg.release_offset.p;
  release.o = canonical(box.o * cfg.release_offset.o);
  return {
      {"pre-grasp", pre, {}},
      {"grasp", peduncle, {"close gripper", "cut peduncle"}},
      {"pre-release", cfg.pre_release, {}},
      {"release", release, {"open gripper"}},
      {"home", cfg.home, {}},
  };
}

}  // namespace agrihqp
