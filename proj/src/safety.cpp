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
#include "agrihqp/safety.hpp"

#include <algorithm>
#include <stdexcept>

namespace agrihqp {

namespace {

constexpr double kDegenerateDistance = 1e-6;

TaskConstraint make_task(int rows, int cols, std::string label) {
  TaskConstraint t;
  t.J = MatrixX::Zero(rows, cols);
  t.lo = VectorX::Constant(rows, -kInfinity);
  t.hi = VectorX::Constant(rows, kInfinity);
  t.slack_weight = VectorX::Constant(rows, kSafetySlackWeight);
  t.label = std::move(label);
  t.row_labels.resize(static_cast<std::size_t>(rows));
  return t;
}

}  // namespace

void VirtualWall::check() const {
  if ((p2 - p1).cross(p3 - p1).norm() <= 1e-9)
    throw ConfigError("wall '" + name + "': points are collinear");
  if (!(threshold > 0.0)) throw ConfigError("wall '" + name + "': threshold must be positive");
  if (!(gain > 0.0)) throw ConfigError("wall '" + name + "': gain must be positive");
}

void CollisionPair::check() const {
  if (!(threshold > 0.0)) throw ConfigError("pair '" + name + "': threshold must be positive");
  if (!(gain > 0.0)) throw ConfigError("pair '" + name + "': gain must be positive");
  if (const auto* c = std::get_if<Capsule>(&obstacle)) {
    if (c->radius < 0.0) throw ConfigError("pair '" + name + "': negative capsule radius");
    if ((c->b - c->a).norm() <= 0.0) throw ConfigError("pair '" + name + "': zero-length capsule");
  }
}

SegmentProjection segment_point_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                         double radius) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) throw std::invalid_argument("segment_point_distance: zero-length segment");
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  const Vec3 c = a + s * ab;
  return {c, std::max(0.0, (p - c).norm() - radius)};
}

TaskConstraint joint_position_limits(const JointState& state, const RobotModel& model,
                                     const CbfGains& gains, std::vector<Barrier>* barriers) {
  const int n = model.decision_size();
  auto t = make_task(n, n, "joint_position");
  const auto& lim = model.limits();
  const auto& names = model.decision_names();
  for (int d = 0; d < n; ++d) {
    const int s = model.state_of_decision(d);
    t.row_labels[static_cast<std::size_t>(d)] = "jp_" + names[static_cast<std::size_t>(d)];
    if (s < 0) continue;  // forward speed has no position of its own
    t.J(d, d) = 1.0;
    const double q = state.q[s];
    const auto& sname = model.state_names()[static_cast<std::size_t>(s)];
    if (!is_unbounded_below(lim.pos_lower[s])) {
      const double h = q - lim.pos_lower[s];
      t.lo[d] = -gains.lower * h;
      if (barriers) barriers->push_back({"jp_lo_" + sname, h});
    }
    if (!is_unbounded_above(lim.pos_upper[s])) {
      const double h = lim.pos_upper[s] - q;
      t.hi[d] = gains.upper * h;
      if (barriers) barriers->push_back({"jp_hi_" + sname, h});
    }
    // Outside the box both sides push inward; keep the row well formed.
    if (t.lo[d] > t.hi[d]) t.lo[d] = t.hi[d];
  }
  return t;
}

TaskConstraint joint_velocity_limits(const RobotModel& model,
                                     const std::optional<VelocityOverride>& overrides) {
  const int n = model.decision_size();
  auto t = make_task(n, n, "joint_velocity");
  t.J.setIdentity();
  const VectorX& lo = overrides ? overrides->lo : model.limits().vel_lower;
  const VectorX& hi = overrides ? overrides->hi : model.limits().vel_upper;
  if (lo.size() != n || hi.size() != n)
    throw std::invalid_argument("joint_velocity_limits: override has the wrong size");
  for (int d = 0; d < n; ++d) {
    t.lo[d] = clamp_bound(lo[d]);
    t.hi[d] = clamp_bound(hi[d]);
    t.row_labels[static_cast<std::size_t>(d)] = "jv_" + model.decision_names()[static_cast<std::size_t>(d)];
  }
  return t;
}

TaskConstraint virtual_wall(const Kinematics& kin, const VirtualWall& wall,
                            std::vector<Barrier>* barriers) {
  const auto& model = kin.model();
  const int rows = static_cast<int>(wall.points.size());
  auto t = make_task(rows, model.decision_size(), "wall_" + wall.name);
  const Eigen::Isometry3d tf = kin.frame_transform(wall.frame);
  const Vec3 p1 = tf * wall.p1;
  const Vec3 normal = (tf.linear() * (wall.p2 - wall.p1).cross(wall.p3 - wall.p1)).normalized();
  for (int r = 0; r < rows; ++r) {
    const auto& pt = model.points().at(static_cast<std::size_t>(wall.points[static_cast<std::size_t>(r)]));
    const Vec3 p = kin.point_position(pt);
    // The wall moves with its frame: use the velocity of p relative to it.
    const Vec3 local = tf.inverse() * p;
    const Jacobian3 rel = kin.point_jacobian(pt) - kin.point_jacobian(wall.frame, local);
    const double sigma = normal.dot(p - p1);
    const double h = sigma - wall.threshold;
    t.J.row(r) = normal.transpose() * rel;
    t.lo[r] = -wall.gain * h;
    const std::string label = "wall_" + wall.name + "_" + pt.name;
    t.row_labels[static_cast<std::size_t>(r)] = label;
    if (barriers) barriers->push_back({label, h});
  }
  return t;
}

TaskConstraint virtual_wall(const RobotModel& model, const JointState& state,
                            const VirtualWall& wall, std::vector<Barrier>* barriers) {
  return virtual_wall(Kinematics(model, state.q), wall, barriers);
}

TaskConstraint self_collision(const Kinematics& kin, const std::vector<CollisionPair>& pairs,
                              std::vector<Barrier>* barriers, std::vector<std::string>* degenerate) {
  const auto& model = kin.model();
  const int rows = static_cast<int>(pairs.size());
  auto t = make_task(rows, model.decision_size(), "self_collision");
  for (int r = 0; r < rows; ++r) {
    const auto& pair = pairs[static_cast<std::size_t>(r)];
    const auto& pj = model.points().at(static_cast<std::size_t>(pair.point));
    const Vec3 p = kin.point_position(pj);
    Vec3 pl;
    Jacobian3 jl;
    double radius = 0.0;
    if (const auto* idx = std::get_if<int>(&pair.obstacle)) {
      const auto& other = model.points().at(static_cast<std::size_t>(*idx));
      pl = kin.point_position(other);
      jl = kin.point_jacobian(other);
    } else {
      const auto& cap = std::get<Capsule>(pair.obstacle);
      const Eigen::Isometry3d tf = kin.frame_transform(cap.frame);
      pl = segment_point_distance(p, tf * cap.a, tf * cap.b, 0.0).closest;
      jl = kin.point_jacobian(cap.frame, tf.inverse() * pl);
      radius = cap.radius;
    }
    const std::string label = "sc_" + pair.name;
    t.row_labels[static_cast<std::size_t>(r)] = label;
    const Vec3 diff = p - pl;
    const double dist = diff.norm();
    if (dist < kDegenerateDistance) {
      if (degenerate) degenerate->push_back(label);
      if (barriers) barriers->push_back({label, dist - radius - pair.threshold});
      continue;
    }
    const Vec3 normal = diff / dist;
    const double h = (dist - radius) - pair.threshold;
    t.J.row(r) = normal.transpose() * (kin.point_jacobian(pj) - jl);
    t.lo[r] = -pair.gain * h;
    if (barriers) barriers->push_back({label, h});
  }
  return t;
}

TaskConstraint self_collision(const RobotModel& model, const JointState& state,
                              const std::vector<CollisionPair>& pairs,
                              std::vector<Barrier>* barriers, std::vector<std::string>* degenerate) {
  return self_collision(Kinematics(model, state.q), pairs, barriers, degenerate);
}

int SafetyStack::rows() const {
  int r = 0;
  for (const auto& t : tasks) r += t.rows();
  return r;
}

SafetyStack build_safety(const Kinematics& kin, const JointState& state, const SafetyConfig& cfg) {
  SafetyStack s;
  const auto& model = kin.model();
  s.tasks.push_back(joint_position_limits(state, model, cfg.joint_position, &s.barriers));
  s.tasks.push_back(joint_velocity_limits(model, cfg.velocity));
  for (const auto& w : cfg.walls) s.tasks.push_back(virtual_wall(kin, w, &s.barriers));
  if (!cfg.pairs.empty())
    s.tasks.push_back(self_collision(kin, cfg.pairs, &s.barriers, &s.degenerate));
  for (auto& t : s.tasks) t.slack_weight.setConstant(cfg.slack_weight);
  return s;
}

}  // namespace agrihqp
