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
#include "agrihqp/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json_util.hpp"

namespace agrihqp {

namespace {

std::string joint_label(const JointDesc& j) { return "joint '" + j.name + "'"; }

}  // namespace

RobotModel::RobotModel(std::string name, std::vector<JointDesc> joints,
                       std::vector<FrameDesc> frames, std::vector<BodyPoint> points,
                       JointLimits limits, std::optional<Partition> partition)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      points_(std::move(points)),
      limits_(std::move(limits)),
      partition_(partition) {
  std::unordered_set<std::string> names;
  int state = 0;
  int decision = 0;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    auto& j = joints_[i];
    if (j.name.empty() || !names.insert(j.name).second)
      throw ModelError("duplicate or empty joint name '" + j.name + "'");
    if (std::abs(j.axis.norm() - 1.0) >= 1e-9)
      throw ModelError(joint_label(j) + ": axis is not unit-norm");
    if (j.parent >= static_cast<int>(i) || j.parent < -1)
      throw ModelError(joint_label(j) + ": parent must precede the joint");
    if (j.kind == JointKind::kPlanarBase) {
      if (planar_base_ >= 0) throw ModelError("more than one planar-base joint");
      if (j.parent != -1) throw ModelError(joint_label(j) + ": planar base must be the root");
      planar_base_ = static_cast<int>(i);
      state_names_.insert(state_names_.end(), {j.name + "_x", j.name + "_y", j.name + "_theta"});
      decision_names_.insert(decision_names_.end(), {j.name + "_v", j.name + "_omega"});
    } else {
      state_names_.push_back(j.name);
      decision_names_.push_back(j.name);
    }
    j.state_index = state;
    j.decision_index = decision;
    state += j.state_width();
    decision += j.decision_width();
  }
  state_size_ = state;
  decision_size_ = decision;

  // Frame 0 is the world, then one implicit frame per joint, then the named ones.
  frames_.push_back({"world", -1, Eigen::Isometry3d::Identity()});
  for (std::size_t i = 0; i < joints_.size(); ++i)
    frames_.push_back({joints_[i].name, static_cast<int>(i), Eigen::Isometry3d::Identity()});
  for (auto& f : frames) {
    if (f.name == "world" || names.count(f.name))
      throw ModelError("frame name '" + f.name + "' clashes with a joint or reserved name");
    if (f.joint < -1 || f.joint >= static_cast<int>(joints_.size()))
      throw ModelError("frame '" + f.name + "' references an unknown joint");
    names.insert(f.name);
    frames_.push_back(std::move(f));
  }

  std::unordered_set<std::string> point_names;
  for (const auto& p : points_) {
    if (!point_names.insert(p.name).second) throw ModelError("duplicate point '" + p.name + "'");
    if (p.frame < 0 || p.frame >= static_cast<int>(frames_.size()))
      throw ModelError("point '" + p.name + "' references an unknown frame");
  }

  if (limits_.pos_lower.size() != state_size_ || limits_.pos_upper.size() != state_size_)
    throw ModelError("position limits must have " + std::to_string(state_size_) + " entries");
  if (limits_.vel_lower.size() != decision_size_ || limits_.vel_upper.size() != decision_size_)
    throw ModelError("velocity limits must have " + std::to_string(decision_size_) + " entries");
  for (int i = 0; i < state_size_; ++i) {
    if (!(limits_.pos_lower[i] <= limits_.pos_upper[i]))
      throw ModelError("inverted position limits on '" + state_names_[i] + "'");
  }
  for (int i = 0; i < decision_size_; ++i) {
    if (!(limits_.vel_lower[i] < 0.0 && 0.0 < limits_.vel_upper[i]))
      throw ModelError("velocity limits on '" + decision_names_[i] + "' must bracket zero");
  }

  if (partition_) {
    const auto& pt = *partition_;
    if (pt.base < 0 || pt.torso < 0 || pt.arm < 0) throw ModelError("negative partition size");
    if (pt.base + pt.torso + 2 * pt.arm != decision_size_)
      throw ModelError("partition n_b + n_t + 2 n_a = " +
                       std::to_string(pt.base + pt.torso + 2 * pt.arm) +
                       " does not match the decision size " + std::to_string(decision_size_));
    if (planar_base_ < 0 || pt.base != 2)
      throw ModelError("a partitioned model needs exactly one planar base with n_b = 2");
  }
}

std::optional<int> RobotModel::find_frame(std::string_view name) const {
  for (std::size_t i = 0; i < frames_.size(); ++i)
    if (frames_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

int RobotModel::frame_index(std::string_view name) const {
  if (auto f = find_frame(name)) return *f;
  throw ModelError("unknown frame '" + std::string(name) + "'");
}

std::optional<int> RobotModel::find_point(std::string_view name) const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

int RobotModel::point_index(std::string_view name) const {
  if (auto p = find_point(name)) return *p;
  throw ModelError("unknown point '" + std::string(name) + "'");
}

std::optional<int> RobotModel::find_joint(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i)
    if (joints_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> RobotModel::find_decision(std::string_view name) const {
  for (std::size_t i = 0; i < decision_names_.size(); ++i)
    if (decision_names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::vector<int> RobotModel::decision_group(std::string_view group) const {
  auto range = [](int first, int count) {
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = first + i;
    return out;
  };
  if (group == "all") return range(0, decision_size_);
  if (!partition_) throw ModelError("model has no partition; group '" + std::string(group) + "'");
  const auto& pt = *partition_;
  if (group == "base") return range(0, pt.base);
  if (group == "torso") return range(pt.base, pt.torso);
  if (group == "left_arm") return range(pt.base + pt.torso, pt.arm);
  if (group == "right_arm") return range(pt.base + pt.torso + pt.arm, pt.arm);
  if (group == "arms") return range(pt.base + pt.torso, 2 * pt.arm);
  throw ModelError("unknown joint group '" + std::string(group) + "'");
}

int RobotModel::state_of_decision(int decision) const {
  for (const auto& j : joints_) {
    if (decision < j.decision_index || decision >= j.decision_index + j.decision_width()) continue;
    if (j.kind == JointKind::kPlanarBase)
      return decision == j.decision_index ? -1 : j.state_index + 2;
    return j.state_index;
  }
  throw ModelError("decision index out of range");
}

Quat canonical(const Quat& q) {
  Quat out = q.normalized();
  if (out.w() < 0.0) out.coeffs() = -out.coeffs();
  return out;
}

// ---------------------------------------------------------------------------
// Kinematics

Kinematics::Kinematics(const RobotModel& model, const VectorX& q) : model_(&model), q_(q) {
  if (q.size() != model.state_size())
    throw ModelError("configuration has " + std::to_string(q.size()) + " entries, expected " +
                     std::to_string(model.state_size()));
  const auto& joints = model.joints();
  joint_frame_.resize(joints.size());
  link_.resize(joints.size());
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto& j = joints[i];
    const Eigen::Isometry3d parent =
        j.parent < 0 ? Eigen::Isometry3d::Identity() : link_[static_cast<std::size_t>(j.parent)];
    joint_frame_[i] = parent * j.origin;
    Eigen::Isometry3d motion = Eigen::Isometry3d::Identity();
    switch (j.kind) {
      case JointKind::kPlanarBase:
        motion.translation() = Vec3(q[j.state_index], q[j.state_index + 1], 0.0);
        motion.linear() = Eigen::AngleAxisd(q[j.state_index + 2], Vec3::UnitZ()).toRotationMatrix();
        break;
      case JointKind::kPrismatic:
        motion.translation() = j.axis * q[j.state_index];
        break;
      case JointKind::kRevolute:
        motion.linear() = Eigen::AngleAxisd(q[j.state_index], j.axis).toRotationMatrix();
        break;
    }
    link_[i] = joint_frame_[i] * motion;
  }
}

Eigen::Isometry3d Kinematics::frame_transform(int frame) const {
  const auto& f = model_->frames().at(static_cast<std::size_t>(frame));
  if (f.joint < 0) return f.offset;
  return link_[static_cast<std::size_t>(f.joint)] * f.offset;
}

Pose Kinematics::pose(int frame) const {
  const auto t = frame_transform(frame);
  return {t.translation(), canonical(Quat(t.linear()))};
}

Vec3 Kinematics::point_position(int frame, const Vec3& offset) const {
  return frame_transform(frame) * offset;
}

void Kinematics::fill_columns(int joint, const Vec3& p, Jacobian6& jac) const {
  const auto& joints = model_->joints();
  for (int k = joint; k >= 0; k = joints[static_cast<std::size_t>(k)].parent) {
    const auto& j = joints[static_cast<std::size_t>(k)];
    const auto& jf = joint_frame_[static_cast<std::size_t>(k)];
    const int c = j.decision_index;
    switch (j.kind) {
      case JointKind::kPlanarBase: {
        const double th = q_[j.state_index + 2];
        const Vec3 heading = jf.linear() * Vec3(std::cos(th), std::sin(th), 0.0);
        const Vec3 z = jf.linear().col(2);
        const Vec3 o = link_[static_cast<std::size_t>(k)].translation();
        jac.block<3, 1>(0, c) = heading;
        jac.block<3, 1>(3, c).setZero();
        jac.block<3, 1>(0, c + 1) = z.cross(p - o);
        jac.block<3, 1>(3, c + 1) = z;
        break;
      }
      case JointKind::kPrismatic:
        jac.block<3, 1>(0, c) = jf.linear() * j.axis;
        jac.block<3, 1>(3, c).setZero();
        break;
      case JointKind::kRevolute: {
        const Vec3 z = jf.linear() * j.axis;
        jac.block<3, 1>(0, c) = z.cross(p - jf.translation());
        jac.block<3, 1>(3, c) = z;
        break;
      }
    }
  }
}

Jacobian6 Kinematics::jacobian(int frame) const {
  Jacobian6 jac = Jacobian6::Zero(6, model_->decision_size());
  const auto& f = model_->frames().at(static_cast<std::size_t>(frame));
  if (f.joint >= 0) fill_columns(f.joint, frame_transform(frame).translation(), jac);
  return jac;
}

Jacobian3 Kinematics::point_jacobian(int frame, const Vec3& offset) const {
  Jacobian6 jac = Jacobian6::Zero(6, model_->decision_size());
  const auto& f = model_->frames().at(static_cast<std::size_t>(frame));
  if (f.joint >= 0) fill_columns(f.joint, point_position(frame, offset), jac);
  return jac.topRows<3>();
}

Eigen::Matrix<double, 3, 2> base_velocity_mapping(double heading) {
  Eigen::Matrix<double, 3, 2> m;
  m << std::cos(heading), 0.0,  //
      std::sin(heading), 0.0,   //
      0.0, 1.0;
  return m;
}

Pose forward_kinematics(const RobotModel& model, const JointState& state, std::string_view frame) {
  const int f = model.frame_index(frame);
  return Kinematics(model, state.q).pose(f);
}

Jacobian6 geometric_jacobian(const RobotModel& model, const JointState& state,
                             std::string_view frame) {
  const int f = model.frame_index(frame);
  return Kinematics(model, state.q).jacobian(f);
}

Jacobian3 point_jacobian(const RobotModel& model, const JointState& state, std::string_view frame,
                         const Vec3& offset) {
  const int f = model.frame_index(frame);
  return Kinematics(model, state.q).point_jacobian(f, offset);
}

MatrixX stacked_dual_arm_jacobian(const RobotModel& model, const JointState& state) {
  const int left = model.frame_index(frames::kEeLeft);
  const int right = model.frame_index(frames::kEeRight);
  Kinematics kin(model, state.q);
  MatrixX out(12, model.decision_size());
  out.topRows<6>() = kin.jacobian(left);
  out.bottomRows<6>() = kin.jacobian(right);
  return out;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

using json_util::Json;

JointKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "planar_base" || s == "planar-base") return JointKind::kPlanarBase;
  if (s == "prismatic") return JointKind::kPrismatic;
  if (s == "revolute") return JointKind::kRevolute;
  json_util::fail(where, "unknown joint kind '" + s + "'");
}

Eigen::Isometry3d parse_origin(const Json& obj, const std::string& where) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  if (auto it = obj.find("origin_xyz"); it != obj.end())
    t.translation() = json_util::to_vec3(*it, where + ".origin_xyz");
  if (auto it = obj.find("origin_quat_wxyz"); it != obj.end())
    t.linear() = json_util::to_quat_wxyz(*it, where + ".origin_quat_wxyz").toRotationMatrix();
  return t;
}

int resolve_joint(const Json& ref, const std::vector<JointDesc>& joints, const std::string& where) {
  if (ref.is_null()) return -1;
  if (ref.is_number_integer()) {
    const int idx = ref.get<int>();
    if (idx < -1 || idx >= static_cast<int>(joints.size()))
      json_util::fail(where, "joint index out of range");
    return idx;
  }
  const auto name = json_util::to_string(ref, where);
  if (name == "world") return -1;
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == name) return static_cast<int>(i);
  json_util::fail(where, "unknown joint '" + name + "'");
}

}  // namespace

RobotModel parse_model(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  const std::string root = "model";
  const std::string name = doc.value("name", std::string("robot"));

  std::vector<JointDesc> joints;
  const auto& jarr = json_util::require(doc, "joints", root);
  if (!jarr.is_array()) json_util::fail(root + ".joints", "expected an array");
  for (std::size_t i = 0; i < jarr.size(); ++i) {
    const auto where = root + ".joints[" + std::to_string(i) + "]";
    const auto& jj = jarr[i];
    JointDesc j;
    j.name = json_util::to_string(json_util::require(jj, "name", where), where + ".name");
    j.kind = parse_kind(json_util::to_string(json_util::require(jj, "kind", where), where + ".kind"),
                        where + ".kind");
    if (auto it = jj.find("axis"); it != jj.end()) j.axis = json_util::to_vec3(*it, where + ".axis");
    j.origin = parse_origin(jj, where);
    j.parent = resolve_joint(jj.value("parent", Json()), joints, where + ".parent");
    joints.push_back(std::move(j));
  }

  std::vector<FrameDesc> frames;
  if (auto it = doc.find("frames"); it != doc.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto where = root + ".frames[" + std::to_string(i) + "]";
      const auto& fj = (*it)[i];
      FrameDesc f;
      f.name = json_util::to_string(json_util::require(fj, "name", where), where + ".name");
      f.joint = resolve_joint(fj.value("joint", Json()), joints, where + ".joint");
      f.offset = parse_origin(fj, where);
      frames.push_back(std::move(f));
    }
  }

  // Points are resolved against frame names, which needs the implicit frames;
  // collect them first and patch the indices after a provisional model pass.
  struct PendingPoint {
    std::string name, frame;
    Vec3 offset;
  };
  std::vector<PendingPoint> pending;
  if (auto it = doc.find("points"); it != doc.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto where = root + ".points[" + std::to_string(i) + "]";
      const auto& pj = (*it)[i];
      PendingPoint p;
      p.name = json_util::to_string(json_util::require(pj, "name", where), where + ".name");
      p.frame = json_util::to_string(json_util::require(pj, "frame", where), where + ".frame");
      p.offset = pj.contains("offset") ? json_util::to_vec3(pj["offset"], where + ".offset")
                                       : Vec3::Zero();
      pending.push_back(std::move(p));
    }
  }

  int state = 0, decision = 0;
  for (const auto& j : joints) {
    state += j.state_width();
    decision += j.decision_width();
  }
  const auto& lj = json_util::require(doc, "limits", root);
  JointLimits limits;
  limits.pos_lower = json_util::to_bounds(json_util::require(lj, "pos_lower", root + ".limits"),
                                          -kInfinity, root + ".limits.pos_lower");
  limits.pos_upper = json_util::to_bounds(json_util::require(lj, "pos_upper", root + ".limits"),
                                          kInfinity, root + ".limits.pos_upper");
  limits.vel_lower = json_util::to_bounds(json_util::require(lj, "vel_lower", root + ".limits"),
                                          -kInfinity, root + ".limits.vel_lower");
  limits.vel_upper = json_util::to_bounds(json_util::require(lj, "vel_upper", root + ".limits"),
                                          kInfinity, root + ".limits.vel_upper");

  std::optional<Partition> partition;
  if (auto it = doc.find("partition"); it != doc.end() && !it->is_null()) {
    Partition p;
    p.base = it->value("base", 0);
    p.torso = it->value("torso", 0);
    p.arm = it->value("arm", 0);
    partition = p;
  }

  // Frame indices: world + implicit joint frames + declared frames, in order.
  auto frame_id = [&](const std::string& fname, const std::string& where) -> int {
    if (fname == "world") return 0;
    for (std::size_t i = 0; i < joints.size(); ++i)
      if (joints[i].name == fname) return 1 + static_cast<int>(i);
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (frames[i].name == fname) return 1 + static_cast<int>(joints.size() + i);
    json_util::fail(where, "unknown frame '" + fname + "'");
  };
  std::vector<BodyPoint> points;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto where = root + ".points[" + std::to_string(i) + "].frame";
    points.push_back({pending[i].name, frame_id(pending[i].frame, where), pending[i].offset});
  }

  (void)state;
  (void)decision;
  try {
    return RobotModel(name, std::move(joints), std::move(frames), std::move(points),
                      std::move(limits), partition);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

RobotModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace agrihqp
