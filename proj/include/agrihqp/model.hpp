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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agrihqp/common.hpp"

namespace agrihqp {

enum class JointKind { kPlanarBase, kPrismatic, kRevolute };

/// One actuated joint of the tree. A planar base owns three state slots
/// (x, y, heading) and two decision slots (forward speed v, yaw rate w).
struct JointDesc {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  Vec3 axis = Vec3::UnitZ();  // unit vector in the joint frame
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();  // parent link -> joint frame
  int parent = -1;  // -1: world
  int state_index = 0;
  int decision_index = 0;

  int state_width() const { return kind == JointKind::kPlanarBase ? 3 : 1; }
  int decision_width() const { return kind == JointKind::kPlanarBase ? 2 : 1; }
};

/// Named frame rigidly attached to the child link of `joint` (-1: world).
struct FrameDesc {
  std::string name;
  int joint = -1;
  Eigen::Isometry3d offset = Eigen::Isometry3d::Identity();
};

/// Monitored point: a frame plus a local offset in metres.
struct BodyPoint {
  std::string name;
  int frame = 0;
  Vec3 offset = Vec3::Zero();
};

/// Position limits are indexed by state slot, velocity limits by decision slot.
struct JointLimits {
  VectorX pos_lower, pos_upper;
  VectorX vel_lower, vel_upper;
};

/// Sizes n_b, n_t, n_a of the decision-vector partition
/// [base | torso | left arm | right arm].
struct Partition {
  int base = 0;
  int torso = 0;
  int arm = 0;
};

/// Immutable kinematic tree. Every joint also defines an implicit frame named
/// after the joint, and "world" is always frame 0.
class RobotModel {
 public:
  /// Validates all invariants; throws ModelError on violation.
  RobotModel(std::string name, std::vector<JointDesc> joints, std::vector<FrameDesc> frames,
             std::vector<BodyPoint> points, JointLimits limits,
             std::optional<Partition> partition = std::nullopt);

  const std::string& name() const { return name_; }
  const std::vector<JointDesc>& joints() const { return joints_; }
  const std::vector<FrameDesc>& frames() const { return frames_; }
  const std::vector<BodyPoint>& points() const { return points_; }
  const JointLimits& limits() const { return limits_; }
  const std::optional<Partition>& partition() const { return partition_; }

  int state_size() const { return state_size_; }
  int decision_size() const { return decision_size_; }
  /// Degrees of freedom n = n_b + n_t + 2 n_a, i.e. the decision-vector size.
  int dof() const { return decision_size_; }

  /// Index of the planar base joint or -1.
  int planar_base() const { return planar_base_; }

  std::optional<int> find_frame(std::string_view name) const;
  int frame_index(std::string_view name) const;  // throws ModelError
  std::optional<int> find_point(std::string_view name) const;
  int point_index(std::string_view name) const;  // throws ModelError
  std::optional<int> find_joint(std::string_view name) const;

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& decision_names() const { return decision_names_; }
  std::optional<int> find_decision(std::string_view name) const;

  /// Decision indices of a partition group: "base", "torso", "left_arm",
  /// "right_arm", "arms" or "all". Throws ModelError for unknown groups or
  /// when the model has no partition.
  std::vector<int> decision_group(std::string_view group) const;

  /// Map from a decision index to the state index it drives. Base v maps to -1
  /// (it has no position of its own); base w maps to the heading slot.
  int state_of_decision(int decision) const;

 private:
  std::string name_;
  std::vector<JointDesc> joints_;
  std::vector<FrameDesc> frames_;
  std::vector<BodyPoint> points_;
  JointLimits limits_;
  std::optional<Partition> partition_;
  int state_size_ = 0;
  int decision_size_ = 0;
  int planar_base_ = -1;
  std::vector<std::string> state_names_;
  std::vector<std::string> decision_names_;
};

struct JointState {
  VectorX q;     // state_size()
  VectorX qdot;  // decision_size()
  double t = 0.0;
};

/// Position plus unit quaternion; quaternions leaving this library have w >= 0.
struct Pose {
  Vec3 p = Vec3::Zero();
  Quat o = Quat::Identity();
};

struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  std::string frame = "world";

  Vec6 stacked() const {
    Vec6 v;
    v << force, moment;
    return v;
  }
};

/// Returns q with unit norm and non-negative scalar part.
Quat canonical(const Quat& q);

using Jacobian6 = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Jacobian3 = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Forward kinematics of every link for one configuration. Holds a reference
/// to the model, which must outlive it.
class Kinematics {
 public:
  Kinematics(const RobotModel& model, const VectorX& q);

  const RobotModel& model() const { return *model_; }
  const VectorX& q() const { return q_; }

  Eigen::Isometry3d frame_transform(int frame) const;
  Pose pose(int frame) const;
  Vec3 point_position(int frame, const Vec3& offset) const;
  Vec3 point_position(const BodyPoint& point) const {
    return point_position(point.frame, point.offset);
  }

  /// Twist Jacobian of `frame`: [linear; angular] = J * qdot.
  Jacobian6 jacobian(int frame) const;
  /// Linear-velocity Jacobian of a point rigidly attached to `frame`.
  Jacobian3 point_jacobian(int frame, const Vec3& offset) const;
  Jacobian3 point_jacobian(const BodyPoint& point) const {
    return point_jacobian(point.frame, point.offset);
  }

 private:
  void fill_columns(int joint, const Vec3& p, Jacobian6& jac) const;

  const RobotModel* model_;
  VectorX q_;
  std::vector<Eigen::Isometry3d> joint_frame_;  // world pose of joint frame, before motion
  std::vector<Eigen::Isometry3d> link_;         // world pose of child link
};

/// Maps unicycle inputs (v, w) to planar pose rates (xdot, ydot, thetadot).
Eigen::Matrix<double, 3, 2> base_velocity_mapping(double heading);

Pose forward_kinematics(const RobotModel& model, const JointState& state, std::string_view frame);
Jacobian6 geometric_jacobian(const RobotModel& model, const JointState& state,
                             std::string_view frame);
Jacobian3 point_jacobian(const RobotModel& model, const JointState& state, std::string_view frame,
                         const Vec3& offset);
/// Rows 0-5: left end-effector, rows 6-11: right end-effector.
MatrixX stacked_dual_arm_jacobian(const RobotModel& model, const JointState& state);

/// Frame names every dual-arm model provides.
namespace frames {
inline constexpr std::string_view kEeLeft = "ee_left";
inline constexpr std::string_view kEeRight = "ee_right";
inline constexpr std::string_view kWristLeft = "wrist_left";
inline constexpr std::string_view kWristRight = "wrist_right";
inline constexpr std::string_view kTorso = "torso";
inline constexpr std::string_view kHead = "head";
inline constexpr std::string_view kBase = "base";
}  // namespace frames

/// Parses a model document. Any structural or semantic error surfaces as
/// ConfigError with a "model: " prefix.
RobotModel parse_model(std::string_view json_text);
RobotModel load_model(const std::filesystem::path& path);

}  // namespace agrihqp
