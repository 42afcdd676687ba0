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

#include <array>

#include "agrihqp/hierarchy.hpp"
#include "agrihqp/model.hpp"

namespace agrihqp {

/// Vector part of o_d * o^-1, sign chosen for the shortest rotation.
Vec3 quaternion_error(const Quat& o_d, const Quat& o);

/// Diagonals of the 12x12 virtual mass, damping and stiffness matrices,
/// ordered [left linear, left angular, right linear, right angular].
struct AdmittanceParams {
  Vec12 km = Vec12::Ones();
  Vec12 kd = Vec12::Ones();
  Vec12 kp = Vec12::Zero();

  /// Same six scalars on both end-effectors.
  static AdmittanceParams from_scalars(double km_p, double km_o, double kd_p, double kd_o,
                                       double kp_p, double kp_o);
  /// Default autonomous gains: mass {20, 3}, damping {253, 27}, stiffness {800, 60}.
  static AdmittanceParams defaults();
  /// Default gains with zero stiffness.
  static AdmittanceParams hand_guiding();

  void check() const;  // throws std::invalid_argument
};

struct CartesianReference {
  std::array<Pose, 2> pose;  // left, right
  Vec12 v = Vec12::Zero();
  Vec12 a = Vec12::Zero();
};

/// Previous commanded twist of both end-effectors.
struct ControllerMemory {
  Vec12 v_prev = Vec12::Zero();
  double Ts = 0.01;
  bool initialized = false;

  /// First-tick initialisation from the measured twist.
  void prime(const Vec12& measured) {
    if (!initialized) {
      v_prev = measured;
      initialized = true;
    }
  }
};

/// Stacked pose errors [p_d - p; quaternion_error] for both end-effectors.
Vec12 pose_error(const Kinematics& kin, const CartesianReference& ref);

/// (Km/Ts + Kd) J qdot = Km a_d + Km/Ts v_prev + Kd v_d + Kp e + h, where h
/// is the wrench applied on the end-effectors. Steady state: p - p_d = h/Kp.
TaskConstraint admittance_constraint(const Kinematics& kin, const ControllerMemory& mem,
                                     const CartesianReference& ref, const Vec12& h,
                                     const AdmittanceParams& params,
                                     double weight = kOperationalSlackWeight);
TaskConstraint admittance_constraint(const RobotModel& model, const JointState& state,
                                     const ControllerMemory& mem, const CartesianReference& ref,
                                     const Vec12& h, const AdmittanceParams& params,
                                     double weight = kOperationalSlackWeight);

/// Zero-stiffness admittance without references: b = Km/Ts v_prev + h.
TaskConstraint hand_guiding_constraint(const Kinematics& kin, const ControllerMemory& mem,
                                       const Vec12& h, const AdmittanceParams& params,
                                       double weight = kOperationalSlackWeight);
TaskConstraint hand_guiding_constraint(const RobotModel& model, const JointState& state,
                                       const ControllerMemory& mem, const Vec12& h,
                                       const AdmittanceParams& params,
                                       double weight = kOperationalSlackWeight);

/// qdot = qdot_d + K (q_d - q) in decision coordinates. The base forward
/// speed has no position, so its error term is zero; the yaw rate uses the
/// heading.
TaskConstraint preferred_posture_constraint(const RobotModel& model, const JointState& state,
                                            const VectorX& q_d, const VectorX& qdot_d,
                                            const VectorX& gains,
                                            double weight = kOptimizationSlackWeight);

/// Position of each decision variable (heading for the yaw rate, 0 for the
/// forward speed).
VectorX decision_positions(const RobotModel& model, const VectorX& q);

}  // namespace agrihqp
