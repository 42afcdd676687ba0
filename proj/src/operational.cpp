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
#include "agrihqp/operational.hpp"

#include <stdexcept>

namespace agrihqp {

Vec3 quaternion_error(const Quat& o_d, const Quat& o) {
  Quat e = o_d * o.conjugate();
  if (e.w() < 0.0) e.coeffs() = -e.coeffs();
  return e.vec();
}

AdmittanceParams AdmittanceParams::from_scalars(double km_p, double km_o, double kd_p,
                                                double kd_o, double kp_p, double kp_o) {
  AdmittanceParams p;
  for (int ee = 0; ee < 2; ++ee) {
    p.km.segment<3>(6 * ee).setConstant(km_p);
    p.km.segment<3>(6 * ee + 3).setConstant(km_o);
    p.kd.segment<3>(6 * ee).setConstant(kd_p);
    p.kd.segment<3>(6 * ee + 3).setConstant(kd_o);
    p.kp.segment<3>(6 * ee).setConstant(kp_p);
    p.kp.segment<3>(6 * ee + 3).setConstant(kp_o);
  }
  return p;
}

AdmittanceParams AdmittanceParams::defaults() {
  return from_scalars(20.0, 3.0, 253.0, 27.0, 800.0, 60.0);
}

AdmittanceParams AdmittanceParams::hand_guiding() {
  return from_scalars(20.0, 3.0, 253.0, 27.0, 0.0, 0.0);
}

void AdmittanceParams::check() const {
  if ((km.array() <= 0.0).any()) throw std::invalid_argument("admittance: mass must be positive");
  if ((kd.array() <= 0.0).any()) throw std::invalid_argument("admittance: damping must be positive");
  if ((kp.array() < 0.0).any())
    throw std::invalid_argument("admittance: stiffness must be non-negative");
}

Vec12 pose_error(const Kinematics& kin, const CartesianReference& ref) {
  const auto& model = kin.model();
  const std::array<int, 2> ee = {model.frame_index(frames::kEeLeft),
                                 model.frame_index(frames::kEeRight)};
  Vec12 e;
  for (int i = 0; i < 2; ++i) {
    const Pose cur = kin.pose(ee[static_cast<std::size_t>(i)]);
    const Pose& des = ref.pose[static_cast<std::size_t>(i)];
    e.segment<3>(6 * i) = des.p - cur.p;
    e.segment<3>(6 * i + 3) = quaternion_error(des.o, cur.o);
  }
  return e;
}

namespace {

MatrixX dual_jacobian(const Kinematics& kin) {
  const auto& model = kin.model();
  MatrixX J(12, model.decision_size());
  J.topRows<6>() = kin.jacobian(model.frame_index(frames::kEeLeft));
  J.bottomRows<6>() = kin.jacobian(model.frame_index(frames::kEeRight));
  return J;
}

void label_rows(TaskConstraint& t, const std::string& prefix) {
  static const char* kAxes[] = {"x", "y", "z", "rx", "ry", "rz"};
  t.row_labels.clear();
  for (int ee = 0; ee < 2; ++ee)
    for (int k = 0; k < 6; ++k)
      t.row_labels.push_back(prefix + (ee == 0 ? "_left_" : "_right_") + kAxes[k]);
}

}  // namespace

TaskConstraint admittance_constraint(const Kinematics& kin, const ControllerMemory& mem,
                                     const CartesianReference& ref, const Vec12& h,
                                     const AdmittanceParams& params, double weight) {
  if (!(mem.Ts > 0.0)) throw std::invalid_argument("admittance: Ts must be positive");
  const Vec12 scale = params.km / mem.Ts + params.kd;
  const MatrixX J = scale.asDiagonal() * dual_jacobian(kin);
  const Vec12 b = params.km.cwiseProduct(ref.a) + (params.km / mem.Ts).cwiseProduct(mem.v_prev) +
                  params.kd.cwiseProduct(ref.v) + params.kp.cwiseProduct(pose_error(kin, ref)) + h;
  auto t = TaskConstraint::equality(J, b, weight, "admittance");
  label_rows(t, "adm");
  return t;
}

TaskConstraint admittance_constraint(const RobotModel& model, const JointState& state,
                                     const ControllerMemory& mem, const CartesianReference& ref,
                                     const Vec12& h, const AdmittanceParams& params,
                                     double weight) {
  return admittance_constraint(Kinematics(model, state.q), mem, ref, h, params, weight);
}

TaskConstraint hand_guiding_constraint(const Kinematics& kin, const ControllerMemory& mem,
                                       const Vec12& h, const AdmittanceParams& params,
                                       double weight) {
  if (!(mem.Ts > 0.0)) throw std::invalid_argument("hand guiding: Ts must be positive");
  const Vec12 scale = params.km / mem.Ts + params.kd;
  const MatrixX J = scale.asDiagonal() * dual_jacobian(kin);
  const Vec12 b = (params.km / mem.Ts).cwiseProduct(mem.v_prev) + h;
  auto t = TaskConstraint::equality(J, b, weight, "hand_guiding");
  label_rows(t, "hg");
  return t;
}

TaskConstraint hand_guiding_constraint(const RobotModel& model, const JointState& state,
                                       const ControllerMemory& mem, const Vec12& h,
                                       const AdmittanceParams& params, double weight) {
  return hand_guiding_constraint(Kinematics(model, state.q), mem, h, params, weight);
}

VectorX decision_positions(const RobotModel& model, const VectorX& q) {
  VectorX out = VectorX::Zero(model.decision_size());
  for (int d = 0; d < model.decision_size(); ++d) {
    const int s = model.state_of_decision(d);
    if (s >= 0) out[d] = q[s];
  }
  return out;
}

TaskConstraint preferred_posture_constraint(const RobotModel& model, const JointState& state,
                                            const VectorX& q_d, const VectorX& qdot_d,
                                            const VectorX& gains, double weight) {
  const int n = model.decision_size();
  if (q_d.size() != n || qdot_d.size() != n || gains.size() != n)
    throw std::invalid_argument("preferred_posture_constraint: dimension mismatch");
  const VectorX q = decision_positions(model, state.q);
  VectorX b = qdot_d;
  for (int d = 0; d < n; ++d)
    if (model.state_of_decision(d) >= 0) b[d] += gains[d] * (q_d[d] - q[d]);
  auto t = TaskConstraint::equality(MatrixX::Identity(n, n), b, weight, "posture");
  for (const auto& name : model.decision_names()) t.row_labels.push_back("posture_" + name);
  return t;
}

}  // namespace agrihqp
