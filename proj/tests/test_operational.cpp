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
#include <cmath>
#include <random>

#include "agrihqp/hierarchy.hpp"
#include "agrihqp/operational.hpp"
#include "agrihqp/sim.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agrihqp;

namespace {

Quat random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  return Quat(N(rng), N(rng), N(rng), N(rng)).normalized();
}

// Standard working posture of the default model (both arms bent).
VectorX working_q(const RobotModel& m) {
  VectorX q = VectorX::Zero(m.state_size());
  auto set = [&](const char* joint, double v) { q(m.joints()[*m.find_joint(joint)].state_index) = v; };
  set("torso_lift", 0.1);
  for (const char* side : {"l_", "r_"}) {
    set((std::string(side) + "shoulder_pitch").c_str(), 0.75);
    set((std::string(side) + "elbow").c_str(), -1.35);
    set((std::string(side) + "wrist_pitch").c_str(), 1.05);
  }
  return q;
}

CartesianReference hold(const Kinematics& kin) {
  CartesianReference ref;
  ref.pose[0] = kin.pose(kin.model().frame_index(frames::kEeLeft));
  ref.pose[1] = kin.pose(kin.model().frame_index(frames::kEeRight));
  return ref;
}

Vec12 twist(const Kinematics& kin, const VectorX& qdot) {
  Vec12 v;
  v.head<6>() = kin.jacobian(kin.model().frame_index(frames::kEeLeft)) * qdot;
  v.tail<6>() = kin.jacobian(kin.model().frame_index(frames::kEeRight)) * qdot;
  return v;
}

}  // namespace

TEST_CASE("quaternion error examples") {
  const Quat id = Quat::Identity();
  CHECK(quaternion_error(id, id).norm() == 0.0);
  const Quat z90(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  CHECK((quaternion_error(z90, id) - Vec3(0, 0, std::sin(M_PI / 4))).norm() < 1e-12);
  Quat neg = z90;
  neg.coeffs() = -neg.coeffs();
  CHECK(quaternion_error(neg, z90).norm() < 1e-15);
}

TEST_CASE("quaternion error vanishes exactly for equal rotations") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 500; ++k) {
    const Quat a = random_rotation(rng);
    const Quat b = random_rotation(rng);
    Quat a_neg = a;
    a_neg.coeffs() = -a.coeffs();
    CHECK(quaternion_error(a, a).norm() < 1e-15);
    CHECK(quaternion_error(a_neg, a).norm() < 1e-15);
    if (a.angularDistance(b) > 1e-6) CHECK(quaternion_error(a, b).norm() > 0.0);
  }
}

TEST_CASE("admittance constraint") {
  const auto& m = testutil::canopies();
  const Kinematics kin(m, working_q(m));
  const auto params = AdmittanceParams::defaults();
  ControllerMemory mem;
  mem.Ts = 0.01;

  SUBCASE("row scaling is Km/Ts + Kd") {
    auto ref = hold(kin);
    const auto t = admittance_constraint(kin, mem, ref, Vec12::Zero(), params);
    const auto J = kin.jacobian(m.frame_index(frames::kEeLeft));
    CHECK((t.J.row(0) - 2253.0 * J.row(0)).norm() < 1e-9);
    CHECK((t.J.row(3) - (3.0 / 0.01 + 27.0) * J.row(3)).norm() < 1e-9);
    CHECK(t.lo == t.hi);
  }
  SUBCASE("consistent memory keeps perfect tracking") {
    auto ref = hold(kin);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N(0.0, 0.1);
    for (int i = 0; i < 12; ++i) {
      ref.v(i) = N(rng);
      ref.a(i) = N(rng);
    }
    mem.v_prev = ref.v - mem.Ts * ref.a;
    const auto t = admittance_constraint(kin, mem, ref, Vec12::Zero(), params);
    const Vec12 scale = params.km / mem.Ts + params.kd;
    CHECK((t.lo - scale.cwiseProduct(ref.v)).norm() < 1e-9);
  }
  SUBCASE("static equilibrium displaced along the push") {
    auto ref = hold(kin);
    ref.pose[1].p.x() -= 0.010;  // EE sits 1 cm ahead of the reference
    Vec12 h = Vec12::Zero();
    h(6) = 8.0;
    const auto t = admittance_constraint(kin, mem, ref, h, params);
    CHECK(t.lo.norm() < 1e-12);
  }
}

TEST_CASE("hand guiding constraint") {
  const auto& m = testutil::canopies();
  ControllerMemory mem;
  mem.Ts = 0.01;
  const auto params = AdmittanceParams::hand_guiding();
  SUBCASE("no force at rest asks for no motion") {
    const Kinematics kin(m, working_q(m));
    CHECK(hand_guiding_constraint(kin, mem, Vec12::Zero(), params).lo.norm() == 0.0);
  }
  SUBCASE("closed loop reaches the damping velocity then decays geometrically") {
    VectorX q = working_q(m);
    Vec12 h = Vec12::Zero();
    h(6) = 25.3;
    Vec12 v = Vec12::Zero();
    mem.prime(v);
    auto tick = [&](const Vec12& wrench) {
      const Kinematics kin(m, q);
      Hierarchy hq;
      hq.n_u = m.decision_size();
      hq.levels.push_back({hand_guiding_constraint(kin, mem, wrench, params)});
      const auto s = solve_cascade(hq);
      REQUIRE(s.ok());
      v = twist(kin, s.qdot);
      mem.v_prev = v;
      q = integrate(m, q, s.qdot, mem.Ts);
    };
    for (int k = 0; k < 500; ++k) tick(h);
    CHECK(v(6) == doctest::Approx(0.1).epsilon(1e-3));
    const double before = v(6);
    tick(Vec12::Zero());
    CHECK(v(6) / before == doctest::Approx(2000.0 / 2253.0).epsilon(1e-4));
  }
}

TEST_CASE("preferred posture rows") {
  const auto& m = testutil::canopies();
  const JointState st = testutil::rest(m, working_q(m));
  const int n = m.decision_size();
  VectorX gains = VectorX::Constant(n, 10.0);
  gains.head(4) << 0.0, 2.0, 2.0, 0.5;
  const VectorX qd = decision_positions(m, st.q);
  auto t = preferred_posture_constraint(m, st, qd, VectorX::Zero(n), gains);
  CHECK(t.lo.norm() == 0.0);
  CHECK(t.J.isIdentity());
  VectorX off = qd;
  const int elbow = *m.find_decision("r_elbow");
  off(elbow) += 0.1;
  t = preferred_posture_constraint(m, st, off, VectorX::Zero(n), gains);
  CHECK(t.lo(elbow) == doctest::Approx(1.0));
  CHECK_THROWS_AS(preferred_posture_constraint(m, st, VectorX::Zero(3), VectorX::Zero(n), gains),
                  std::invalid_argument);
}
