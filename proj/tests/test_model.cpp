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

#include "acceptance/oracles.hpp"
#include "agrihqp/model.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agrihqp;
using testutil::canopies;

TEST_CASE("default model dimensions and partition") {
  const auto& m = canopies();
  CHECK(m.state_size() == 19);
  CHECK(m.decision_size() == 18);
  REQUIRE(m.partition());
  CHECK(m.partition()->base + m.partition()->torso + 2 * m.partition()->arm == m.dof());
  CHECK(m.decision_group("left_arm").size() == 7);
  CHECK(m.decision_group("arms").size() == 14);
  CHECK_THROWS_AS(m.decision_group("tail"), ModelError);
  for (const auto& j : m.joints()) CHECK(std::abs(j.axis.norm() - 1.0) < 1e-9);
  const auto& lim = m.limits();
  for (int i = 0; i < m.state_size(); ++i) CHECK(lim.pos_lower(i) <= lim.pos_upper(i));
  for (int i = 0; i < m.decision_size(); ++i) {
    CHECK(lim.vel_lower(i) < 0.0);
    CHECK(lim.vel_upper(i) > 0.0);
  }
}

TEST_CASE("single-joint models") {
  SUBCASE("revolute with symmetric limits loads") {
    const auto m = parse_model(testutil::single_joint_json("revolute", "[0, 0, 1]"));
    CHECK(m.state_size() == 1);
    CHECK(m.decision_size() == 1);
  }
  SUBCASE("inverted limits are rejected") {
    CHECK_THROWS_AS(parse_model(testutil::single_joint_json("revolute", "[0, 0, 1]", "[0,0,0]", "1", "-1")),
                    ConfigError);
  }
  SUBCASE("non-unit axis is rejected") {
    CHECK_THROWS_AS(parse_model(testutil::single_joint_json("revolute", "[0, 0, 2]")), ConfigError);
  }
  SUBCASE("malformed document") { CHECK_THROWS_AS(parse_model("{\"joints\": ["), ConfigError); }
  SUBCASE("prismatic translation") {
    const auto m = parse_model(testutil::single_joint_json("prismatic", "[0, 0, 1]"));
    VectorX q(1);
    q << 0.5;
    const Pose p = forward_kinematics(m, testutil::rest(m, q), "tip");
    CHECK(p.p.isApprox(Vec3(0, 0, 0.5), 1e-12));
  }
  SUBCASE("revolute rotation moves the offset") {
    const auto m = parse_model(testutil::single_joint_json("revolute", "[0, 0, 1]", "[1, 0, 0]"));
    VectorX q(1);
    q << M_PI / 2;
    const auto st = testutil::rest(m, q);
    const Pose p = forward_kinematics(m, st, "tip");
    CHECK((p.p - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(std::abs(p.o.norm() - 1.0) < 1e-12);
    const auto J = geometric_jacobian(m, testutil::rest(m, VectorX::Zero(1)), "tip");
    CHECK((J.col(0).head<3>() - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK((J.col(0).tail<3>() - Vec3(0, 0, 1)).norm() < 1e-12);
  }
  SUBCASE("unknown frame") {
    const auto m = parse_model(testutil::single_joint_json("revolute", "[0, 0, 1]"));
    CHECK_THROWS_AS(forward_kinematics(m, testutil::rest(m), "nope"), ModelError);
  }
}

TEST_CASE("home pose golden values") {
  const auto& m = canopies();
  const auto st = testutil::rest(m);
  const Pose l = forward_kinematics(m, st, frames::kEeLeft);
  const Pose r = forward_kinematics(m, st, frames::kEeRight);
  CHECK((l.p - Vec3(0.7, 0.28, 1.3)).norm() < 1e-12);
  CHECK((r.p - Vec3(0.7, -0.28, 1.3)).norm() < 1e-12);
  CHECK(l.o.angularDistance(Quat::Identity()) < 1e-12);
}

TEST_CASE("base velocity mapping") {
  const auto B0 = base_velocity_mapping(0.0);
  CHECK((B0 * Eigen::Vector2d(1, 0) - Vec3(1, 0, 0)).norm() < 1e-15);
  const auto B1 = base_velocity_mapping(M_PI / 2);
  CHECK((B1 * Eigen::Vector2d(1, 0) - Vec3(0, 1, 0)).norm() < 1e-15);
  for (double th : {-2.0, 0.3, 1.7})
    CHECK((base_velocity_mapping(th) * Eigen::Vector2d(0, 1) - Vec3(0, 0, 1)).norm() == 0.0);
}

TEST_CASE("jacobians match finite differences over random states") {
  const auto& m = canopies();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const VectorX q = oracle::random_configuration(m, rng);
    const Kinematics kin(m, q);
    for (int f = 0; f < static_cast<int>(m.frames().size()); ++f)
      CHECK(oracle::column_relative_error(kin.jacobian(f), oracle::fd_frame_jacobian(m, q, f)) < 1e-5);
    for (const auto& p : m.points())
      CHECK(oracle::column_relative_error(kin.point_jacobian(p),
                                          oracle::fd_point_jacobian(m, q, p.frame, p.offset)) < 1e-5);
    for (int f = 0; f < static_cast<int>(m.frames().size()); ++f)
      CHECK(std::abs(kin.pose(f).o.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("point jacobian relations") {
  const auto& m = canopies();
  std::mt19937_64 rng(5);
  const VectorX q = oracle::random_configuration(m, rng);
  const auto st = testutil::rest(m, q);
  const auto J = geometric_jacobian(m, st, frames::kEeRight);
  const auto Jp = point_jacobian(m, st, frames::kEeRight, Vec3::Zero());
  CHECK((J.topRows<3>() - Jp).norm() == doctest::Approx(0.0));
  const auto Jw = point_jacobian(m, st, "world", Vec3(1, 2, 3));
  CHECK(Jw.norm() == 0.0);
}

TEST_CASE("stacked jacobian block structure") {
  const auto& m = canopies();
  std::mt19937_64 rng(3);
  const auto left = m.decision_group("left_arm");
  const auto right = m.decision_group("right_arm");
  for (int k = 0; k < 50; ++k) {
    const auto st = testutil::rest(m, oracle::random_configuration(m, rng));
    const MatrixX J = stacked_dual_arm_jacobian(m, st);
    REQUIRE(J.rows() == 12);
    REQUIRE(J.cols() == m.decision_size());
    CHECK(J.topRows(6) == MatrixX(geometric_jacobian(m, st, frames::kEeLeft)));
    CHECK(J.bottomRows(6) == MatrixX(geometric_jacobian(m, st, frames::kEeRight)));
    for (int c : right) CHECK(J.block(0, c, 6, 1).cwiseAbs().maxCoeff() == 0.0);
    for (int c : left) CHECK(J.block(6, c, 6, 1).cwiseAbs().maxCoeff() == 0.0);
    Eigen::FullPivLU<MatrixX> lu(J);
    CHECK(lu.rank() <= 12);
  }
}
