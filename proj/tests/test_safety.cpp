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
#include <map>

#include "agrihqp/safety.hpp"
#include "agrihqp/scenario.hpp"
#include "agrihqp/sim.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agrihqp;

namespace {

// Prismatic joint along z carrying point "a"; point "b" fixed in the world.
const char* kSlider = R"({"name": "slider", "joints": [{"name": "z", "kind": "prismatic", "axis": [0, 0, 1],
  "origin_xyz": [0, 0, 0], "origin_quat_wxyz": [1, 0, 0, 0], "parent": null}],
  "frames": [{"name": "tip", "joint": "z", "origin_xyz": [0, 0, 0]}],
  "points": [{"name": "a", "frame": "tip", "offset": [0, 0, 0]},
             {"name": "b", "frame": "world", "offset": [0, 0, 0.5]}],
  "limits": {"pos_lower": [-2], "pos_upper": [2], "vel_lower": [-1], "vel_upper": [1]}})";

JointState at(double z) { return {VectorX::Constant(1, z), VectorX::Zero(1), 0.0}; }

}  // namespace

TEST_CASE("joint position limit rows") {
  const auto m = parse_model(testutil::single_joint_json("revolute", "[0, 0, 1]", "[0,0,0]", "-1.44", "1.44"));
  const CbfGains g{10.0, 10.0};
  auto t = joint_position_limits(at(1.0), m, g);
  CHECK(t.hi(0) == doctest::Approx(4.4));
  CHECK(t.lo(0) == doctest::Approx(-24.4));
  t = joint_position_limits(at(1.44), m, g);
  CHECK(t.hi(0) == 0.0);
  t = joint_position_limits(at(0.0), m, g);
  CHECK(t.lo(0) == -t.hi(0));
  SUBCASE("outside the box the row still drives inward") {
    t = joint_position_limits(at(1.5), m, g);
    CHECK(t.hi(0) < 0.0);
    CHECK(t.lo(0) <= t.hi(0));
  }
}

TEST_CASE("base heading limit acts on the turn rate column") {
  const auto& m = testutil::canopies();
  auto st = testutil::rest(m);
  st.q(2) = 3.0;
  std::vector<Barrier> b;
  const auto t = joint_position_limits(st, m, CbfGains{}, &b);
  CHECK(t.J(1, 1) == 1.0);
  CHECK(t.hi(1) == doctest::Approx(10.0 * 0.14));
  CHECK(t.J.row(0).norm() == 0.0);  // forward speed has no position limit
  CHECK(is_unbounded_below(t.lo(0)));
}

TEST_CASE("joint velocity limit rows") {
  const auto& m = testutil::canopies();
  auto t = joint_velocity_limits(m);
  for (int d : m.decision_group("arms")) CHECK(t.hi(d) == doctest::Approx(1.95));
  VelocityOverride o{VectorX::Constant(m.decision_size(), -0.5), VectorX::Constant(m.decision_size(), 0.5)};
  for (int d : m.decision_group("base")) o.lo(d) = o.hi(d) = 0.0;
  t = joint_velocity_limits(m, o);
  for (int d : m.decision_group("arms")) CHECK(t.hi(d) == 0.5);
  for (int d : m.decision_group("base")) {
    CHECK(t.lo(d) == 0.0);
    CHECK(t.hi(d) == 0.0);
  }
  CHECK(t.J.isIdentity());
}

TEST_CASE("virtual wall rows") {
  const auto m = parse_model(kSlider);
  VirtualWall w;
  w.p1 = Vec3(0, 0, 0);
  w.p2 = Vec3(1, 0, 0);
  w.p3 = Vec3(0, 1, 0);
  w.threshold = 0.3;
  w.gain = 5.0;
  w.points = {m.point_index("a")};
  std::vector<Barrier> b;
  auto t = virtual_wall(m, at(0.5), w, &b);
  REQUIRE(t.rows() == 1);
  CHECK(b[0].h == doctest::Approx(0.2));
  CHECK(t.lo(0) == doctest::Approx(-1.0));
  CHECK(t.J(0, 0) == doctest::Approx(1.0));
  CHECK(is_unbounded_above(t.hi(0)));
  t = virtual_wall(m, at(0.3), w);
  CHECK(t.lo(0) == doctest::Approx(0.0).epsilon(1e-12));
  t = virtual_wall(m, at(10.3), w);
  CHECK(t.lo(0) == doctest::Approx(-50.0));
  SUBCASE("collinear points are rejected") {
    w.p3 = Vec3(2, 0, 0);
    CHECK_THROWS_AS(w.check(), ConfigError);
  }
}

TEST_CASE("self-collision rows") {
  const auto m = parse_model(kSlider);
  const int a = m.point_index("a");
  SUBCASE("point pair") {
    CollisionPair p{"ab", a, m.point_index("b"), 0.2, 10.0};
    std::vector<Barrier> b;
    const auto t = self_collision(m, at(1.0), {p}, &b);
    CHECK(b[0].h == doctest::Approx(0.3));
    CHECK(t.lo(0) == doctest::Approx(-3.0));
    CHECK(t.J(0, 0) == doctest::Approx(1.0));
    p.threshold = 0.5;
    CHECK(self_collision(m, at(1.0), {p}).lo(0) == doctest::Approx(0.0));
  }
  SUBCASE("coincident points give a vacuous row and a flag") {
    CollisionPair p{"ab", a, m.point_index("b"), 0.2, 10.0};
    std::vector<std::string> degenerate;
    const auto t = self_collision(m, at(0.5), {p}, nullptr, &degenerate);
    CHECK(degenerate == std::vector<std::string>{"sc_ab"});
    CHECK(t.J.row(0).norm() == 0.0);
    CHECK(is_unbounded_below(t.lo(0)));
  }
  SUBCASE("capsule obstacle") {
    Capsule c{0, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.1};
    CollisionPair p{"cap", a, c, 0.05, 10.0};
    std::vector<Barrier> b;
    self_collision(m, at(2.0), {p}, &b);
    CHECK(b[0].h == doctest::Approx(1.0 - 0.1 - 0.05));
  }
}

TEST_CASE("segment projection") {
  const auto mid = segment_point_distance(Vec3(0, 0.4, 0.5), Vec3::Zero(), Vec3::UnitZ(), 0.1);
  CHECK((mid.closest - Vec3(0, 0, 0.5)).norm() < 1e-15);
  CHECK(mid.distance == doctest::Approx(0.3));
  const auto beyond = segment_point_distance(Vec3(0, 0, 3), Vec3::Zero(), Vec3::UnitZ(), 0.0);
  CHECK((beyond.closest - Vec3(0, 0, 1)).norm() == 0.0);
  CHECK(beyond.distance == doctest::Approx(2.0));
  CHECK(segment_point_distance(Vec3(0, 0.05, 0.5), Vec3::Zero(), Vec3::UnitZ(), 0.1).distance == 0.0);
  CHECK_THROWS(segment_point_distance(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitX(), 0.0));
}

TEST_CASE("default stack has 86 rows and positive barriers") {
  const auto cfg = load_scenario(testutil::source_dir() / "scenarios" / "canopies_default.json");
  const JointState st = testutil::rest(cfg.robot(), cfg.initial_q);
  const Kinematics kin(cfg.robot(), st.q);
  const auto s = build_safety(kin, st, cfg.safety);
  CHECK(s.rows() == 86);
  CHECK(s.degenerate.empty());
  for (const auto& b : s.barriers) CHECK_MESSAGE(b.h > 0.0, b.label);
}

TEST_CASE("moving along a row increases its barrier") {
  const auto cfg = load_scenario(testutil::source_dir() / "scenarios" / "canopies_default.json");
  const auto& m = cfg.robot();
  const JointState st = testutil::rest(m, cfg.initial_q);
  const Kinematics kin(m, st.q);
  std::vector<Barrier> h0;
  std::vector<TaskConstraint> rows;
  for (const auto& w : cfg.safety.walls) rows.push_back(virtual_wall(kin, w, &h0));
  rows.push_back(self_collision(kin, cfg.safety.pairs, &h0));
  const auto all = TaskConstraint::stack(rows, "geometric");
  REQUIRE(static_cast<std::size_t>(all.rows()) == h0.size());
  const double eps = 1e-6;
  for (int r = 0; r < all.rows(); ++r) {
    const VectorX dir = all.J.row(r).transpose();
    if (dir.norm() == 0.0) continue;
    const Kinematics moved(m, integrate(m, st.q, dir, eps));
    std::vector<Barrier> h1;
    for (const auto& w : cfg.safety.walls) virtual_wall(moved, w, &h1);
    self_collision(moved, cfg.safety.pairs, &h1);
    const double rate = (h1[static_cast<std::size_t>(r)].h - h0[static_cast<std::size_t>(r)].h) / eps;
    CHECK_MESSAGE(rate == doctest::Approx(dir.squaredNorm()).epsilon(1e-3), h0[static_cast<std::size_t>(r)].label);
  }
}
