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
#include <algorithm>
#include <cmath>
#include <sstream>

#include "agrihqp/scenario.hpp"
#include "agrihqp/sim.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agrihqp;

namespace {

ScenarioConfig scenario(const std::string& name) {
  return load_scenario(testutil::source_dir() / "scenarios" / (name + ".json"));
}

std::string log_text(const SimResult& r) {
  std::ostringstream os;
  write_log_csv(r, os);
  return os.str();
}

}  // namespace

TEST_CASE("euler integration") {
  const auto& m = testutil::canopies();
  const VectorX q0 = VectorX::Zero(m.state_size());
  CHECK(integrate(m, q0, VectorX::Zero(m.decision_size()), 0.01) == q0);

  VectorX qd = VectorX::Zero(m.decision_size());
  qd(*m.find_decision("r_elbow")) = 1.0;
  const VectorX q1 = integrate(m, q0, qd, 0.01);
  CHECK(q1(m.joints()[*m.find_joint("r_elbow")].state_index) == doctest::Approx(0.01));

  qd.setZero();
  qd(0) = 1.0;  // forward speed at heading 0
  const VectorX q2 = integrate(m, q0, qd, 0.01);
  CHECK(q2(0) == doctest::Approx(0.01));
  CHECK(q2(1) == 0.0);
  CHECK(q2(2) == 0.0);

  CHECK_THROWS_AS(integrate(m, q0, VectorX::Zero(3), 0.01), std::invalid_argument);
}

TEST_CASE("scripted wrench sampling") {
  WrenchProfile prof;
  WrenchSegment seg;
  seg.t_start = 1.0;
  seg.t_end = 2.0;
  seg.wrench << 8, 0, 0, 0, 0, 0;
  prof.segments.push_back(seg);
  std::mt19937_64 rng(1);
  const Quat turned(Eigen::AngleAxisd(1.0, Vec3::UnitZ()));

  SUBCASE("outside all segments without noise") {
    const auto before = rng;
    CHECK(sample_wrench(prof, 0.5, Quat::Identity(), 0.0, 0.0, rng).stacked().norm() == 0.0);
    CHECK(rng == before);
  }
  SUBCASE("world frame ignores the tool orientation") {
    const auto w = sample_wrench(prof, 1.5, turned, 0.0, 0.0, rng);
    CHECK((w.force - Vec3(8, 0, 0)).norm() == 0.0);
  }
  SUBCASE("tool frame rotates with the tool") {
    prof.segments[0].tool_frame = true;
    const auto w = sample_wrench(prof, 1.5, turned, 0.0, 0.0, rng);
    CHECK((w.force - turned * Vec3(8, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("bounded noise") {
    for (int k = 0; k < 1000; ++k) {
      const auto w = sample_wrench(prof, 1.5, Quat::Identity(), 0.5, 0.05, rng);
      CHECK((w.force - Vec3(8, 0, 0)).cwiseAbs().maxCoeff() <= 0.5);
      CHECK(w.moment.cwiseAbs().maxCoeff() <= 0.05);
    }
  }
  SUBCASE("overlapping segments are rejected") {
    seg.t_start = 1.5;
    seg.t_end = 3.0;
    prof.segments.push_back(seg);
    CHECK_THROWS_AS(prof.check(), ConfigError);
  }
}

TEST_CASE("quiescent robot stays still") {
  const auto r = run_scenario(scenario("canopies_default"));
  REQUIRE_FALSE(r.aborted);
  CHECK(r.records.size() == 1001);
  for (const auto& rec : r.records) CHECK(rec.qdot.norm() < 1e-6);
}

TEST_CASE("runs are deterministic for a seed") {
  auto cfg = scenario("harvest_semi_auto");
  cfg.sim.duration = 3.0;
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].q == b.records[i].q);
    CHECK(a.records[i].wrench_raw[1].stacked() == b.records[i].wrench_raw[1].stacked());
  }
  // Identical CSV apart from the timing column.
  auto strip = [](SimResult r) {
    for (auto& rec : r.records) rec.solve_time = 0.0;
    return log_text(r);
  };
  CHECK(strip(a) == strip(b));

  cfg.sim.seed += 1;
  const auto c = run_scenario(cfg);
  CHECK(c.records.back().wrench_raw[1].stacked() != a.records.back().wrench_raw[1].stacked());
}

TEST_CASE("log layout") {
  auto cfg = scenario("admittance_statics");
  cfg.sim.duration = 0.05;
  const auto r = run_scenario(cfg);
  const std::string text = log_text(r);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# agrihqp scenario=admittance_statics seed=", 0) == 0);
  std::getline(in, line);
  const auto cols = r.columns();
  CHECK(line.rfind("t,q_", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == cols.size());
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == cols.size());
  }
  CHECK(rows == static_cast<int>(r.records.size()));
  CHECK(std::find(cols.begin(), cols.end(), "h_sc_tool_left__tool_right") != cols.end());

  std::ostringstream ev;
  write_events_csv(r, ev);
  CHECK(ev.str().rfind("t,phase,mode,event\n", 0) == 0);
}

TEST_CASE("empty hard velocity box aborts at the first tick") {
  const auto r = run_scenario(scenario("bad_hard_boxes"));
  CHECK(r.aborted);
  CHECK(r.abort_tick == 0);
  CHECK(r.abort_reason.find("l_elbow") != std::string::npos);
}

TEST_CASE("commanded velocity varies boundedly between ticks") {
  // Sinusoid driver bound: qdot = qdot_d + K (q_d - q), so per selected joint
  // one tick changes qdot by at most Ts (w A_rate + K (w A + v_cap)). Over the
  // selected joints that gives C = sqrt(n_sel) (w A_rate + K (w A + v_cap)).
  auto cfg = scenario("sinusoid_safety");
  cfg.sim.duration = 30.0;
  const auto& p = cfg.posture;
  const double w = 2.0 * M_PI / p.period;
  const double k_max = p.gains.maxCoeff();
  const double n_sel = 14.0;  // both arms
  const double C = std::sqrt(n_sel) * (w * p.rate_amplitude + k_max * (w * p.amplitude + 0.5));
  CHECK(C == doctest::Approx(47.6).epsilon(0.01));
  const auto r = run_scenario(cfg);
  REQUIRE_FALSE(r.aborted);
  for (std::size_t i = 1; i < r.records.size(); ++i)
    CHECK((r.records[i].qdot - r.records[i - 1].qdot).norm() <= C * r.Ts);
}

TEST_CASE("scenario includes merge with local keys") {
  const auto dir = testutil::source_dir() / "scenarios";
  const std::string doc = R"({"name": "inc", "model": "../data/canopies.model.json",
    "sim": {"Ts": 0.01, "duration": 1.0},
    "initial_q": {"torso_lift": 0.1, "l_shoulder_pitch": 0.75, "l_elbow": -1.35, "l_wrist_pitch": 1.05,
                  "r_shoulder_pitch": 0.75, "r_elbow": -1.35, "r_wrist_pitch": 1.05},
    "safety": {"include": "canopies_safety.json", "joint_position_gain": 4.0}})";
  const auto cfg = parse_scenario(doc, dir);
  CHECK(cfg.safety.joint_position.upper == 4.0);
  CHECK(cfg.safety.walls.size() == 2);
  CHECK(validate_scenario(cfg).empty());
  CHECK_THROWS_AS(parse_scenario(R"({"name": "x", "model": "../data/canopies.model.json",
    "safety": {"include": "missing.json"}})", dir), ConfigError);
}
