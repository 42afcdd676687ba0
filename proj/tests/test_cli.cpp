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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "agrihqp/cli.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace fs = std::filesystem;
namespace cli = agrihqp::cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "agrihqp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory removed on scope exit.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("agrihqp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

std::string scenario(const std::string& name) {
  return (testutil::source_dir() / "scenarios" / (name + ".json")).string();
}

std::string model_path() { return (testutil::source_dir() / "data" / "canopies.model.json").string(); }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate the default configuration") {
  Scratch s;
  const auto before = fs::current_path();
  fs::current_path(s.dir);
  const auto r = invoke({"validate", scenario("canopies_default")});
  fs::current_path(before);
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("safety rows: 86") != std::string::npos);
  CHECK(fs::is_empty(s.dir));  // validate never writes
}

TEST_CASE("validate rejects an initial state outside a limit and names the joint") {
  Scratch s;
  const auto p = s.write("bad_q.json", R"({"name": "bad_q", "model": ")" + model_path() + R"(",
    "initial_q": {"torso_lift": 0.5}})");
  const auto r = invoke({"validate", p.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("torso_lift") != std::string::npos);
}

TEST_CASE("validate rejects a wall with collinear points") {
  Scratch s;
  const auto p = s.write("collinear.json", R"({"name": "collinear", "model": ")" + model_path() + R"(",
    "initial_q": {"torso_lift": 0.1, "l_shoulder_pitch": 0.75, "l_elbow": -1.35, "l_wrist_pitch": 1.05,
                  "r_shoulder_pitch": 0.75, "r_elbow": -1.35, "r_wrist_pitch": 1.05},
    "safety": {"walls": [{"name": "w", "plane": [[0, 0, 0], [1, 0, 0], [2, 0, 0]],
                          "threshold": 0.3, "gain": 5, "points": ["tool_left"]}]}})");
  const auto r = invoke({"validate", p.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("collinear") != std::string::npos);
}

TEST_CASE("malformed scenario reports where parsing failed") {
  Scratch s;
  const auto p = s.write("broken.json", "{\"name\": \"broken\",\n \"sim\": {\"Ts\": }\n}");
  const auto r = invoke({"run", p.string(), "--out", s.dir.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(s.dir / "broken.csv"));
  CHECK(invoke({"validate", (s.dir / "absent.json").string()}).code == cli::kExitConfig);
}

TEST_CASE("contradictory hard boxes abort with exit code 2") {
  Scratch s;
  const auto r = invoke({"run", scenario("bad_hard_boxes"), "--out", s.dir.string()});
  CHECK(r.code == cli::kExitAbort);
  CHECK(r.err.find("tick 0") != std::string::npos);
  CHECK(r.err.find("l_elbow") != std::string::npos);
}

TEST_CASE("run writes the log and events, export extracts figures") {
  Scratch s;
  auto r = invoke({"run", scenario("admittance_statics"), "--out", s.dir.string(), "--seed", "7"});
  REQUIRE(r.code == cli::kExitOk);
  const auto log = s.dir / "admittance_statics.csv";
  REQUIRE(fs::exists(log));
  REQUIRE(fs::exists(s.dir / "admittance_statics.events.csv"));
  CHECK(read(log).rfind("# agrihqp scenario=admittance_statics seed=7", 0) == 0);

  r = invoke({"export", log.string(), "fig7_distances", "--out", s.dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream fig7(read(s.dir / "admittance_statics.fig7_distances.csv"));
  std::string line;
  std::getline(fig7, line);
  CHECK(line[0] == '#');
  std::getline(fig7, line);
  CHECK(line.rfind("t,h_", 0) == 0);
  CHECK(line.find("q_") == std::string::npos);

  r = invoke({"export", log.string(), "fig16_tracking", "--out", s.dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  const std::string fig16 = read(s.dir / "admittance_statics.fig16_tracking.csv");
  CHECK(fig16.find("ee_des_right_px") != std::string::npos);
  CHECK(fig16.find("ee_right_pz") != std::string::npos);

  for (const auto& id : cli::figure_ids())
    CHECK(invoke({"export", log.string(), id, "--out", s.dir.string()}).code == cli::kExitOk);

  r = invoke({"export", log.string(), "fig99", "--out", s.dir.string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("fig18_wrench_phase") != std::string::npos);
}

TEST_CASE("argument errors") {
  CHECK(invoke({}).code == cli::kExitConfig);
  CHECK(invoke({"fly"}).code == cli::kExitConfig);
  CHECK(invoke({"run"}).code == cli::kExitConfig);
  CHECK(invoke({"run", scenario("canopies_default"), "--seed", "many"}).code == cli::kExitConfig);
}
