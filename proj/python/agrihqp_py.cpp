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
// Python bindings. Thin: numpy in, numpy out, results as dicts.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "agrihqp/hierarchy.hpp"
#include "agrihqp/model.hpp"
#include "agrihqp/qp.hpp"
#include "agrihqp/scenario.hpp"
#include "agrihqp/sim.hpp"
#include "agrihqp/supervisor.hpp"
#include "agrihqp/traj.hpp"

namespace py = pybind11;
using namespace agrihqp;

namespace {

JointState state_of(const RobotModel& m, const VectorX& q) {
  JointState s;
  s.q = q;
  s.qdot = VectorX::Zero(m.decision_size());
  return s;
}

py::tuple pose_tuple(const Pose& p) {
  return py::make_tuple(Vec3(p.p), Eigen::Vector4d(p.o.w(), p.o.x(), p.o.y(), p.o.z()));
}

// Infinite numpy bounds map onto the library sentinel.
VectorX clamp_all(VectorX v) {
  for (auto& b : v) b = clamp_bound(b);
  return v;
}

py::dict solve_qp(const MatrixX& H, const VectorX& g, const MatrixX& A, const VectorX& lo,
                  const VectorX& hi, double tolerance, int max_iter) {
  QpProblem p(H, g);
  p.A = A.size() == 0 ? MatrixX(0, H.cols()) : A;
  p.lo = clamp_all(lo);
  p.hi = clamp_all(hi);
  const auto s = solve(p, tolerance, max_iter);
  py::dict d;
  d["z"] = s.z;
  d["status"] = to_string(s.status);
  d["active_set"] = s.active_set;
  d["lambda"] = s.lambda;
  d["iterations"] = s.iterations;
  d["kkt"] = s.kkt.max();
  return d;
}

using LevelSpec = std::vector<std::tuple<MatrixX, VectorX, VectorX, double>>;

py::dict solve_hierarchy(const std::vector<LevelSpec>& levels, double regularization,
                         std::optional<std::pair<VectorX, VectorX>> box) {
  if (levels.empty()) throw std::invalid_argument("solve_hierarchy: no levels");
  Hierarchy h;
  h.regularization = regularization;
  for (const auto& level : levels) {
    std::vector<TaskConstraint> tasks;
    for (const auto& [J, lo, hi, w] : level) {
      TaskConstraint t;
      t.J = J;
      t.lo = clamp_all(lo);
      t.hi = clamp_all(hi);
      t.slack_weight = VectorX::Constant(J.rows(), w);
      t.label = "task";
      tasks.push_back(std::move(t));
      h.n_u = static_cast<int>(J.cols());
    }
    h.levels.push_back(std::move(tasks));
  }
  if (box) h.boxes.push_back({clamp_all(box->first), clamp_all(box->second)});
  const auto s = solve_cascade(h);
  py::dict d;
  d["qdot"] = s.qdot;
  d["slacks"] = s.slacks;
  d["slack_norms"] = s.slack_norms;
  d["failed_level"] = s.failed_level;
  d["skipped_levels"] = s.skipped_levels;
  d["solve_time"] = s.solve_time;
  return d;
}

py::dict result_dict(const SimResult& r) {
  const auto n = static_cast<Eigen::Index>(r.records.size());
  VectorX t(n);
  MatrixX q, qdot, h;
  MatrixX ee(n, 14);  // left p, o(wxyz), right p, o
  if (n > 0) {
    q.resize(n, r.records[0].q.size());
    qdot.resize(n, r.records[0].qdot.size());
    h.resize(n, r.records[0].h.size());
  }
  std::vector<std::string> phases;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = r.records[static_cast<std::size_t>(i)];
    t[i] = rec.t;
    q.row(i) = rec.q.transpose();
    qdot.row(i) = rec.qdot.transpose();
    h.row(i) = rec.h.transpose();
    for (int a = 0; a < 2; ++a) {
      const auto& p = rec.ee_pose[static_cast<std::size_t>(a)];
      ee.block<1, 3>(i, 7 * a) = p.p.transpose();
      ee.block<1, 4>(i, 7 * a + 3) << p.o.w(), p.o.x(), p.o.y(), p.o.z();
    }
    phases.emplace_back(to_string(rec.phase));
  }
  py::list events;
  for (const auto& e : r.events)
    events.append(py::make_tuple(e.t, std::string(to_string(e.phase)),
                                 std::string(to_string(e.mode)), e.event));
  py::dict d;
  d["scenario"] = r.scenario;
  d["seed"] = r.seed;
  d["Ts"] = r.Ts;
  d["t"] = t;
  d["q"] = q;
  d["qdot"] = qdot;
  d["h"] = h;
  d["ee"] = ee;
  d["phase"] = phases;
  d["state_names"] = r.state_names;
  d["decision_names"] = r.decision_names;
  d["barrier_labels"] = r.barrier_labels;
  d["events"] = events;
  d["warnings"] = r.warnings;
  d["safety_rows"] = r.safety_rows;
  d["aborted"] = r.aborted;
  d["abort_tick"] = r.abort_tick;
  d["abort_reason"] = r.abort_reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical QP control of a dual-arm mobile manipulator";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

  py::class_<RobotModel, std::shared_ptr<RobotModel>>(m, "RobotModel")
      .def_property_readonly("name", &RobotModel::name)
      .def_property_readonly("state_size", &RobotModel::state_size)
      .def_property_readonly("decision_size", &RobotModel::decision_size)
      .def_property_readonly("state_names", &RobotModel::state_names)
      .def_property_readonly("decision_names", &RobotModel::decision_names)
      .def("decision_group", &RobotModel::decision_group, py::arg("group"))
      .def(
          "forward_kinematics",
          [](const RobotModel& self, const VectorX& q, const std::string& frame) {
            return pose_tuple(forward_kinematics(self, state_of(self, q), frame));
          },
          py::arg("q"), py::arg("frame"), "Returns (position, quaternion w,x,y,z).")
      .def(
          "jacobian",
          [](const RobotModel& self, const VectorX& q, const std::string& frame) {
            return MatrixX(geometric_jacobian(self, state_of(self, q), frame));
          },
          py::arg("q"), py::arg("frame"))
      .def(
          "point_jacobian",
          [](const RobotModel& self, const VectorX& q, const std::string& frame, const Vec3& offset) {
            return MatrixX(point_jacobian(self, state_of(self, q), frame, offset));
          },
          py::arg("q"), py::arg("frame"), py::arg("offset"))
      .def(
          "dual_arm_jacobian",
          [](const RobotModel& self, const VectorX& q) {
            return stacked_dual_arm_jacobian(self, state_of(self, q));
          },
          py::arg("q"));

  m.def(
      "load_model", [](const std::string& path) { return std::make_shared<RobotModel>(load_model(path)); },
      py::arg("path"));
  m.def(
      "parse_model", [](const std::string& text) { return std::make_shared<RobotModel>(parse_model(text)); },
      py::arg("text"));

  m.def("solve_qp", &solve_qp, py::arg("H"), py::arg("g"), py::arg("A"), py::arg("lo"), py::arg("hi"),
        py::arg("tolerance") = kDefaultQpTolerance, py::arg("max_iter") = kDefaultQpMaxIter,
        "minimize 1/2 z'Hz + g'z subject to lo <= A z <= hi.");
  m.def("solve_hierarchy", &solve_hierarchy, py::arg("levels"),
        py::arg("regularization") = kDefaultRegularization, py::arg("box") = py::none(),
        "levels: list of lists of (J, lo, hi, slack_weight), highest priority first.");
  m.def(
      "nullspace_reference",
      [](const std::vector<std::pair<MatrixX, VectorX>>& levels) { return nullspace_reference(levels); },
      py::arg("levels"));

  m.def(
      "plan_profile",
      [](double d, double v_max, double a_max) {
        const auto p = plan_profile(d, v_max, a_max);
        py::dict out;
        out["t_acc"] = p.t_acc;
        out["t_cruise"] = p.t_cruise;
        out["t_total"] = p.t_total;
        out["v_max"] = p.v_max;
        return out;
      },
      py::arg("distance"), py::arg("v_max"), py::arg("a_max"));

  m.def(
      "validate_scenario",
      [](const std::string& path) { return validate_scenario(load_scenario(path)); },
      py::arg("path"), "Problems found in a scenario file; empty when it is usable.");
  m.def(
      "run_scenario",
      [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<double> duration) {
        auto cfg = load_scenario(path);
        if (seed) cfg.sim.seed = *seed;
        if (duration) cfg.sim.duration = *duration;
        SimResult r;
        {
          py::gil_scoped_release nogil;
          r = run_scenario(cfg);
        }
        return result_dict(r);
      },
      py::arg("path"), py::arg("seed") = py::none(), py::arg("duration") = py::none());
  m.def(
      "scenario_csv",
      [](const std::string& path, std::optional<double> duration) {
        auto cfg = load_scenario(path);
        if (duration) cfg.sim.duration = *duration;
        const auto r = run_scenario(cfg);
        std::ostringstream out;
        write_log_csv(r, out);
        return out.str();
      },
      py::arg("path"), py::arg("duration") = py::none());
}
