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
#include "agrihqp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json_util.hpp"

namespace agrihqp {

void WrenchProfile::check() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.t_end > s.t_start))
      throw ConfigError("wrench segment " + std::to_string(i) + ": t_end must exceed t_start");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = segments[j];
      if (s.t_start < o.t_end && o.t_start < s.t_end)
        throw ConfigError("wrench segments " + std::to_string(j) + " and " + std::to_string(i) +
                          " overlap");
    }
  }
}

namespace {

using json_util::fail;
using json_util::Json;
using json_util::require;
using json_util::to_double;
using json_util::to_string;

std::vector<int> resolve_group(const RobotModel& m, const std::string& key, const std::string& where) {
  if (auto d = m.find_decision(key)) return {*d};
  try {
    return m.decision_group(key);
  } catch (const ModelError&) {
    fail(where, "unknown joint or group '" + key + "'");
  }
}

// {"group or decision name": [lo, hi] | v (meaning [-v, v])}
void apply_box(const RobotModel& m, const Json& obj, VectorX& lo, VectorX& hi,
               const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object of joint groups");
  for (const auto& [key, val] : obj.items()) {
    const auto w = where + "." + key;
    double l, h;
    if (val.is_array()) {
      if (val.size() != 2) fail(w, "expected [lo, hi]");
      l = json_util::to_bound(val[0], -kInfinity, w + "[0]");
      h = json_util::to_bound(val[1], kInfinity, w + "[1]");
    } else {
      h = json_util::to_bound(val, kInfinity, w);
      l = -h;
    }
    if (!(l <= h)) fail(w, "lo > hi");
    for (int d : resolve_group(m, key, w)) {
      lo[d] = l;
      hi[d] = h;
    }
  }
}

VectorX per_decision(const RobotModel& m, const Json& v, const VectorX& fallback,
                     const std::string& where) {
  if (v.is_array()) {
    VectorX out = json_util::to_vector(v, where);
    if (out.size() != m.decision_size())
      fail(where, "expected " + std::to_string(m.decision_size()) + " entries");
    return out;
  }
  if (!v.is_object()) fail(where, "expected an array or an object of joint groups");
  VectorX out = fallback;
  for (const auto& [key, val] : v.items())
    for (int d : resolve_group(m, key, where + "." + key)) out[d] = to_double(val, where + "." + key);
  return out;
}

AdmittanceParams parse_admittance(const Json& j, const AdmittanceParams& def,
                                  const std::string& where) {
  auto get = [&](const char* key, double fallback) { return json_util::get_or(j, key, fallback, where); };
  const auto p = AdmittanceParams::from_scalars(get("k_m_p", def.km[0]), get("k_m_o", def.km[3]),
                                                get("k_d_p", def.kd[0]), get("k_d_o", def.kd[3]),
                                                get("k_p_p", def.kp[0]), get("k_p_o", def.kp[3]));
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return p;
}

int point_id(const RobotModel& m, const Json& v, const std::string& where) {
  const auto name = to_string(v, where);
  if (auto p = m.find_point(name)) return *p;
  fail(where, "unknown point '" + name + "'");
}

int frame_id(const RobotModel& m, const Json& v, const std::string& where) {
  const auto name = to_string(v, where);
  if (auto f = m.find_frame(name)) return *f;
  fail(where, "unknown frame '" + name + "'");
}

int arm_index(const Json& v, const std::string& where) {
  const auto s = to_string(v, where);
  if (s == "left") return 0;
  if (s == "right") return 1;
  fail(where, "expected \"left\" or \"right\"");
}

void parse_safety(const RobotModel& m, const Json& j, SafetyConfig& cfg, const std::string& where) {
  if (auto it = j.find("joint_position_gain"); it != j.end()) {
    if (it->is_object()) {
      cfg.joint_position.lower = json_util::get_or(*it, "lower", 10.0, where + ".joint_position_gain");
      cfg.joint_position.upper = json_util::get_or(*it, "upper", 10.0, where + ".joint_position_gain");
    } else {
      cfg.joint_position.lower = cfg.joint_position.upper =
          to_double(*it, where + ".joint_position_gain");
    }
    if (!(cfg.joint_position.lower > 0.0 && cfg.joint_position.upper > 0.0))
      fail(where + ".joint_position_gain", "gains must be positive");
  }
  if (auto it = j.find("velocity_limits"); it != j.end()) {
    VelocityOverride ov{m.limits().vel_lower, m.limits().vel_upper};
    apply_box(m, *it, ov.lo, ov.hi, where + ".velocity_limits");
    cfg.velocity = ov;
  }
  if (auto it = j.find("walls"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto w = where + ".walls[" + std::to_string(i) + "]";
      const auto& wj = (*it)[i];
      VirtualWall wall;
      wall.name = wj.value("name", "wall" + std::to_string(i));
      wall.frame = wj.contains("frame") ? frame_id(m, wj["frame"], w + ".frame") : 0;
      const auto& pts = require(wj, "plane", w);
      if (!pts.is_array() || pts.size() != 3) fail(w + ".plane", "expected three points");
      wall.p1 = json_util::to_vec3(pts[0], w + ".plane[0]");
      wall.p2 = json_util::to_vec3(pts[1], w + ".plane[1]");
      wall.p3 = json_util::to_vec3(pts[2], w + ".plane[2]");
      wall.threshold = json_util::get_or(wj, "threshold", 0.3, w);
      wall.gain = json_util::get_or(wj, "gain", 5.0, w);
      const auto& mon = require(wj, "points", w);
      for (std::size_t k = 0; k < mon.size(); ++k)
        wall.points.push_back(point_id(m, mon[k], w + ".points[" + std::to_string(k) + "]"));
      try {
        wall.check();
      } catch (const ConfigError& e) {
        fail(w, e.what());
      }
      cfg.walls.push_back(std::move(wall));
    }
  }
  std::map<std::string, Capsule> capsules;
  if (auto it = j.find("capsules"); it != j.end()) {
    for (const auto& [name, cj] : it->items()) {
      const auto w = where + ".capsules." + name;
      Capsule c;
      c.frame = cj.contains("frame") ? frame_id(m, cj["frame"], w + ".frame") : 0;
      c.a = json_util::to_vec3(require(cj, "a", w), w + ".a");
      c.b = json_util::to_vec3(require(cj, "b", w), w + ".b");
      c.radius = json_util::get_or(cj, "radius", 0.0, w);
      if (c.radius < 0.0) fail(w, "negative radius");
      if ((c.b - c.a).norm() <= 0.0) fail(w, "zero-length segment");
      capsules[name] = c;
    }
  }
  // Each entry expands to the product points x obstacles.
  if (auto it = j.find("collision_sets"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto w = where + ".collision_sets[" + std::to_string(i) + "]";
      const auto& sj = (*it)[i];
      const double threshold = to_double(require(sj, "threshold", w), w + ".threshold");
      const double gain = json_util::get_or(sj, "gain", 10.0, w);
      const auto& pts = require(sj, "points", w);
      const auto& obs = require(sj, "obstacles", w);
      for (std::size_t a = 0; a < pts.size(); ++a) {
        const int pj = point_id(m, pts[a], w + ".points[" + std::to_string(a) + "]");
        for (std::size_t b = 0; b < obs.size(); ++b) {
          const auto ow = w + ".obstacles[" + std::to_string(b) + "]";
          const auto oname = to_string(obs[b], ow);
          CollisionPair pair;
          pair.threshold = threshold;
          pair.gain = gain;
          pair.point = pj;
          if (oname.rfind("capsule:", 0) == 0) {
            const auto cname = oname.substr(8);
            auto c = capsules.find(cname);
            if (c == capsules.end()) fail(ow, "unknown capsule '" + cname + "'");
            pair.obstacle = c->second;
          } else {
            pair.obstacle = point_id(m, obs[b], ow);
          }
          pair.name = m.points()[static_cast<std::size_t>(pj)].name + "__" +
                      (oname.rfind("capsule:", 0) == 0 ? oname.substr(8) : oname);
          try {
            pair.check();
          } catch (const ConfigError& e) {
            fail(ow, e.what());
          }
          cfg.pairs.push_back(std::move(pair));
        }
      }
    }
  }
}

WrenchProfile parse_profile(const Json& j, const std::string& where) {
  WrenchProfile p;
  if (!j.is_array()) fail(where, "expected an array of segments");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto w = where + "[" + std::to_string(i) + "]";
    const auto& sj = j[i];
    WrenchSegment s;
    s.t_start = to_double(require(sj, "t_start", w), w + ".t_start");
    s.t_end = to_double(require(sj, "t_end", w), w + ".t_end");
    if (sj.contains("force")) s.wrench.head<3>() = json_util::to_vec3(sj["force"], w + ".force");
    if (sj.contains("moment")) s.wrench.tail<3>() = json_util::to_vec3(sj["moment"], w + ".moment");
    const auto frame = sj.value("frame", std::string("world"));
    if (frame != "world" && frame != "tool") fail(w + ".frame", "expected \"world\" or \"tool\"");
    s.tool_frame = frame == "tool";
    p.segments.push_back(s);
  }
  try {
    p.check();
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return p;
}

std::vector<PerceptionEntry> parse_perception(const Json& j, PerceptionSource src,
                                              const std::string& where) {
  std::vector<PerceptionEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto w = where + "[" + std::to_string(i) + "]";
    const auto& ej = j[i];
    PerceptionEntry e;
    e.delay = json_util::get_or(ej, "delay", 0.0, w);
    e.outcome.source = src;
    if (auto it = ej.find("detections"); it != ej.end()) {
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto dw = w + ".detections[" + std::to_string(k) + "]";
        const auto& dj = (*it)[k];
        Detection d;
        d.bunch = json_util::to_pose(require(dj, "bunch", dw), dw + ".bunch");
        if (dj.contains("peduncle") && !dj["peduncle"].is_null())
          d.peduncle = json_util::to_pose(dj["peduncle"], dw + ".peduncle");
        d.confidence = to_double(require(dj, "confidence", dw), dw + ".confidence");
        if (d.confidence < 0.0 || d.confidence > 1.0) fail(dw + ".confidence", "must lie in [0, 1]");
        e.outcome.detections.push_back(d);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

CartesianLimits parse_limits(const Json& j, const std::string& where) {
  CartesianLimits l;
  l.v_max = json_util::get_or(j, "v_max", l.v_max, where);
  l.a_max = json_util::get_or(j, "a_max", l.a_max, where);
  l.w_max = json_util::get_or(j, "w_max", l.w_max, where);
  l.alpha_max = json_util::get_or(j, "alpha_max", l.alpha_max, where);
  if (!(l.v_max > 0 && l.a_max > 0 && l.w_max > 0 && l.alpha_max > 0))
    fail(where, "Cartesian limits must be positive");
  return l;
}

VectorX default_posture_gains(const RobotModel& m) {
  VectorX k = VectorX::Constant(m.decision_size(), 10.0);
  if (const auto& p = m.partition()) {
    for (int d = 0; d < p->base; ++d) k[d] = 0.0;
    const double torso[] = {2.0, 0.5};
    for (int d = 0; d < p->torso; ++d) k[p->base + d] = d < 2 ? torso[d] : 2.0;
  } else if (m.planar_base() >= 0) {
    const auto& b = m.joints()[static_cast<std::size_t>(m.planar_base())];
    k[b.decision_index] = k[b.decision_index + 1] = 0.0;
  }
  return k;
}

OperationalMode parse_operational(const std::string& s, const std::string& where) {
  if (s == "supervisor") return OperationalMode::kSupervisor;
  if (s == "admittance") return OperationalMode::kAdmittance;
  if (s == "hand_guiding") return OperationalMode::kHandGuiding;
  if (s == "none") return OperationalMode::kNone;
  fail(where, "unknown operational task '" + s + "'");
}

// A section may name a file with "include"; its content is loaded first and the
// remaining keys are merged on top (RFC 7386 merge patch).
void resolve_includes(Json& doc, const std::filesystem::path& base_dir) {
  for (auto& [key, section] : doc.items()) {
    if (!section.is_object() || !section.contains("include")) continue;
    const auto where = "scenario." + key + ".include";
    const std::filesystem::path rel = to_string(section["include"], where);
    const auto path = rel.is_relative() ? base_dir / rel : rel;
    std::ifstream in(path);
    if (!in) fail(where, "cannot open '" + path.string() + "'");
    Json base;
    try {
      base = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(where, e.what());
    }
    section.erase("include");
    base.merge_patch(section);
    section = std::move(base);
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  const std::string root = "scenario";
  if (!doc.is_object()) fail(root, "expected an object");
  resolve_includes(doc, base_dir);
  ScenarioConfig cfg;
  cfg.name = doc.value("name", std::string("scenario"));

  const auto model_ref = to_string(require(doc, "model", root), root + ".model");
  cfg.model_path = std::filesystem::path(model_ref);
  if (cfg.model_path.is_relative()) cfg.model_path = base_dir / cfg.model_path;
  try {
    cfg.model = std::make_shared<RobotModel>(load_model(cfg.model_path));
  } catch (const ModelError& e) {
    fail(root + ".model", e.what());
  }
  const RobotModel& m = *cfg.model;

  if (auto it = doc.find("sim"); it != doc.end()) {
    const auto w = root + ".sim";
    cfg.sim.Ts = json_util::get_or(*it, "Ts", cfg.sim.Ts, w);
    cfg.sim.duration = json_util::get_or(*it, "duration", cfg.sim.duration, w);
    if (it->contains("seed")) cfg.sim.seed = (*it)["seed"].get<std::uint64_t>();
    cfg.sim.noise_force = json_util::get_or(*it, "noise_force", 0.0, w);
    cfg.sim.noise_moment = json_util::get_or(*it, "noise_moment", 0.0, w);
    if (!(cfg.sim.Ts > 0.0)) fail(w + ".Ts", "must be positive");
    if (!(cfg.sim.duration > 0.0)) fail(w + ".duration", "must be positive");
    if (cfg.sim.noise_force < 0.0 || cfg.sim.noise_moment < 0.0) fail(w, "negative noise amplitude");
  }

  cfg.initial_q = VectorX::Zero(m.state_size());
  if (auto it = doc.find("initial_q"); it != doc.end()) {
    const auto w = root + ".initial_q";
    if (it->is_array()) {
      cfg.initial_q = json_util::to_vector(*it, w);
      if (cfg.initial_q.size() != m.state_size())
        fail(w, "expected " + std::to_string(m.state_size()) + " entries");
    } else if (it->is_object()) {
      const auto& names = m.state_names();
      for (const auto& [key, val] : it->items()) {
        auto pos = std::find(names.begin(), names.end(), key);
        if (pos == names.end()) fail(w + "." + key, "unknown state variable");
        cfg.initial_q[pos - names.begin()] = to_double(val, w + "." + key);
      }
    } else {
      fail(w, "expected an array or an object");
    }
  }

  if (auto it = doc.find("safety"); it != doc.end()) parse_safety(m, *it, cfg.safety, root + ".safety");

  if (auto it = doc.find("admittance"); it != doc.end()) {
    if (it->contains("autonomous"))
      cfg.admittance_autonomous = parse_admittance((*it)["autonomous"], cfg.admittance_autonomous,
                                                   root + ".admittance.autonomous");
    if (it->contains("guided"))
      cfg.admittance_guided =
          parse_admittance((*it)["guided"], cfg.admittance_guided, root + ".admittance.guided");
  }

  if (auto it = doc.find("wrench_profiles"); it != doc.end()) {
    for (const auto& [key, val] : it->items()) {
      const auto w = root + ".wrench_profiles." + key;
      cfg.wrench_profiles[static_cast<std::size_t>(arm_index(Json(key), w))] = parse_profile(val, w);
    }
  }
  if (auto it = doc.find("payload"); it != doc.end()) {
    for (const auto& [key, val] : it->items()) {
      const auto w = root + ".payload." + key;
      PayloadModel p;
      p.mass = json_util::get_or(val, "mass", 0.0, w);
      if (p.mass < 0.0) fail(w + ".mass", "must be non-negative");
      if (val.contains("com")) p.com = json_util::to_vec3(val["com"], w + ".com");
      if (val.contains("gravity")) p.gravity = json_util::to_vec3(val["gravity"], w + ".gravity");
      cfg.payload[static_cast<std::size_t>(arm_index(Json(key), w))] = p;
    }
  }
  if (auto it = doc.find("contact"); it != doc.end()) {
    const auto w = root + ".contact";
    cfg.contact.theta_hi = json_util::get_or(*it, "theta_hi_N", cfg.contact.theta_hi, w);
    cfg.contact.theta_lo = json_util::get_or(*it, "theta_lo_N", cfg.contact.theta_lo, w);
    cfg.contact.debounce = json_util::get_or(*it, "debounce_s", cfg.contact.debounce, w);
    cfg.contact.use_moments = it->value("use_moments", false);
    if (!(cfg.contact.theta_lo < cfg.contact.theta_hi)) fail(w, "theta_lo_N must be below theta_hi_N");
    if (!(cfg.contact.debounce >= 0.0)) fail(w, "negative debounce");
  }
  if (auto it = doc.find("perception_script"); it != doc.end()) {
    const auto w = root + ".perception_script";
    if (it->contains("head"))
      cfg.perception.head = parse_perception((*it)["head"], PerceptionSource::kHead, w + ".head");
    if (it->contains("wrist"))
      cfg.perception.wrist = parse_perception((*it)["wrist"], PerceptionSource::kWrist, w + ".wrist");
    cfg.fsm.confidence_threshold = json_util::get_or(*it, "confidence_threshold", 0.9, w);
  }
  if (auto it = doc.find("harvest"); it != doc.end()) {
    const auto w = root + ".harvest";
    HarvestConfig h;
    if (it->contains("arm")) h.arm = arm_index((*it)["arm"], w + ".arm");
    h.box = json_util::to_pose(require(*it, "box", w), w + ".box");
    h.plan.pre_grasp_offset = json_util::get_or(*it, "pre_grasp_offset", 0.15, w);
    if (!(h.plan.pre_grasp_offset > 0.0)) fail(w + ".pre_grasp_offset", "must be positive");
    if (it->contains("approach_axis"))
      h.plan.approach_axis = json_util::to_vec3((*it)["approach_axis"], w + ".approach_axis");
    if (h.plan.approach_axis.norm() < 1e-9) fail(w + ".approach_axis", "must be non-zero");
    h.plan.pre_release = json_util::to_pose(require(*it, "pre_release", w), w + ".pre_release");
    if (it->contains("release_offset"))
      h.plan.release_offset = json_util::to_pose((*it)["release_offset"], w + ".release_offset");
    if (it->contains("home")) {
      h.plan.home = json_util::to_pose((*it)["home"], w + ".home");
    } else {
      // Filled in by the simulator from the initial configuration.
      h.plan.home.p = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
    }
    if (it->contains("limits")) h.limits = parse_limits((*it)["limits"], w + ".limits");
    h.grasp_time = json_util::get_or(*it, "grasp_time", h.grasp_time, w);
    h.cut_time = json_util::get_or(*it, "cut_time", h.cut_time, w);
    h.release_time = json_util::get_or(*it, "release_time", h.release_time, w);
    h.detect_timeout = json_util::get_or(*it, "detect_timeout", h.detect_timeout, w);
    cfg.harvest = h;
  }
  if (auto it = doc.find("waypoints"); it != doc.end()) {
    for (const auto& [key, val] : it->items()) {
      const auto w = root + ".waypoints." + key;
      WaypointPlan plan;
      plan.t_start = json_util::get_or(val, "t_start", 0.0, w);
      const auto& poses = require(val, "poses", w);
      for (std::size_t i = 0; i < poses.size(); ++i)
        plan.poses.push_back(json_util::to_pose(poses[i], w + ".poses[" + std::to_string(i) + "]"));
      if (plan.poses.empty()) fail(w + ".poses", "expected at least one pose");
      cfg.waypoints[static_cast<std::size_t>(arm_index(Json(key), w))] = plan;
    }
  }

  cfg.posture.gains = default_posture_gains(m);
  if (auto it = doc.find("hierarchy"); it != doc.end()) {
    const auto w = root + ".hierarchy";
    if (it->contains("operational"))
      cfg.hierarchy.operational =
          parse_operational(to_string((*it)["operational"], w + ".operational"), w + ".operational");
    cfg.hierarchy.regularization = json_util::get_or(*it, "regularization", kDefaultRegularization, w);
    if (!(cfg.hierarchy.regularization > 0.0)) fail(w + ".regularization", "must be positive");
    if (auto sw = it->find("slack_weights"); sw != it->end()) {
      cfg.hierarchy.safety_weight = json_util::get_or(*sw, "safety", kSafetySlackWeight, w);
      cfg.hierarchy.operational_weight =
          json_util::get_or(*sw, "operational", kOperationalSlackWeight, w);
      cfg.hierarchy.optimization_weight =
          json_util::get_or(*sw, "optimization", kOptimizationSlackWeight, w);
    }
    cfg.hierarchy.qp_tolerance = json_util::get_or(*it, "qp_tolerance", kDefaultQpTolerance, w);
    if (it->contains("qp_max_iter")) cfg.hierarchy.qp_max_iter = (*it)["qp_max_iter"].get<int>();
    if (auto hb = it->find("hard_boxes"); hb != it->end()) {
      for (std::size_t i = 0; i < hb->size(); ++i) {
        VelocityOverride box{VectorX::Constant(m.decision_size(), -kInfinity),
                             VectorX::Constant(m.decision_size(), kInfinity)};
        apply_box(m, (*hb)[i], box.lo, box.hi, w + ".hard_boxes[" + std::to_string(i) + "]");
        cfg.hierarchy.hard_boxes.push_back(box);
      }
    }
    if (auto pj = it->find("posture"); pj != it->end()) {
      const auto pw = w + ".posture";
      if (pj->is_boolean()) {
        cfg.posture.enabled = pj->get<bool>();
      } else {
        cfg.posture.enabled = pj->value("enabled", true);
        if (pj->contains("gains"))
          cfg.posture.gains = per_decision(m, (*pj)["gains"], cfg.posture.gains, pw + ".gains");
        if (pj->contains("nominal"))
          cfg.posture.nominal = per_decision(m, (*pj)["nominal"], VectorX::Zero(m.decision_size()),
                                             pw + ".nominal");
        if (auto sj = pj->find("sinusoid"); sj != pj->end()) {
          cfg.posture.amplitude = json_util::get_or(*sj, "amplitude", 0.0, pw + ".sinusoid");
          cfg.posture.rate_amplitude = json_util::get_or(*sj, "rate_amplitude", 0.0, pw + ".sinusoid");
          cfg.posture.period = json_util::get_or(*sj, "period", 25.0, pw + ".sinusoid");
          cfg.posture.group = sj->value("group", std::string("arms"));
          if (!(cfg.posture.period > 0.0)) fail(pw + ".sinusoid.period", "must be positive");
          resolve_group(m, cfg.posture.group, pw + ".sinusoid.group");
        }
      }
    }
  }
  cfg.safety.slack_weight = cfg.hierarchy.safety_weight;
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  if (!std::filesystem::exists(p) && p.extension().empty()) p += ".json";
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_scenario(ss.str(), p.parent_path().empty() ? "." : p.parent_path());
  if (cfg.name.empty()) cfg.name = p.stem().string();
  return cfg;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> issues;
  const RobotModel& m = cfg.robot();
  const auto& lim = m.limits();
  for (int s = 0; s < m.state_size(); ++s) {
    const double q = cfg.initial_q[s];
    const auto& name = m.state_names()[static_cast<std::size_t>(s)];
    if (!(q > lim.pos_lower[s] || is_unbounded_below(lim.pos_lower[s])) ||
        !(q < lim.pos_upper[s] || is_unbounded_above(lim.pos_upper[s])))
      issues.push_back("initial q of '" + name + "' = " + std::to_string(q) +
                       " is not strictly inside [" + std::to_string(lim.pos_lower[s]) + ", " +
                       std::to_string(lim.pos_upper[s]) + "]");
  }
  if (!issues.empty()) return issues;
  for (const auto& w : cfg.safety.walls) {
    try {
      w.check();
    } catch (const ConfigError& e) {
      issues.push_back(e.what());
    }
  }
  for (const auto& p : cfg.safety.pairs) {
    try {
      p.check();
    } catch (const ConfigError& e) {
      issues.push_back(e.what());
    }
  }
  if (!issues.empty()) return issues;
  JointState st{cfg.initial_q, VectorX::Zero(m.decision_size()), 0.0};
  const Kinematics kin(m, st.q);
  const auto stack = build_safety(kin, st, cfg.safety);
  for (const auto& b : stack.barriers)
    if (!(b.h > 0.0)) issues.push_back("barrier '" + b.label + "' = " + std::to_string(b.h) + " at t = 0");
  for (const auto& d : stack.degenerate) issues.push_back("degenerate collision pair '" + d + "'");
  return issues;
}

}  // namespace agrihqp
