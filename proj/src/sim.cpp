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
#include "agrihqp/sim.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace agrihqp {

VectorX integrate(const RobotModel& model, const VectorX& q, const VectorX& qdot, double Ts) {
  if (q.size() != model.state_size() || qdot.size() != model.decision_size())
    throw std::invalid_argument("integrate: dimension mismatch");
  VectorX out = q;
  for (const auto& j : model.joints()) {
    if (j.kind == JointKind::kPlanarBase) {
      const double th = q[j.state_index + 2];
      const Eigen::Vector3d rate =
          base_velocity_mapping(th) * qdot.segment<2>(j.decision_index);
      out.segment<3>(j.state_index) += Ts * rate;
    } else {
      out[j.state_index] += Ts * qdot[j.decision_index];
    }
  }
  return out;
}

Wrench sample_wrench(const WrenchProfile& profile, double t, const Quat& tool_orientation,
                     double noise_force, double noise_moment, std::mt19937_64& rng) {
  Wrench w;
  for (const auto& s : profile.segments) {
    if (t >= s.t_start && t < s.t_end) {
      w.force = s.wrench.head<3>();
      w.moment = s.wrench.tail<3>();
      if (s.tool_frame) {
        w.force = tool_orientation * w.force;
        w.moment = tool_orientation * w.moment;
      }
      break;
    }
  }
  if (noise_force > 0.0 || noise_moment > 0.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) w.force[i] += noise_force * u(rng);
    for (int i = 0; i < 3; ++i) w.moment[i] += noise_moment * u(rng);
  }
  return w;
}

std::vector<std::string> SimResult::columns() const {
  std::vector<std::string> c{"t"};
  for (const auto& n : state_names) c.push_back("q_" + n);
  for (const auto& n : decision_names) c.push_back("qdot_" + n);
  const char* arms[] = {"left", "right"};
  for (const char* prefix : {"ee", "ee_des"}) {
    for (const char* a : arms) {
      for (const char* k : {"px", "py", "pz", "qw", "qx", "qy", "qz"})
        c.push_back(std::string(prefix) + "_" + a + "_" + k);
      if (std::string(prefix) == "ee")
        for (const char* k : {"vx", "vy", "vz", "wx", "wy", "wz"})
          c.push_back(std::string(prefix) + "_" + a + "_" + k);
    }
  }
  for (const char* prefix : {"wraw", "wcomp"})
    for (const char* a : arms)
      for (const char* k : {"fx", "fy", "fz", "mx", "my", "mz"})
        c.push_back(std::string(prefix) + "_" + a + "_" + k);
  for (const auto& b : barrier_labels) c.push_back("h_" + b);
  for (const char* s : {"slack_l1", "slack_l2", "slack_l3", "solve_time", "phase", "mode", "event"})
    c.push_back(s);
  return c;
}

namespace {

constexpr double kSettle = 0.5;      // rest time after a trajectory, s
constexpr double kTimeEps = 1e-9;
constexpr double kSlackWarn = 1e-6;  // safety slack norm worth a warning

struct PendingPerception {
  double due = std::numeric_limits<double>::infinity();
  PerceptionOutcome outcome;
  bool active = false;
};

// Reference of one end-effector: hold a pose, optionally following a
// trajectory while it runs.
struct ArmReference {
  Pose hold;
  std::optional<CartesianTrajectory> traj;

  TrajectorySample at(double t) const {
    if (traj && t < traj->t_end() + kTimeEps) return sample(*traj, t);
    TrajectorySample s;
    s.pose = hold;
    return s;
  }

  void follow(CartesianTrajectory tr) {
    hold = tr.segments.empty() ? tr.initial : tr.segments.back().end;
    traj = std::move(tr);
  }

  void anchor(const Pose& p) {
    hold = p;
    traj.reset();
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

std::string diagnose(const RobotModel& m, const Hierarchy& h, int level) {
  const int n = m.decision_size();
  VectorX lo = VectorX::Constant(n, -kInfinity), hi = VectorX::Constant(n, kInfinity);
  for (const auto& b : h.boxes) {
    lo = lo.cwiseMax(b.lo);
    hi = hi.cwiseMin(b.hi);
  }
  for (int d = 0; d < n; ++d)
    if (lo[d] > hi[d])
      return "hard velocity box on '" + m.decision_names()[static_cast<std::size_t>(d)] +
             "' is empty [" + fmt(lo[d]) + ", " + fmt(hi[d]) + "]";
  std::string labels;
  if (level >= 0 && level < static_cast<int>(h.levels.size()))
    for (const auto& t : h.levels[static_cast<std::size_t>(level)])
      labels += (labels.empty() ? "" : "+") + t.label;
  return "level " + std::to_string(level + 1) + " (" + labels + ") infeasible";
}

}  // namespace

SimResult run_scenario(const ScenarioConfig& cfg) {
  const RobotModel& model = cfg.robot();
  const int n_u = model.decision_size();
  const double Ts = cfg.sim.Ts;
  const long ticks = std::lround(cfg.sim.duration / Ts);
  if (cfg.initial_q.size() != model.state_size())
    throw ConfigError("initial_q has the wrong size");

  SimResult res;
  res.scenario = cfg.name;
  res.seed = cfg.sim.seed;
  res.Ts = Ts;
  res.state_names = model.state_names();
  res.decision_names = model.decision_names();
  res.records.reserve(static_cast<std::size_t>(ticks + 1));

  const std::array<int, 2> ee = {model.frame_index(frames::kEeLeft),
                                 model.frame_index(frames::kEeRight)};
  const std::array<int, 2> sensor = {model.frame_index(frames::kWristLeft),
                                     model.frame_index(frames::kWristRight)};

  std::mt19937_64 rng(cfg.sim.seed);
  VectorX q = cfg.initial_q;
  VectorX qdot = VectorX::Zero(n_u);
  ControllerMemory mem;
  mem.Ts = Ts;
  std::array<ContactState, 2> contact;
  FsmState fsm;
  const bool supervised = cfg.hierarchy.operational == OperationalMode::kSupervisor;

  const VectorX q_nominal =
      cfg.posture.nominal.size() == n_u ? cfg.posture.nominal : decision_positions(model, q);
  VectorX selector = VectorX::Zero(n_u);
  if (cfg.posture.amplitude != 0.0 || cfg.posture.rate_amplitude != 0.0) {
    const auto group = model.find_decision(cfg.posture.group)
                           ? std::vector<int>{*model.find_decision(cfg.posture.group)}
                           : model.decision_group(cfg.posture.group);
    for (int d : group) selector[d] = 1.0;
  }

  std::array<ArmReference, 2> refs;
  {
    const Kinematics kin(model, q);
    for (int a = 0; a < 2; ++a) refs[static_cast<std::size_t>(a)].anchor(kin.pose(ee[static_cast<std::size_t>(a)]));
    for (int a = 0; a < 2; ++a) {
      const auto& wp = cfg.waypoints[static_cast<std::size_t>(a)];
      if (!wp) continue;
      std::vector<Pose> poses{refs[static_cast<std::size_t>(a)].hold};
      poses.insert(poses.end(), wp->poses.begin(), wp->poses.end());
      refs[static_cast<std::size_t>(a)].follow(plan_cartesian(poses, CartesianLimits{}, wp->t_start));
    }
  }

  std::optional<HarvestConfig> harvest = cfg.harvest;
  if (harvest && !harvest->plan.home.p.allFinite())
    harvest->plan.home = refs[static_cast<std::size_t>(harvest->arm)].hold;
  const std::size_t harm = harvest ? static_cast<std::size_t>(harvest->arm) : 1;

  std::deque<PerceptionEntry> head_queue(cfg.perception.head.begin(), cfg.perception.head.end());
  std::deque<PerceptionEntry> wrist_queue(cfg.perception.wrist.begin(), cfg.perception.wrist.end());
  PendingPerception pending;
  double done_at = std::numeric_limits<double>::infinity();
  bool done_reported = true;

  auto schedule = [&](std::deque<PerceptionEntry>& queue, PerceptionSource src, double t) {
    pending.active = true;
    if (queue.empty()) {
      pending.due = t + (harvest ? harvest->detect_timeout : 30.0);
      pending.outcome = PerceptionOutcome{src, {}};
    } else {
      pending.due = t + queue.front().delay;
      pending.outcome = queue.front().outcome;
      queue.pop_front();
    }
  };

  // Arrival notes, emitted on the first tick at or after their time.
  std::vector<std::pair<double, std::string>> arrivals;

  auto plan_from_ref = [&](const std::vector<HarvestWaypoint>& targets, double t) {
    std::vector<Pose> poses{refs[harm].at(t).pose};
    for (const auto& w : targets) poses.push_back(w.pose);
    auto traj = plan_cartesian(poses, harvest ? harvest->limits : CartesianLimits{}, t);
    for (std::size_t i = 0; i < traj.segments.size() && i < targets.size(); ++i) {
      const auto& seg = traj.segments[i];
      arrivals.emplace_back(seg.t_start + seg.duration, "reached " + targets[i].label);
    }
    return traj;
  };

  auto on_enter = [&](Phase phase, double t, const Kinematics& kin) {
    pending.active = false;
    done_at = std::numeric_limits<double>::infinity();
    done_reported = false;
    if (!harvest) return;
    const auto wps = fsm.target ? harvest_waypoints(*fsm.target, harvest->box, harvest->plan)
                                : std::vector<HarvestWaypoint>{};
    switch (phase) {
      case Phase::kDetectHead:
        schedule(head_queue, PerceptionSource::kHead, t);
        break;
      case Phase::kDetectWrist:
        schedule(wrist_queue, PerceptionSource::kWrist, t);
        break;
      case Phase::kMovePreGrasp: {
        refs[harm].follow(plan_from_ref({wps.at(0)}, t));
        done_at = refs[harm].traj->t_end() + kSettle;
        break;
      }
      case Phase::kGrasp:
        if (fsm.peduncle_known && fsm.target) {
          refs[harm].follow(plan_from_ref({wps.at(1)}, t));
          done_at = refs[harm].traj->t_end() + kSettle + harvest->grasp_time;
        } else {
          // Resume from wherever the operator left the tools.
          for (int a = 0; a < 2; ++a)
            refs[static_cast<std::size_t>(a)].anchor(kin.pose(ee[static_cast<std::size_t>(a)]));
          done_at = t + harvest->grasp_time;
        }
        break;
      case Phase::kCut:
        done_at = t + harvest->cut_time;
        break;
      case Phase::kDeposit: {
        HarvestPlanConfig plan = harvest->plan;
        const Pose grasp = refs[harm].at(t).pose;
        const auto rel = harvest_waypoints(grasp, harvest->box, plan);
        refs[harm].follow(plan_from_ref({rel.at(2), rel.at(3)}, t));
        done_at = refs[harm].traj->t_end() + kSettle + harvest->release_time;
        break;
      }
      case Phase::kHome:
        refs[harm].follow(plan_from_ref({HarvestWaypoint{"home", harvest->plan.home, {}}}, t));
        done_at = refs[harm].traj->t_end() + kSettle;
        break;
      default:
        break;
    }
  };

  Mode last_mode = Mode::kAutonomous;
  if (cfg.hierarchy.operational == OperationalMode::kHandGuiding) last_mode = Mode::kGuided;

  for (long k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * Ts;
    const JointState state{q, qdot, t};
    const Kinematics kin(model, q);
    LogRecord rec;
    rec.t = t;
    rec.q = q;

    // Wrench pipeline per arm.
    Vec12 h12 = Vec12::Zero();
    double quiet_for = 0.0;
    bool any_contact = false;
    for (std::size_t a = 0; a < 2; ++a) {
      const Pose pose = kin.pose(ee[a]);
      const Quat rs = kin.pose(sensor[a]).o;
      const Wrench ext = sample_wrench(cfg.wrench_profiles[a], t, pose.o, cfg.sim.noise_force,
                                       cfg.sim.noise_moment, rng);
      const auto& payload = cfg.payload[a];
      const Vec3 fg = rs.conjugate() * (payload.mass * payload.gravity);
      Wrench raw;
      raw.frame = a == 0 ? "wrist_left" : "wrist_right";
      raw.force = rs.conjugate() * ext.force + fg;
      raw.moment = rs.conjugate() * ext.moment + payload.com.cross(fg);
      Wrench comp = compensate_payload(raw, rs, payload);
      comp.force = rs * comp.force;
      comp.moment = rs * comp.moment;
      comp.frame = "world";
      contact[a] = classify_contact(comp, contact[a], cfg.contact, t);
      h12.segment<3>(6 * static_cast<Eigen::Index>(a)) = contact[a].filtered.force;
      h12.segment<3>(6 * static_cast<Eigen::Index>(a) + 3) = contact[a].filtered.moment;
      any_contact = any_contact || contact[a].in_contact;
      if (contact[a].in_contact && !std::isnan(contact[a].below_since))
        quiet_for = std::max(quiet_for, t - contact[a].below_since);
      rec.wrench_raw[a] = raw;
      rec.wrench_comp[a] = comp;
    }

    std::vector<std::string> notes;
    for (auto it = arrivals.begin(); it != arrivals.end();) {
      if (it->first <= t + kTimeEps) {
        notes.push_back(it->second);
        it = arrivals.erase(it);
      } else {
        ++it;
      }
    }
    Mode mode = last_mode;
    if (supervised) {
      FsmEvent ev;
      ev.t = t;
      ev.start = k == 0;
      ev.in_contact = any_contact;
      ev.quiet_for = quiet_for;
      if (pending.active && t + kTimeEps >= pending.due) {
        ev.perception = pending.outcome;
        pending.active = false;
      }
      if (!done_reported && t + kTimeEps >= done_at) {
        ev.trajectory_complete = true;
        done_reported = true;
      }
      const FsmState next = step(fsm, ev, cfg.fsm, &notes);
      const bool phase_changed = next.phase != fsm.phase;
      const bool mode_changed = next.mode != fsm.mode;
      fsm = next;
      if (mode_changed && fsm.mode == Mode::kAutonomous) {
        for (std::size_t a = 0; a < 2; ++a) refs[a].anchor(kin.pose(ee[a]));
      }
      if (phase_changed) on_enter(fsm.phase, t, kin);
      mode = fsm.mode;
    }
    last_mode = mode;

    // Task hierarchy for this tick.
    const SafetyStack safety = build_safety(kin, state, cfg.safety);
    if (k == 0) {
      for (const auto& b : safety.barriers) res.barrier_labels.push_back(b.label);
      res.safety_rows = safety.rows();
    }
    for (const auto& d : safety.degenerate) notes.push_back("degenerate collision pair " + d);

    CartesianReference ref;
    for (std::size_t a = 0; a < 2; ++a) {
      const auto s = refs[a].at(t);
      ref.pose[a] = s.pose;
      ref.v.segment<6>(6 * static_cast<Eigen::Index>(a)) = s.twist;
      ref.a.segment<6>(6 * static_cast<Eigen::Index>(a)) = s.accel;
      rec.ee_desired[a] = s.pose;
    }

    const MatrixX Jd = stacked_dual_arm_jacobian(model, state);
    mem.prime(Jd * qdot);

    HierarchySpec spec;
    if (supervised) {
      spec = hierarchy_for_mode(fsm, HierarchyOptions{cfg.posture.enabled});
    } else {
      spec.levels.push_back({TaskKind::kSafety});
      if (cfg.hierarchy.operational == OperationalMode::kAdmittance)
        spec.levels.push_back({TaskKind::kAdmittance});
      else if (cfg.hierarchy.operational == OperationalMode::kHandGuiding)
        spec.levels.push_back({TaskKind::kHandGuiding});
      if (cfg.posture.enabled) spec.levels.push_back({TaskKind::kPosture});
    }

    Hierarchy h;
    h.n_u = n_u;
    h.regularization = cfg.hierarchy.regularization;
    for (const auto& b : cfg.hierarchy.hard_boxes) h.boxes.push_back({b.lo, b.hi});
    for (const auto& level : spec.levels) {
      std::vector<TaskConstraint> tasks;
      for (TaskKind kind : level) {
        switch (kind) {
          case TaskKind::kSafety:
            tasks.insert(tasks.end(), safety.tasks.begin(), safety.tasks.end());
            break;
          case TaskKind::kAdmittance:
            tasks.push_back(admittance_constraint(kin, mem, ref, h12, cfg.admittance_autonomous,
                                                  cfg.hierarchy.operational_weight));
            break;
          case TaskKind::kHandGuiding:
            tasks.push_back(hand_guiding_constraint(kin, mem, h12, cfg.admittance_guided,
                                                    cfg.hierarchy.operational_weight));
            break;
          case TaskKind::kPosture: {
            const double phase = 2.0 * M_PI * t / cfg.posture.period;
            const VectorX q_d = q_nominal + cfg.posture.amplitude * std::sin(phase) * selector;
            const VectorX qdot_d = cfg.posture.rate_amplitude * std::sin(phase) * selector;
            tasks.push_back(preferred_posture_constraint(model, state, q_d, qdot_d,
                                                         cfg.posture.gains,
                                                         cfg.hierarchy.optimization_weight));
            break;
          }
        }
      }
      h.levels.push_back(std::move(tasks));
    }

    HqpSolution sol;
    std::string failure;
    try {
      sol = solve_cascade(h, cfg.hierarchy.qp_tolerance, cfg.hierarchy.qp_max_iter);
      if (!sol.ok())
        failure = diagnose(model, h, sol.failed_level) + ": " +
                  to_string(sol.statuses.back());
    } catch (const std::invalid_argument& e) {
      failure = diagnose(model, h, -1) + " (" + e.what() + ")";
    }

    rec.phase = supervised ? fsm.phase : Phase::kIdle;
    rec.mode = mode;
    rec.h.resize(static_cast<Eigen::Index>(safety.barriers.size()));
    for (std::size_t i = 0; i < safety.barriers.size(); ++i)
      rec.h[static_cast<Eigen::Index>(i)] = safety.barriers[i].h;

    if (!failure.empty()) {
      res.aborted = true;
      res.abort_tick = static_cast<int>(k);
      res.abort_reason = "tick " + std::to_string(k) + " (t = " + fmt(t) + " s): " + failure;
      notes.push_back("abort: " + failure);
      rec.qdot = VectorX::Zero(n_u);
      for (std::size_t a = 0; a < 2; ++a) {
        rec.ee_pose[a] = kin.pose(ee[a]);
        rec.ee_twist[a].setZero();
      }
    } else {
      rec.qdot = sol.qdot;
      for (std::size_t i = 0; i < sol.slack_norms.size() && i < 3; ++i)
        rec.slack_norms[i] = sol.slack_norms[i];
      rec.solve_time = sol.solve_time;
      const Vec12 twist = Jd * sol.qdot;
      for (std::size_t a = 0; a < 2; ++a) {
        rec.ee_pose[a] = kin.pose(ee[a]);
        rec.ee_twist[a] = twist.segment<6>(6 * static_cast<Eigen::Index>(a));
      }
      for (int lvl : sol.skipped_levels)
        res.warnings.push_back("t = " + fmt(t) + ": level " + std::to_string(lvl + 1) +
                               " kept the previous optimum");
      if (!sol.slack_norms.empty() && sol.slack_norms[0] > kSlackWarn)
        res.warnings.push_back("t = " + fmt(t) + ": safety slack " + fmt(sol.slack_norms[0]));
    }

    for (auto& n : notes) {
      n = sanitize(n);
      res.events.push_back({t, rec.phase, rec.mode, n});
      rec.event += (rec.event.empty() ? "" : "; ") + n;
    }
    res.records.push_back(std::move(rec));
    if (res.aborted) break;

    mem.v_prev = Jd * sol.qdot;
    qdot = sol.qdot;
    q = integrate(model, q, qdot, Ts);
  }
  return res;
}

void write_log_csv(const SimResult& r, std::ostream& out) {
  out << "# agrihqp scenario=" << r.scenario << " seed=" << r.seed << " Ts=" << fmt(r.Ts) << "\n";
  const auto cols = r.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  std::string line;
  for (const auto& rec : r.records) {
    line.clear();
    auto put = [&](double v) {
      line += fmt(v);
      line += ',';
    };
    put(rec.t);
    for (Eigen::Index i = 0; i < rec.q.size(); ++i) put(rec.q[i]);
    for (Eigen::Index i = 0; i < rec.qdot.size(); ++i) put(rec.qdot[i]);
    auto put_pose = [&](const Pose& p) {
      for (int i = 0; i < 3; ++i) put(p.p[i]);
      put(p.o.w());
      put(p.o.x());
      put(p.o.y());
      put(p.o.z());
    };
    for (std::size_t a = 0; a < 2; ++a) {
      put_pose(rec.ee_pose[a]);
      for (int i = 0; i < 6; ++i) put(rec.ee_twist[a][i]);
    }
    for (std::size_t a = 0; a < 2; ++a) put_pose(rec.ee_desired[a]);
    for (const auto* ws : {&rec.wrench_raw, &rec.wrench_comp})
      for (std::size_t a = 0; a < 2; ++a) {
        for (int i = 0; i < 3; ++i) put((*ws)[a].force[i]);
        for (int i = 0; i < 3; ++i) put((*ws)[a].moment[i]);
      }
    for (Eigen::Index i = 0; i < rec.h.size(); ++i) put(rec.h[i]);
    for (double s : rec.slack_norms) put(s);
    put(rec.solve_time);
    line += to_string(rec.phase);
    line += ',';
    line += to_string(rec.mode);
    line += ',';
    line += rec.event;
    out << line << '\n';
  }
}

void write_events_csv(const SimResult& r, std::ostream& out) {
  out << "t,phase,mode,event\n";
  for (const auto& e : r.events)
    out << fmt(e.t) << ',' << to_string(e.phase) << ',' << to_string(e.mode) << ',' << e.event
        << '\n';
}

}  // namespace agrihqp
