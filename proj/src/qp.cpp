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
#include "agrihqp/qp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agrihqp {

void QpProblem::add_row(const VectorX& a, double lower, double upper) {
  if (a.size() != size()) throw std::invalid_argument("QpProblem::add_row: width mismatch");
  const Eigen::Index r = A.rows();
  A.conservativeResize(r + 1, size());
  A.row(r) = a.transpose();
  lo.conservativeResize(r + 1);
  hi.conservativeResize(r + 1);
  lo[r] = clamp_bound(lower);
  hi[r] = clamp_bound(upper);
}

void QpProblem::check() const {
  const auto n = H.cols();
  if (H.rows() != n) throw std::invalid_argument("QpProblem: H is not square");
  if (g.size() != n) throw std::invalid_argument("QpProblem: g has the wrong size");
  if (A.cols() != n && !(A.rows() == 0))
    throw std::invalid_argument("QpProblem: A has the wrong number of columns");
  if (lo.size() != A.rows() || hi.size() != A.rows())
    throw std::invalid_argument("QpProblem: bound vectors do not match A");
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    if (!(lo[r] <= hi[r])) throw std::invalid_argument("QpProblem: lo > hi on a row");
}

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

double objective(const QpProblem& p, const VectorX& z) {
  return 0.5 * z.dot(p.H * z) + p.g.dot(z);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRegularization = 1e-8;
constexpr double kDependentTolerance = 1e-6;  // scaled units
constexpr double kDependentStep = 1e-12;  // n^T z below this: row in the active span

// One-sided constraint n'y >= b in the scaled variables. `row` is the
// originating QpProblem row and `sign` is +1 for the lower side, -1 for the
// upper one (0 for equalities).
struct Side {
  int row;
  int sign;
  VectorX n;
  double b;
  double scale;  // maps its multiplier back onto the original row
  // Owns a column no other row touches (a slack), so it can never lie in
  // the span of other rows however small its projection looks.
  bool independent = false;
};

// Goldfarb-Idnani working storage, following the classic QuadProg layout:
// J = L^-T Q, R upper triangular (active normals in the J basis).
class DualActiveSet {
 public:
  DualActiveSet(const MatrixX& G, const VectorX& g0) : n_(static_cast<int>(G.cols())) {
    Eigen::LLT<MatrixX> llt(G);
    const MatrixX L = llt.matrixL();
    J_ = L.transpose().triangularView<Eigen::Upper>().solve(MatrixX::Identity(n_, n_));
    R_ = MatrixX::Zero(n_, n_);
    d_ = VectorX::Zero(n_);
    x_ = -llt.solve(g0);
    u_ = VectorX::Zero(n_ + 1);
    active_.assign(static_cast<std::size_t>(n_ + 1), -1);
  }

  int n() const { return n_; }
  int iq() const { return iq_; }
  const VectorX& x() const { return x_; }
  VectorX& x() { return x_; }
  VectorX& u() { return u_; }
  std::vector<int>& active() { return active_; }

  // d = J' np, z = J2 d2, r = R^-1 d1.
  void directions(const VectorX& np, VectorX& z, VectorX& r) {
    d_.noalias() = J_.transpose() * np;
    z.noalias() = J_.rightCols(n_ - iq_) * d_.tail(n_ - iq_);
    if (iq_ > 0)
      r.head(iq_) = R_.topLeftCorner(iq_, iq_).triangularView<Eigen::Upper>().solve(d_.head(iq_));
  }

  // Appends the constraint whose J' np is held in d_. Returns false when it is
  // linearly dependent on the active ones.
  bool add_constraint(bool independent = false) {
    for (int j = n_ - 1; j >= iq_ + 1; --j) {
      double cc = d_[j - 1];
      double ss = d_[j];
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d_[j] = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d_[j - 1] = -h;
      } else {
        d_[j - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j - 1);
        const double t2 = J_(k, j);
        J_(k, j - 1) = t1 * cc + t2 * ss;
        J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
      }
    }
    ++iq_;
    R_.col(iq_ - 1).head(iq_) = d_.head(iq_);
    if (!independent &&
        std::abs(d_[iq_ - 1]) <= std::numeric_limits<double>::epsilon() * 1e2 * r_norm_) {
      // Undo: the column was dependent.
      R_.col(iq_ - 1).head(iq_).setZero();
      --iq_;
      return false;
    }
    r_norm_ = std::max(r_norm_, std::abs(d_[iq_ - 1]));
    return true;
  }

  // Removes the active constraint with identifier `id` (position >= first).
  void delete_constraint(int id, int first) {
    int qq = -1;
    for (int i = first; i < iq_; ++i) {
      if (active_[static_cast<std::size_t>(i)] == id) {
        qq = i;
        break;
      }
    }
    if (qq < 0) throw std::logic_error("dual active set: constraint not active");
    for (int i = qq; i < iq_ - 1; ++i) {
      active_[static_cast<std::size_t>(i)] = active_[static_cast<std::size_t>(i + 1)];
      u_[i] = u_[i + 1];
      R_.col(i) = R_.col(i + 1);
    }
    active_[static_cast<std::size_t>(iq_ - 1)] = active_[static_cast<std::size_t>(iq_)];
    u_[iq_ - 1] = u_[iq_];
    active_[static_cast<std::size_t>(iq_)] = -1;
    u_[iq_] = 0.0;
    R_.col(iq_ - 1).setZero();
    --iq_;
    if (iq_ == 0) return;
    for (int j = qq; j < iq_; ++j) {
      double cc = R_(j, j);
      double ss = R_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R_(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = j + 1; k < iq_; ++k) {
        const double t1 = R_(j, k);
        const double t2 = R_(j + 1, k);
        R_(j, k) = t1 * cc + t2 * ss;
        R_(j + 1, k) = xny * (t1 + R_(j, k)) - t2;
      }
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j);
        const double t2 = J_(k, j + 1);
        J_(k, j) = t1 * cc + t2 * ss;
        J_(k, j + 1) = xny * (J_(k, j) + t1) - t2;
      }
    }
  }

 private:
  int n_;
  int iq_ = 0;
  double r_norm_ = 1.0;
  MatrixX J_, R_;
  VectorX d_, x_, u_;
  std::vector<int> active_;
};

}  // namespace

QpSolution solve(const QpProblem& problem, double tolerance, int max_iter) {
  problem.check();
  const int n = problem.size();
  const int m = problem.rows();

  // Jacobi scaling z = D y keeps slack columns (weights ~1e6) and joint
  // columns (~1e-4) on the same footing.
  VectorX dscale(n);
  for (int i = 0; i < n; ++i) {
    const double hii = problem.H(i, i);
    dscale[i] = hii > 0.0 ? 1.0 / std::sqrt(hii) : 1.0;
  }
  MatrixX G = dscale.asDiagonal() * problem.H * dscale.asDiagonal();
  G = 0.5 * (G + G.transpose());
  {
    Eigen::LLT<MatrixX> probe(G);
    if (probe.info() != Eigen::Success) G.diagonal().array() += kRegularization;
  }
  const VectorX g0 = dscale.cwiseProduct(problem.g);

  // Columns touched by exactly one row and decoupled in H.
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (int c = 0; c < n; ++c) {
    bool coupled = false;
    for (int k = 0; k < n && !coupled; ++k) coupled = k != c && problem.H(k, c) != 0.0;
    if (coupled) {
      owner[static_cast<std::size_t>(c)] = -2;
      continue;
    }
    for (int r = 0; r < m; ++r) {
      if (problem.A(r, c) == 0.0) continue;
      owner[static_cast<std::size_t>(c)] = owner[static_cast<std::size_t>(c)] == -1 ? r : -2;
      if (owner[static_cast<std::size_t>(c)] == -2) break;
    }
  }
  std::vector<char> owns(static_cast<std::size_t>(m), 0);
  for (int c = 0; c < n; ++c)
    if (owner[static_cast<std::size_t>(c)] >= 0) owns[static_cast<std::size_t>(owner[static_cast<std::size_t>(c)])] = 1;

  std::vector<Side> equalities;
  std::vector<Side> inequalities;
  for (int r = 0; r < m; ++r) {
    VectorX a = dscale.cwiseProduct(problem.A.row(r).transpose());
    const double norm = a.norm();
    if (norm == 0.0) {
      // Constant row: either trivially satisfied or hopeless.
      const bool ok = problem.lo[r] <= tolerance && problem.hi[r] >= -tolerance;
      if (!ok) {
        QpSolution bad;
        bad.z = VectorX::Zero(n);
        bad.lambda = VectorX::Zero(m);
        bad.status = QpStatus::kInfeasible;
        return bad;
      }
      continue;
    }
    const double s = 1.0 / norm;
    const double lo = problem.lo[r];
    const double hi = problem.hi[r];
    const bool own = owns[static_cast<std::size_t>(r)] != 0;
    if (lo == hi) {
      equalities.push_back({r, 0, a * s, lo * s, s, own});
      continue;
    }
    if (!is_unbounded_below(lo)) inequalities.push_back({r, +1, a * s, lo * s, s, own});
    if (!is_unbounded_above(hi)) inequalities.push_back({r, -1, -a * s, -hi * s, s, own});
  }

  DualActiveSet qp(G, g0);
  VectorX z(n), r(n + 1);
  QpSolution sol;
  sol.status = QpStatus::kOptimal;
  const int meq = static_cast<int>(equalities.size());
  int iterations = 0;
  int added_eq = 0;

  auto finish = [&](QpStatus status) {
    sol.status = status;
    sol.z = dscale.cwiseProduct(qp.x());
    sol.lambda = VectorX::Zero(m);
    std::vector<int> rows;
    for (int i = 0; i < qp.iq(); ++i) {
      const int id = qp.active()[static_cast<std::size_t>(i)];
      const Side& side =
          id < meq ? equalities[static_cast<std::size_t>(id)]
                   : inequalities[static_cast<std::size_t>(id - meq)];
      const double mult = qp.u()[i] * side.scale;
      sol.lambda[side.row] += side.sign == 0 ? mult : side.sign * mult;
      rows.push_back(side.row);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    sol.active_set = std::move(rows);
    sol.iterations = iterations;
    sol.kkt = verify_kkt(problem, sol);
    return sol;
  };

  // Equalities first. A dependent equality is skipped when consistent.
  for (int e = 0; e < meq; ++e) {
    const Side& c = equalities[static_cast<std::size_t>(e)];
    qp.directions(c.n, z, r);
    const double resid = c.b - c.n.dot(qp.x());
    const double zn = z.dot(c.n);
    if (z.squaredNorm() == 0.0 || std::abs(zn) <= (c.independent ? 0.0 : kDependentStep)) {
      if (std::abs(resid) > tolerance) return finish(QpStatus::kInfeasible);
      continue;
    }
    const double t2 = resid / zn;
    qp.x() += t2 * z;
    const int iq = qp.iq();
    qp.u()[iq] = t2;
    if (iq > 0) qp.u().head(iq) -= t2 * r.head(iq);
    qp.active()[static_cast<std::size_t>(iq)] = e;
    if (!qp.add_constraint(c.independent)) {
      qp.u()[iq] = 0.0;
      qp.active()[static_cast<std::size_t>(iq)] = -1;
      if (std::abs(resid) > tolerance) return finish(QpStatus::kInfeasible);
    } else {
      ++added_eq;
    }
  }
  const int first_ineq_slot = added_eq;

  std::vector<char> is_active(inequalities.size(), 0);
  const int nineq = static_cast<int>(inequalities.size());

  while (true) {
    if (++iterations > max_iter) return finish(QpStatus::kMaxIterations);

    // Step 1: most violated inactive inequality, lowest index on ties.
    int ip = -1;
    double worst = -tolerance;
    for (int i = 0; i < nineq; ++i) {
      if (is_active[static_cast<std::size_t>(i)]) continue;
      const Side& c = inequalities[static_cast<std::size_t>(i)];
      const double s = c.n.dot(qp.x()) - c.b;
      if (s < worst) {
        worst = s;
        ip = i;
      }
    }
    if (ip < 0) return finish(QpStatus::kOptimal);

    const Side& cp = inequalities[static_cast<std::size_t>(ip)];
    double s_ip = cp.n.dot(qp.x()) - cp.b;
    qp.u()[qp.iq()] = 0.0;
    qp.active()[static_cast<std::size_t>(qp.iq())] = meq + ip;

    // Step 2: move until the constraint becomes active.
    while (true) {
      if (++iterations > max_iter) return finish(QpStatus::kMaxIterations);
      qp.directions(cp.n, z, r);
      const int iq = qp.iq();

      double t1 = kInf;
      int l = -1;
      for (int k = first_ineq_slot; k < iq; ++k) {
        if (r[k] > 0.0) {
          const double ratio = qp.u()[k] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            l = qp.active()[static_cast<std::size_t>(k)];
          }
        }
      }
      const double zn = z.dot(cp.n);
      const double min_zn = cp.independent ? 0.0 : kDependentStep;
      const double t2 = (z.squaredNorm() > 0.0 && zn > min_zn) ? -s_ip / zn : kInf;
      const double t = std::min(t1, t2);

      if (t == kInf) {
        // Linearly dependent on the active set. A tiny violation is round-off
        // from frozen higher levels: leave the row out instead of failing.
        if (s_ip >= -kDependentTolerance) {
          is_active[static_cast<std::size_t>(ip)] = 2;
          break;
        }
        return finish(QpStatus::kInfeasible);
      }

      if (t2 == kInf) {
        // Pure dual step.
        if (iq > 0) qp.u().head(iq) -= t * r.head(iq);
        qp.u()[iq] += t;
        is_active[static_cast<std::size_t>(l - meq)] = 0;
        qp.delete_constraint(l, first_ineq_slot);
        continue;
      }

      qp.x() += t * z;
      if (iq > 0) qp.u().head(iq) -= t * r.head(iq);
      qp.u()[iq] += t;

      if (t == t2) {
        // A dependent row is satisfied after the step; keep it out of the set.
        is_active[static_cast<std::size_t>(ip)] = qp.add_constraint(cp.independent) ? 1 : 2;
        break;
      }
      is_active[static_cast<std::size_t>(l - meq)] = 0;
      qp.delete_constraint(l, first_ineq_slot);
      s_ip = cp.n.dot(qp.x()) - cp.b;
    }
  }
}

KktResiduals verify_kkt(const QpProblem& p, const QpSolution& s) {
  const int n = p.size();
  const int m = p.rows();
  if (s.z.size() != n) throw std::invalid_argument("verify_kkt: z has the wrong size");
  if (s.lambda.size() != m && !(s.lambda.size() == 0 && m == 0))
    throw std::invalid_argument("verify_kkt: lambda has the wrong size");
  KktResiduals out;
  const VectorX hz = p.H * s.z;
  VectorX grad = hz + p.g;
  if (m > 0) grad.noalias() -= p.A.transpose() * s.lambda;
  const double denom =
      std::max({1.0, hz.size() ? hz.lpNorm<Eigen::Infinity>() : 0.0,
                p.g.size() ? p.g.lpNorm<Eigen::Infinity>() : 0.0});
  out.stationarity = n ? grad.lpNorm<Eigen::Infinity>() / denom : 0.0;

  for (int r = 0; r < m; ++r) {
    const double az = p.A.row(r).dot(s.z);
    const double scale = std::max(1.0, p.A.row(r).lpNorm<Eigen::Infinity>());
    double viol = 0.0;
    if (!is_unbounded_below(p.lo[r])) viol = std::max(viol, p.lo[r] - az);
    if (!is_unbounded_above(p.hi[r])) viol = std::max(viol, az - p.hi[r]);
    out.primal = std::max(out.primal, viol / scale);

    const double lam = s.lambda[r];
    double comp = 0.0;
    if (lam > 0.0) {
      comp = is_unbounded_below(p.lo[r]) ? lam : lam * std::abs(az - p.lo[r]) / scale;
    } else if (lam < 0.0) {
      comp = is_unbounded_above(p.hi[r]) ? -lam : -lam * std::abs(p.hi[r] - az) / scale;
    }
    out.complementarity = std::max(out.complementarity, comp);
  }
  return out;
}

}  // namespace agrihqp
