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
#include "acceptance/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using agrihqp::is_unbounded_above;
using agrihqp::is_unbounded_below;

std::optional<VectorX> exhaustive_qp(const agrihqp::QpProblem& p, double feas_tol) {
  const int n = p.size();
  const int m = p.rows();
  std::optional<VectorX> best;
  double best_cost = std::numeric_limits<double>::infinity();

  std::vector<int> choice(m, 0);  // 0 free, 1 lower, 2 upper
  while (true) {
    std::vector<int> rows;
    std::vector<double> rhs;
    bool valid = true;
    for (int i = 0; i < m && valid; ++i) {
      if (choice[i] == 1) {
        if (is_unbounded_below(p.lo(i))) valid = false;
        rows.push_back(i);
        rhs.push_back(p.lo(i));
      } else if (choice[i] == 2) {
        // an equality row has only one face worth trying
        if (is_unbounded_above(p.hi(i)) || p.hi(i) == p.lo(i)) valid = false;
        rows.push_back(i);
        rhs.push_back(p.hi(i));
      }
    }
    if (valid) {
      const int k = static_cast<int>(rows.size());
      MatrixX A(k, n);
      VectorX b(k);
      for (int r = 0; r < k; ++r) {
        A.row(r) = p.A.row(rows[r]);
        b(r) = rhs[r];
      }
      bool independent = k == 0;
      if (k > 0 && k <= n) {
        Eigen::ColPivHouseholderQR<MatrixX> qr(A);
        qr.setThreshold(1e-10);
        independent = qr.rank() == k;
      }
      if (independent) {
        MatrixX K = MatrixX::Zero(n + k, n + k);
        K.topLeftCorner(n, n) = p.H;
        K.topRightCorner(n, k) = A.transpose();
        K.bottomLeftCorner(k, n) = A;
        VectorX r(n + k);
        r << -p.g, b;
        const VectorX sol = K.fullPivLu().solve(r);
        const VectorX z = sol.head(n);
        bool feasible = true;
        for (int i = 0; i < m && feasible; ++i) {
          const double az = p.A.row(i).dot(z);
          if (!is_unbounded_below(p.lo(i)) && az < p.lo(i) - feas_tol) feasible = false;
          if (!is_unbounded_above(p.hi(i)) && az > p.hi(i) + feas_tol) feasible = false;
        }
        if (feasible) {
          const double c = agrihqp::objective(p, z);
          if (c < best_cost) {
            best_cost = c;
            best = z;
          }
        }
      }
    }
    int i = 0;
    while (i < m && ++choice[i] == 3) choice[i++] = 0;
    if (i == m) break;
  }
  return best;
}

agrihqp::QpProblem random_qp(std::mt19937_64& rng, int n, int rows) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  MatrixX M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = N(rng);
  MatrixX H = M * M.transpose() + 0.1 * MatrixX::Identity(n, n);
  VectorX g(n), z0(n);
  for (int i = 0; i < n; ++i) {
    g(i) = 3.0 * N(rng);
    z0(i) = N(rng);
  }
  agrihqp::QpProblem p(H, g);
  for (int r = 0; r < rows; ++r) {
    VectorX a(n);
    for (int i = 0; i < n; ++i) a(i) = N(rng);
    const double c = a.dot(z0);
    const double kind = U(rng);
    double lo = -agrihqp::kInfinity, hi = agrihqp::kInfinity;
    if (kind < 0.4) {
      lo = c - U(rng);
    } else if (kind < 0.8) {
      hi = c + U(rng);
    } else {
      lo = c - U(rng);
      hi = c + U(rng);
    }
    p.add_row(a, lo, hi);
  }
  return p;
}

namespace {

MatrixX pinv(const MatrixX& m) {
  Eigen::JacobiSVD<MatrixX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorX s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > 1e-8 ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * s.asDiagonal() * svd.matrixU().transpose();
}

// State displacement produced by moving decision `i` by `eps`.
VectorX displaced(const agrihqp::RobotModel& model, const VectorX& q, int i, double eps) {
  VectorX out = q;
  const int s = model.state_of_decision(i);
  if (s >= 0) {
    out(s) += eps;
    return out;
  }
  const auto& base = model.joints()[model.planar_base()];
  const double th = q(base.state_index + 2);
  out(base.state_index) += eps * std::cos(th);
  out(base.state_index + 1) += eps * std::sin(th);
  return out;
}

}  // namespace

VectorX nullspace_solution(const std::vector<std::pair<MatrixX, VectorX>>& levels) {
  if (levels.empty()) return {};
  const auto n = levels.front().first.cols();
  VectorX q = VectorX::Zero(n);
  MatrixX P = MatrixX::Identity(n, n);
  for (const auto& [J, b] : levels) {
    const MatrixX JP = J * P;
    const MatrixX JPp = pinv(JP);
    q += JPp * (b - J * q);
    P -= JPp * JP;
  }
  return q;
}

std::vector<std::pair<MatrixX, VectorX>> random_equality_levels(std::mt19937_64& rng, int n,
                                                               int levels) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> rows(1, 3);
  std::vector<std::pair<MatrixX, VectorX>> out;
  for (int l = 0; l < levels; ++l) {
    const int m = rows(rng);
    MatrixX J(m, n);
    VectorX b(m);
    for (int i = 0; i < m; ++i) {
      b(i) = N(rng);
      for (int j = 0; j < n; ++j) J(i, j) = N(rng);
    }
    out.emplace_back(std::move(J), std::move(b));
  }
  return out;
}

VectorX random_configuration(const agrihqp::RobotModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto& lim = model.limits();
  VectorX q(model.state_size());
  for (int i = 0; i < q.size(); ++i) {
    double lo = lim.pos_lower(i), hi = lim.pos_upper(i);
    if (is_unbounded_below(lo)) lo = -2.0;
    if (is_unbounded_above(hi)) hi = 2.0;
    q(i) = lo + (hi - lo) * U(rng);
  }
  return q;
}

MatrixX fd_frame_jacobian(const agrihqp::RobotModel& model, const VectorX& q, int frame,
                          double step) {
  const int n = model.decision_size();
  MatrixX J(6, n);
  for (int i = 0; i < n; ++i) {
    const agrihqp::Kinematics kp(model, displaced(model, q, i, step));
    const agrihqp::Kinematics km(model, displaced(model, q, i, -step));
    const auto Tp = kp.frame_transform(frame);
    const auto Tm = km.frame_transform(frame);
    J.block<3, 1>(0, i) = (Tp.translation() - Tm.translation()) / (2.0 * step);
    const Eigen::AngleAxisd aa(Tp.linear() * Tm.linear().transpose());
    J.block<3, 1>(3, i) = aa.axis() * aa.angle() / (2.0 * step);
  }
  return J;
}

MatrixX fd_point_jacobian(const agrihqp::RobotModel& model, const VectorX& q, int frame,
                          const agrihqp::Vec3& offset, double step) {
  const int n = model.decision_size();
  MatrixX J(3, n);
  for (int i = 0; i < n; ++i) {
    const agrihqp::Kinematics kp(model, displaced(model, q, i, step));
    const agrihqp::Kinematics km(model, displaced(model, q, i, -step));
    J.col(i) = (kp.point_position(frame, offset) - km.point_position(frame, offset)) / (2.0 * step);
  }
  return J;
}

double column_relative_error(const MatrixX& a, const MatrixX& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    worst = std::max(worst, (a.col(i) - b.col(i)).norm() / std::max(1.0, b.col(i).norm()));
  return worst;
}

}  // namespace oracle
