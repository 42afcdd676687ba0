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
#include "agrihqp/hierarchy.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace agrihqp {

TaskConstraint TaskConstraint::equality(MatrixX J, const VectorX& b, double weight,
                                        std::string label) {
  TaskConstraint t;
  t.J = std::move(J);
  t.lo = b;
  t.hi = b;
  t.slack_weight = VectorX::Constant(b.size(), weight);
  t.label = std::move(label);
  return t;
}

TaskConstraint TaskConstraint::stack(const std::vector<TaskConstraint>& parts, std::string label) {
  TaskConstraint out;
  out.label = std::move(label);
  int rows = 0;
  int cols = -1;
  for (const auto& p : parts) {
    rows += p.rows();
    if (cols < 0) cols = p.cols();
    if (p.cols() != cols) throw std::invalid_argument("TaskConstraint::stack: column mismatch");
  }
  if (cols < 0) cols = 0;
  out.J.resize(rows, cols);
  out.lo.resize(rows);
  out.hi.resize(rows);
  out.slack_weight.resize(rows);
  int r = 0;
  for (const auto& p : parts) {
    const int k = p.rows();
    out.J.middleRows(r, k) = p.J;
    out.lo.segment(r, k) = p.lo;
    out.hi.segment(r, k) = p.hi;
    out.slack_weight.segment(r, k) = p.slack_weight;
    for (int i = 0; i < k; ++i) {
      out.row_labels.push_back(static_cast<std::size_t>(i) < p.row_labels.size()
                                   ? p.row_labels[static_cast<std::size_t>(i)]
                                   : p.label + "[" + std::to_string(i) + "]");
    }
    r += k;
  }
  return out;
}

void TaskConstraint::check(int n_u) const {
  const auto m = J.rows();
  if (J.cols() != n_u)
    throw std::invalid_argument("task '" + label + "': Jacobian has " + std::to_string(J.cols()) +
                                " columns, expected " + std::to_string(n_u));
  if (lo.size() != m || hi.size() != m || slack_weight.size() != m)
    throw std::invalid_argument("task '" + label + "': bound sizes do not match the Jacobian");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("task '" + label + "': lo > hi");
    if (!(slack_weight[i] > 0.0))
      throw std::invalid_argument("task '" + label + "': slack weights must be positive");
  }
}

int Hierarchy::level_rows(int level) const {
  int rows = 0;
  for (const auto& t : levels.at(static_cast<std::size_t>(level))) rows += t.rows();
  return rows;
}

namespace {

bool has_finite_side(double lo, double hi) {
  return !is_unbounded_below(lo) || !is_unbounded_above(hi);
}

bool is_equality(double lo, double hi) { return lo == hi && !is_unbounded_below(lo); }

// Equality rows are folded into the cost as weight * |b - J qdot|^2, which
// keeps nearly dependent equality rows out of the stage. That puts the weight
// next to the regularization in one Hessian, so past this ratio the row keeps
// an explicit slack column instead (the Hessian then stays diagonal).
constexpr double kMaxFoldRatio = 1e10;

bool folded(const Hierarchy& h, const TaskConstraint& t, int j) {
  return is_equality(t.lo[j], t.hi[j]) && t.slack_weight[j] <= kMaxFoldRatio * h.regularization;
}

double shift(double bound, double w) {
  if (is_unbounded_below(bound) || is_unbounded_above(bound)) return bound;
  return bound - w;
}

}  // namespace

QpProblem stage_problem(const Hierarchy& h, int i, const std::vector<VectorX>& frozen) {
  if (i < 0 || i >= static_cast<int>(h.levels.size()))
    throw std::out_of_range("stage_problem: level index out of range");
  if (static_cast<int>(frozen.size()) < i)
    throw std::invalid_argument("stage_problem: missing frozen slacks");
  const int n_u = h.n_u;
  const auto& level = h.levels[static_cast<std::size_t>(i)];

  int n_w = 0;
  int n_eq = 0;
  for (const auto& t : level)
    for (int r = 0; r < t.rows(); ++r) {
      if (folded(h, t, r)) ++n_eq;
      else if (has_finite_side(t.lo[r], t.hi[r])) ++n_w;
    }

  int rows = h.level_rows(i) - n_eq;
  for (int k = 0; k < i; ++k) rows += h.level_rows(k);
  for (const auto& b : h.boxes) rows += static_cast<int>(b.lo.size());

  const int n = n_u + n_w;
  QpProblem p;
  p.H = MatrixX::Zero(n, n);
  p.H.topLeftCorner(n_u, n_u).diagonal().setConstant(h.regularization);
  p.g = VectorX::Zero(n);
  p.A = MatrixX::Zero(rows, n);
  p.lo.resize(rows);
  p.hi.resize(rows);

  int r = 0;
  for (const auto& b : h.boxes) {
    for (Eigen::Index j = 0; j < b.lo.size(); ++j, ++r) {
      p.A(r, j) = 1.0;
      p.lo[r] = b.lo[j];
      p.hi[r] = b.hi[j];
    }
  }
  for (int k = 0; k < i; ++k) {
    const VectorX& w = frozen[static_cast<std::size_t>(k)];
    int kr = 0;
    for (const auto& t : h.levels[static_cast<std::size_t>(k)]) {
      t.check(n_u);
      for (int j = 0; j < t.rows(); ++j, ++r, ++kr) {
        p.A.row(r).head(n_u) = t.J.row(j);
        const double wk = kr < w.size() ? w[kr] : 0.0;
        p.lo[r] = shift(t.lo[j], wk);
        p.hi[r] = shift(t.hi[j], wk);
      }
    }
  }
  int col = n_u;
  for (const auto& t : level) {
    t.check(n_u);
    for (int j = 0; j < t.rows(); ++j) {
      if (folded(h, t, j)) {
        // w = b - J qdot substituted into weight * w^2.
        const double c = 2.0 * t.slack_weight[j];
        p.H.topLeftCorner(n_u, n_u).noalias() += c * t.J.row(j).transpose() * t.J.row(j);
        p.g.head(n_u).noalias() -= c * t.lo[j] * t.J.row(j).transpose();
        continue;
      }
      p.A.row(r).head(n_u) = t.J.row(j);
      p.lo[r] = t.lo[j];
      p.hi[r] = t.hi[j];
      if (has_finite_side(t.lo[j], t.hi[j])) {
        p.A(r, col) = 1.0;
        p.H(col, col) = 2.0 * t.slack_weight[j];
        ++col;
      }
      ++r;
    }
  }
  return p;
}

HqpSolution solve_cascade(const Hierarchy& h, double tolerance, int max_iter) {
  if (h.levels.empty()) throw std::invalid_argument("solve_cascade: hierarchy has no levels");
  const auto start = std::chrono::steady_clock::now();
  HqpSolution out;
  out.qdot = VectorX::Zero(h.n_u);
  std::vector<VectorX> frozen;
  for (int i = 0; i < static_cast<int>(h.levels.size()); ++i) {
    const QpProblem p = stage_problem(h, i, frozen);
    const QpSolution s = solve(p, tolerance, max_iter);
    out.statuses.push_back(s.status);
    if (s.status != QpStatus::kOptimal) {
      if (i == 0) {
        out.failed_level = i;
        break;
      }
      // The previous optimum is feasible for this stage, so a failure here is
      // numerical. Keep that optimum and freeze the level at its residual.
      out.skipped_levels.push_back(i);
      const VectorX w = level_residual(h.levels[static_cast<std::size_t>(i)], out.qdot);
      out.slack_norms.push_back(w.norm());
      frozen.push_back(w);
      continue;
    }
    out.qdot = s.z.head(h.n_u);
    // Scatter slack columns back onto the level's rows.
    VectorX w = VectorX::Zero(h.level_rows(i));
    int col = h.n_u;
    int r = 0;
    for (const auto& t : h.levels[static_cast<std::size_t>(i)]) {
      for (int j = 0; j < t.rows(); ++j, ++r) {
        if (folded(h, t, j)) w[r] = t.lo[j] - t.J.row(j).dot(out.qdot);
        else if (has_finite_side(t.lo[j], t.hi[j])) w[r] = s.z[col++];
      }
    }
    out.slack_norms.push_back(w.size() ? w.norm() : 0.0);
    frozen.push_back(w);
  }
  out.slacks = std::move(frozen);
  out.solve_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

MatrixX pseudo_inverse(const MatrixX& m, double threshold) {
  if (m.size() == 0) return MatrixX::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<MatrixX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorX inv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > threshold ? 1.0 / inv[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

VectorX nullspace_reference(const std::vector<std::pair<MatrixX, VectorX>>& levels) {
  if (levels.empty()) return {};
  const auto n = levels.front().first.cols();
  VectorX qdot = VectorX::Zero(n);
  MatrixX N = MatrixX::Identity(n, n);
  for (const auto& [J, b] : levels) {
    const MatrixX JN = J * N;
    const MatrixX JNp = pseudo_inverse(JN);
    qdot += JNp * (b - J * qdot);
    N -= JNp * JN;
  }
  return qdot;
}

VectorX level_residual(const std::vector<TaskConstraint>& level, const VectorX& qdot) {
  int rows = 0;
  for (const auto& t : level) rows += t.rows();
  VectorX w = VectorX::Zero(rows);
  int r = 0;
  for (const auto& t : level) {
    const VectorX jq = t.J * qdot;
    for (int j = 0; j < t.rows(); ++j, ++r) {
      if (!is_unbounded_below(t.lo[j]) && jq[j] < t.lo[j]) w[r] = t.lo[j] - jq[j];
      else if (!is_unbounded_above(t.hi[j]) && jq[j] > t.hi[j]) w[r] = t.hi[j] - jq[j];
    }
  }
  return w;
}

}  // namespace agrihqp
