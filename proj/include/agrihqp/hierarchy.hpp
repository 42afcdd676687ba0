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
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agrihqp/common.hpp"
#include "agrihqp/qp.hpp"

namespace agrihqp {

inline constexpr double kSafetySlackWeight = 1e6;
inline constexpr double kOperationalSlackWeight = 1e4;
inline constexpr double kOptimizationSlackWeight = 1e2;
inline constexpr double kDefaultRegularization = 1e-4;

/// lo <= J qdot + w <= hi with slack w penalised by diag(slack_weight).
struct TaskConstraint {
  MatrixX J;
  VectorX lo, hi;
  VectorX slack_weight;
  std::string label;
  /// Optional per-row labels (used in logs and abort messages).
  std::vector<std::string> row_labels;

  int rows() const { return static_cast<int>(J.rows()); }
  int cols() const { return static_cast<int>(J.cols()); }

  /// Equality rows J qdot = b.
  static TaskConstraint equality(MatrixX J, const VectorX& b, double weight, std::string label);
  /// Stacks several constraints sharing a column count. Labels are kept per row.
  static TaskConstraint stack(const std::vector<TaskConstraint>& parts, std::string label);

  /// Throws std::invalid_argument when an invariant fails.
  void check(int n_u) const;
};

/// Hard box lo <= qdot <= hi applied at every stage.
struct VelocityBox {
  VectorX lo, hi;
};

struct Hierarchy {
  std::vector<std::vector<TaskConstraint>> levels;
  double regularization = kDefaultRegularization;
  std::vector<VelocityBox> boxes;
  int n_u = 0;

  int level_rows(int level) const;
};

struct HqpSolution {
  VectorX qdot;
  std::vector<VectorX> slacks;     // w*_k per level
  std::vector<double> slack_norms;
  std::vector<QpStatus> statuses;  // one per solved stage
  int failed_level = -1;           // first failing stage or -1
  std::vector<int> skipped_levels; // stages > 0 that failed numerically
  double solve_time = 0.0;         // seconds

  bool ok() const { return failed_level < 0; }
};

/// Stage `i` (0-based) of the cascade: decision vector (qdot, w_i); levels
/// < i appear as hard rows lo - w*_k <= J_k qdot <= hi - w*_k. Level i rows
/// with a finite bound get a slack column, except equality rows (lo == hi)
/// whose weight is at most 1e10 times the regularization: those enter the
/// objective as weight * |b - J qdot|^2, the same problem with the slack
/// eliminated.
QpProblem stage_problem(const Hierarchy& h, int i, const std::vector<VectorX>& frozen);

/// Solves the cascade. Never throws on QP failure. Only the first stage can
/// be infeasible (hard boxes); it is reported in `failed_level`. A later
/// stage that fails keeps the previous optimum and is listed in
/// `skipped_levels`.
HqpSolution solve_cascade(const Hierarchy& h, double tolerance = kDefaultQpTolerance,
                          int max_iter = kDefaultQpMaxIter);

/// Classical recursive null-space projection over equality tasks (J_i, b_i).
VectorX nullspace_reference(const std::vector<std::pair<MatrixX, VectorX>>& levels);

/// Moore-Penrose pseudoinverse by SVD with an absolute singular-value cut.
MatrixX pseudo_inverse(const MatrixX& m, double threshold = 1e-8);

/// Residual of a level at qdot: the w that makes lo <= J qdot + w <= hi with
/// the smallest magnitude per row (zero inside the band).
VectorX level_residual(const std::vector<TaskConstraint>& level, const VectorX& qdot);

}  // namespace agrihqp
