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

#include <string>
#include <vector>

#include "agrihqp/common.hpp"

namespace agrihqp {

/// minimize 1/2 z'Hz + g'z  subject to  lo <= A z <= hi (row-wise).
/// Rows with lo == hi are equalities; +/-kInfinity marks a missing side.
struct QpProblem {
  MatrixX H;
  VectorX g;
  MatrixX A;  // rows x size
  VectorX lo, hi;

  QpProblem() = default;
  QpProblem(MatrixX h, VectorX g_) : H(std::move(h)), g(std::move(g_)), A(0, H.cols()) {}

  int size() const { return static_cast<int>(H.cols()); }
  int rows() const { return static_cast<int>(A.rows()); }

  /// Appends one row; slow for large problems, intended for tests and tools.
  void add_row(const VectorX& a, double lower, double upper);

  /// Throws std::invalid_argument when shapes disagree or lo > hi.
  void check() const;
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations };

std::string to_string(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;

  double max() const { return std::max({stationarity, primal, complementarity}); }
};

struct QpSolution {
  VectorX z;
  QpStatus status = QpStatus::kOptimal;
  /// Row indices at a bound, ascending.
  std::vector<int> active_set;
  /// One multiplier per row: H z + g = A' lambda. Positive when the lower
  /// side is active, negative for the upper side.
  VectorX lambda;
  KktResiduals kkt;
  int iterations = 0;
};

inline constexpr double kDefaultQpTolerance = 1e-9;
inline constexpr int kDefaultQpMaxIter = 1000;

/// Dual active-set (Goldfarb-Idnani) solve. Deterministic: among equally
/// violated constraints the lowest row index enters first.
QpSolution solve(const QpProblem& problem, double tolerance = kDefaultQpTolerance,
                 int max_iter = kDefaultQpMaxIter);

/// Scaled KKT residuals of `solution` for `problem`:
///  - stationarity: |Hz + g - A'lambda|_inf / max(1, |Hz|_inf, |g|_inf)
///  - primal: worst bound violation of a row divided by max(1, |a_r|_inf)
///  - complementarity: worst |lambda_r| times the slack on the side lambda_r
///    selects; a multiplier pointing at a missing side counts in full.
/// Throws std::invalid_argument on dimension mismatch.
KktResiduals verify_kkt(const QpProblem& problem, const QpSolution& solution);

/// Cost 1/2 z'Hz + g'z.
double objective(const QpProblem& problem, const VectorX& z);

}  // namespace agrihqp
