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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace agrihqp {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;

// Unbounded sides of a constraint row are stored as +/- kInfinity. Any bound
// with magnitude >= kUnboundedThreshold is treated as absent.
inline constexpr double kInfinity = 1e12;
inline constexpr double kUnboundedThreshold = 1e11;

inline bool is_unbounded_below(double lo) { return lo <= -kUnboundedThreshold; }
inline bool is_unbounded_above(double hi) { return hi >= kUnboundedThreshold; }

// Clamps +/-inf (and anything past the sentinel) onto the sentinel values.
inline double clamp_bound(double b) {
  if (b >= kUnboundedThreshold) return kInfinity;
  if (b <= -kUnboundedThreshold) return -kInfinity;
  return b;
}

/// Malformed or inconsistent input files (model or scenario).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model invariant violations and unknown frame lookups.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agrihqp
