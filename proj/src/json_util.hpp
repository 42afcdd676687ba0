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

// Small helpers shared by the model and scenario readers. Every accessor
// reports the JSON path of the offending value in its ConfigError.

#include <json.hpp>

#include <string>

#include "agrihqp/common.hpp"
#include "agrihqp/model.hpp"

namespace agrihqp::json_util {

using Json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

inline double to_double(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

/// Numbers, null (unbounded) and the strings "inf" / "-inf".
inline double to_bound(const Json& v, double null_value, const std::string& where) {
  if (v.is_null()) return null_value;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    fail(where, "unrecognised bound '" + s + "'");
  }
  return clamp_bound(to_double(v, where));
}

inline std::string to_string(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

inline double get_or(const Json& obj, const char* key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return to_double(*it, where + "." + key);
}

inline Vec3 to_vec3(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected an array of 3 numbers");
  return {to_double(v[0], where + "[0]"), to_double(v[1], where + "[1]"),
          to_double(v[2], where + "[2]")};
}

inline VectorX to_vector(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  VectorX out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = to_double(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

inline VectorX to_bounds(const Json& v, double null_value, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  VectorX out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] =
        to_bound(v[i], null_value, where + "[" + std::to_string(i) + "]");
  return out;
}

/// Quaternion given as [w, x, y, z]; must be unit within 1e-6 and is
/// renormalised afterwards.
inline Quat to_quat_wxyz(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) fail(where, "expected [w, x, y, z]");
  Quat q(to_double(v[0], where), to_double(v[1], where), to_double(v[2], where),
         to_double(v[3], where));
  if (std::abs(q.norm() - 1.0) > 1e-6) fail(where, "quaternion is not unit-norm");
  q.normalize();
  return q;
}

/// {"p": [x,y,z], "q_wxyz": [w,x,y,z]} (orientation optional, identity).
inline Pose to_pose(const Json& v, const std::string& where) {
  Pose pose;
  pose.p = to_vec3(require(v, "p", where), where + ".p");
  if (auto it = v.find("q_wxyz"); it != v.end()) pose.o = to_quat_wxyz(*it, where + ".q_wxyz");
  return pose;
}

}  // namespace agrihqp::json_util
