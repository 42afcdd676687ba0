# Copyright 2026 The agrihqp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Hierarchical QP controller and kinematic simulator for a dual-arm harvester."""

from ._core import (
    ConfigError,
    ModelError,
    RobotModel,
    load_model,
    nullspace_reference,
    parse_model,
    plan_profile,
    run_scenario,
    scenario_csv,
    solve_hierarchy,
    solve_qp,
    validate_scenario,
)

__all__ = [
    "ConfigError",
    "ModelError",
    "RobotModel",
    "load_model",
    "nullspace_reference",
    "parse_model",
    "plan_profile",
    "run_scenario",
    "scenario_csv",
    "solve_hierarchy",
    "solve_qp",
    "validate_scenario",
]
