# SPDX-License-Identifier: Apache-2.0
"""Seeded THz UAV mesh simulator with a GNN-aided resource-allocation agent.

Thin re-export of the compiled extension; see the README for the C++ API.
"""

from thzmesh._core import (
    ActionValues,
    Environment,
    Observation,
    RunResult,
    ScenarioConfig,
    StepMetrics,
    StepOutcome,
    baseline,
    default_config,
    evaluate,
    link_rate,
    load_config,
    noise_power,
    path_gain,
    steering_vector,
    train,
    uniform_action,
)

__all__ = [
    "ActionValues",
    "Environment",
    "Observation",
    "RunResult",
    "ScenarioConfig",
    "StepMetrics",
    "StepOutcome",
    "baseline",
    "default_config",
    "evaluate",
    "link_rate",
    "noise_power",
    "path_gain",
    "steering_vector",
    "train",
    "uniform_action",
    "load_config",
]
