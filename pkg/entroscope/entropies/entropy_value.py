# Copyright (c) 2024, The entroscope authors.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from entroscope.sdp.problem import SdpSolution


def bits_to_json(value: float):
    """Infinite values are written as the strings "inf" and "-inf"."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def solution_summary(solution: Optional[SdpSolution]) -> Optional[dict]:
    if solution is None:
        return None
    return {
        "status": solution.status,
        "iterations": solution.iterations,
        "alpha": solution.alpha,
        "beta": solution.beta,
        "gap": solution.gap,
        "primal_infeasibility": solution.primal_infeasibility,
        "dual_infeasibility": solution.dual_infeasibility,
    }


@dataclass
class EntropyValue:
    """
    An entropy in bits. ``bits`` may be +inf or -inf, never a large
    finite stand-in. Values without a unit, such as fidelities, carry
    ``unit=None`` and serialize under "value" instead of "value_bits".
    """

    bits: float
    witness: Optional[Any] = None
    info: Dict[str, Any] = field(default_factory=dict)
    unit: Optional[str] = "bits"

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.bits)

    def __float__(self):
        return float(self.bits)

    def __neg__(self) -> "EntropyValue":
        return EntropyValue(-self.bits, self.witness, dict(self.info), self.unit)

    def to_dict(self) -> dict:
        key = "value_bits" if self.unit == "bits" else "value"
        record = {key: bits_to_json(self.bits)}
        if isinstance(self.witness, HypoTestResult):
            record["witness"] = self.witness.to_dict()
        elif isinstance(self.witness, SdpSolution):
            record["solver"] = solution_summary(self.witness)
        for key, value in self.info.items():
            if isinstance(value, (int, float, str, bool)):
                record[key] = bits_to_json(value) if isinstance(value, float) else value
        return record


@dataclass
class HypoTestResult:
    """
    D_H^epsilon with its optimal test and dual certificate.

    ``Q`` and ``X`` are dense operators, or their diagonals for results of
    the commuting (classical) solver. ``slackness`` holds the residuals of
    (sigma + X - mu rho) Q = 0, tr[Q rho] = epsilon, (I - Q) X = 0 and
    [Q, X] = 0.
    """

    value: float
    epsilon: float
    Q: np.ndarray
    mu: float
    X: np.ndarray
    primal_value: float
    dual_value: float
    slackness: Dict[str, float] = field(default_factory=dict)
    solution: Optional[SdpSolution] = None

    @property
    def bits(self) -> float:
        return self.value

    @property
    def classical(self) -> bool:
        return np.ndim(self.Q) == 1

    def Q_operator(self) -> np.ndarray:
        return np.diag(self.Q) if self.classical else self.Q

    def X_operator(self) -> np.ndarray:
        return np.diag(self.X) if self.classical else self.X

    @property
    def max_slackness(self) -> float:
        return max(self.slackness.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "mu": self.mu,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "trace_X": float(np.real(np.sum(self.X) if self.classical else np.trace(self.X))),
            "slackness": dict(self.slackness),
            "solver": solution_summary(self.solution),
        }
