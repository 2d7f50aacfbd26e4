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
from functools import reduce
from typing import List

import numpy as np
from scipy.special import rel_entr

from entroscope.checks.check_base import (
    CheckConfig,
    CheckReport,
    PropositionCheck,
    TrialOutcome,
    choose,
)
from entroscope.entropies.von_neumann import LN2, binary_entropy, h_cond_vn, kl_div
from entroscope.states.quantum_state import QState, SystemLayout
from entroscope.utils.state_utils import tensor_power

MAX_COPIES = 8
QUANTUM_MAX_COPIES = 3
TREND_EPSILON = 0.5

# Fixed instances of the trend relations
CLASSICAL_RHO = (0.7, 0.3)
CLASSICAL_SIGMA = (0.5, 0.5)
CORRELATED_JOINT = (0.4, 0.1, 0.1, 0.4)
QUANTUM_ANGLE = 0.3
QUANTUM_SIGMA = (0.55, 0.45)
# Smallest decrease of the gap from n = 1 to n_max that counts as shrinking
TREND_STEP = 1e-9


def classical_power(p, n: int) -> np.ndarray:
    return reduce(np.kron, [np.asarray(p, dtype=np.float64)] * n)


def classical_relative_entropy(p, q) -> float:
    """sum_x p(x) log2(p(x) / q(x)) for nonnegative vectors, q need not be normalized."""
    return float(np.sum(rel_entr(np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64))) / LN2)


def weak_converse_bound(relative_entropy: float, epsilon: float, n: int, trace_sigma: float = 1.0) -> float:
    """
    Upper bound on (1/n) D_H^eps(rho^n || sigma^n) from data processing of the
    relative entropy under the optimal test,

        (D + (1 - eps) log2 tr(sigma)) / eps + (h2(eps) / eps + log2 eps) / n
    """
    per_copy = (relative_entropy + (1.0 - epsilon) * math.log2(trace_sigma)) / epsilon
    return per_copy + (binary_entropy(epsilon) / epsilon + math.log2(epsilon)) / n


def record_shrinking(outcome: TrialOutcome, relation: str, gaps: List[float], tolerance: float):
    """
    Strict gaps[-1] < gaps[0]. The margin is gaps[0] - gaps[-1] - step - tolerance
    with step = max(tolerance, TREND_STEP), so equal gaps are a violation.
    """
    step = max(tolerance, TREND_STEP)
    outcome.record(relation, gaps[-1] + step + tolerance, gaps[0])


def rotated_state(probabilities, angle: float) -> QState:
    c, s = math.cos(angle), math.sin(angle)
    rotation = np.array([[c, -s], [s, c]])
    return QState(rotation @ np.diag(probabilities) @ rotation.T)


class AepCheck(PropositionCheck):
    """
    Convergence of (1/n) D_H^eps(rho^n || sigma^n) to the relative entropy.

    Random trials draw classical pairs and assert the finite weak converse
    for every n up to ``n_max``, once for a pair of distributions and once
    for a joint distribution against I_A (x) p_B. The shrinking of the gap
    |(1/n) D_H^eps - D| from n = 1 to n = n_max is asserted on fixed
    instances, where it is known to hold.
    """

    check_name = "aep"

    def __init__(self, n_max: int = MAX_COPIES, quantum_n_max: int = QUANTUM_MAX_COPIES, **kwargs):
        super().__init__(**kwargs)
        if not 1 <= n_max <= MAX_COPIES:
            raise ValueError(f"n_max must lie in [1, {MAX_COPIES}], got {n_max}")
        if quantum_n_max < 1:
            raise ValueError(f"quantum_n_max must be positive, got {quantum_n_max}")
        self.n_max = n_max
        self.quantum_n_max = min(quantum_n_max, n_max)

    def rates(self, p, q, epsilon: float, n_max: int) -> List[float]:
        return [self.dh_classical(classical_power(p, n), classical_power(q, n), epsilon).value / n
                for n in range(1, n_max + 1)]

    def record_converse(self, outcome: TrialOutcome, relation: str, p, q, epsilon: float) -> List[float]:
        p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
        relative_entropy = classical_relative_entropy(p, q)
        rates = self.rates(p, q, epsilon, self.n_max)
        for n, rate in enumerate(rates, start=1):
            outcome.record(relation, rate, weak_converse_bound(relative_entropy, epsilon, n, q.sum()))
        return rates

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        d = int(choose(rng, cfg.dims))
        epsilon = float(choose(rng, cfg.epsilons))
        p = rng.dirichlet(np.ones(d))
        q = rng.dirichlet(np.ones(d))
        outcome.attach(epsilon=epsilon, p=p.tolist(), q=q.tolist())
        self.record_converse(outcome, "weak_converse", p, q, epsilon)

        d_a, d_b = int(choose(rng, cfg.dims)), int(choose(rng, cfg.dims))
        joint = rng.dirichlet(np.ones(d_a * d_b))
        conditioning = np.kron(np.ones(d_a), joint.reshape(d_a, d_b).sum(axis=0))
        outcome.attach(joint=joint.tolist(), joint_dims=[d_a, d_b])
        self.record_converse(outcome, "conditional_weak_converse", joint, conditioning, epsilon)

    def run_anchors(self, cfg: CheckConfig) -> List[TrialOutcome]:
        return [
            self.run_anchor("classical_trend", self._classical_trend, cfg.tolerance),
            self.run_anchor("identical_states", self._identical_states),
            self.run_anchor("quantum_trend", self._quantum_trend, cfg.tolerance),
            self.run_anchor("conditional_trend", self._conditional_trend, cfg.tolerance),
        ]

    def _classical_trend(self, outcome: TrialOutcome, tolerance: float):
        relative_entropy = classical_relative_entropy(CLASSICAL_RHO, CLASSICAL_SIGMA)
        rates = self.record_converse(outcome, "weak_converse", CLASSICAL_RHO, CLASSICAL_SIGMA, TREND_EPSILON)
        gaps = [abs(rate - relative_entropy) for rate in rates]
        outcome.attach(gaps=gaps)
        record_shrinking(outcome, "gap_trend", gaps, tolerance)

    def _identical_states(self, outcome: TrialOutcome):
        for rate in self.rates(CLASSICAL_RHO, CLASSICAL_RHO, TREND_EPSILON, self.n_max):
            outcome.record_equal("identical_states", rate, 0.0)

    def _quantum_trend(self, outcome: TrialOutcome, tolerance: float):
        rho = rotated_state(CLASSICAL_RHO, QUANTUM_ANGLE)
        sigma = QState(np.diag(QUANTUM_SIGMA))
        relative_entropy = kl_div(rho, sigma)
        gaps = []
        for n in range(1, self.quantum_n_max + 1):
            rate = self.dh(tensor_power(rho, n), tensor_power(sigma, n), TREND_EPSILON).value / n
            gaps.append(abs(rate - relative_entropy))
        outcome.attach(gaps=gaps)
        record_shrinking(outcome, "quantum_gap_trend", gaps, tolerance)

    def _conditional_trend(self, outcome: TrialOutcome, tolerance: float):
        joint = np.asarray(CORRELATED_JOINT)
        conditioning = np.kron(np.ones(2), joint.reshape(2, 2).sum(axis=0))
        h_cond = h_cond_vn(QState(np.diag(joint), SystemLayout.from_dims([2, 2])), (["A"], ["B"]))
        rates = self.record_converse(outcome, "conditional_weak_converse", joint, conditioning, TREND_EPSILON)
        gaps = [abs(-rate - h_cond) for rate in rates]
        outcome.attach(gaps=gaps)
        record_shrinking(outcome, "conditional_gap_trend", gaps, tolerance)


def check_aep(
    cfg: CheckConfig,
    n_max: int = MAX_COPIES,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return AepCheck(n_max=n_max, corruption=corruption, logger=logger)(cfg, client=client)
