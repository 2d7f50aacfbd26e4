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

import numpy as np

from entroscope.checks.check_base import (
    CheckConfig,
    CheckReport,
    PropositionCheck,
    TrialOutcome,
    choose,
    random_rank,
)
from entroscope.states.quantum_state import HermitianOperator, QState
from entroscope.utils.distance_utils import generalized_trace_distance, purified_distance
from entroscope.utils.linalg_utils import as_matrix, fn_on_support, hermitian_part, positive_part, psd_sqrt
from entroscope.utils.sampling_utils import random_state, random_unitary
from entroscope.utils.state_utils import purification_vector

# Range of the trace of sampled subnormalized states
MIN_TRACE = 0.3
# Range of the scale c of sigma = c * state in the contraction lemma
SIGMA_SCALE = (0.5, 1.5)
# Largest weight of the extra slack mixed into Delta
MAX_SLACK_WEIGHT = 0.2

ANCHOR_STATE = (0.7, 0.3)


def scaled_state(rho: QState, scale: float) -> QState:
    return QState(HermitianOperator(scale * rho.matrix, validate=False), rho.layout)


def random_subnormalized(rng: np.random.Generator, d: int) -> QState:
    rho = random_state(d, random_rank(rng, d), seed=rng)
    return scaled_state(rho, float(rng.uniform(MIN_TRACE, 1.0)))


def random_effect(rng: np.random.Generator, d: int) -> np.ndarray:
    """0 <= Pi <= I with uniform eigenvalues in a random basis."""
    u = random_unitary(d, rng)
    return hermitian_part((u * rng.uniform(0.0, 1.0, size=d)) @ u.conj().T)


def mix_towards(rho: QState, target: QState, delta: float) -> QState:
    """rho + t (target - rho) with t chosen so the generalized trace distance is at most delta."""
    distance = generalized_trace_distance(rho, target)
    t = 1.0 if distance <= delta else delta / distance
    m = (1.0 - t) * rho.matrix + t * target.matrix
    return QState(HermitianOperator(hermitian_part(m), validate=False), rho.layout)


def effect_distance_bound(rho, effect: np.ndarray) -> float:
    """(1 / sqrt(tr rho)) sqrt((tr rho)^2 - (tr Pi^2 rho)^2)."""
    r = as_matrix(rho)
    trace = float(np.real(np.trace(r)))
    squared = float(np.real(np.trace(effect @ effect @ r)))
    return math.sqrt(max(trace ** 2 - squared ** 2, 0.0)) / math.sqrt(trace)


def contraction(sigma, delta) -> np.ndarray:
    """G = sigma^{1/2} (sigma + Delta)^{-1/2}, the inverse taken on the support."""
    s, d = as_matrix(sigma), as_matrix(delta)
    inverse_root = as_matrix(fn_on_support(hermitian_part(s + d), lambda v: v ** -0.5))
    return psd_sqrt(s) @ inverse_root


def contracted_purification_distance(rho, g: np.ndarray) -> float:
    """P(psi, (G (x) I) psi (G (x) I)^dag) for the canonical purification psi of rho."""
    n = g.shape[0]
    psi = purification_vector(rho)
    k = psi.shape[0] // n
    contracted = np.kron(g, np.eye(k)) @ psi
    return purified_distance(np.outer(psi, psi.conj()), np.outer(contracted, contracted.conj()))


class AppendixLemmasCheck(PropositionCheck):
    """
    The supporting lemmas on distances and smoothing:

    - the SDP max over 0 <= P <= I of tr[P (rho - sigma)] equals the
      generalized trace distance, and D <= P <= sqrt(2 D);
    - D_H^{eps + delta}(rho || sigma) + log2(eps / (eps + delta)) <= D_H^eps(rho~ || sigma)
      whenever D(rho, rho~) <= delta;
    - P(rho, Pi rho Pi) <= sqrt((tr rho)^2 - (tr Pi^2 rho)^2) / sqrt(tr rho) for 0 <= Pi <= I;
    - P(psi, (G (x) I) psi (G (x) I)^dag) <= sqrt(tr Delta (2 - tr Delta)) whenever
      rho <= sigma + Delta and tr Delta <= 1.
    """

    check_name = "appendix_lemmas"

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        d = int(choose(rng, cfg.dims))
        rho = random_subnormalized(rng, d)
        sigma = random_subnormalized(rng, d)
        outcome.attach(rho=rho, sigma=sigma)
        self.record_distances(outcome, rho, sigma)

        epsilon = float(choose(rng, cfg.epsilons))
        delta = float(rng.uniform(0.0, 1.0 - epsilon))
        normalized = random_state(d, random_rank(rng, d), seed=rng)
        full_rank = random_state(d, seed=rng)
        target = random_state(d, random_rank(rng, d), seed=rng)
        outcome.attach(epsilon=epsilon, delta=delta, smoothing_sigma=full_rank)
        self.record_smoothing(outcome, normalized, full_rank, target, epsilon, delta)

        effect = random_effect(rng, d)
        self.record_effect(outcome, rho, effect)

        scale = float(rng.uniform(*SIGMA_SCALE))
        sigma_c = scale * random_state(d, seed=rng).matrix
        slack = float(rng.uniform(0.0, MAX_SLACK_WEIGHT)) * random_state(d, seed=rng).matrix
        outcome.attach(sigma_scale=scale)
        self.record_contraction(outcome, normalized, sigma_c, slack)

    def record_distances(self, outcome: TrialOutcome, rho, sigma):
        distance = generalized_trace_distance(rho, sigma)
        outcome.record_equal("trace_distance_sdp", self.trace_distance(rho, sigma), distance)
        purified = purified_distance(rho, sigma)
        outcome.record("purified_lower", distance, purified)
        outcome.record("purified_upper", purified, math.sqrt(2.0 * distance))

    def record_smoothing(self, outcome: TrialOutcome, rho: QState, sigma, target: QState, epsilon: float, delta: float):
        if delta <= 0.0:
            outcome.skip("smoothing")
            return
        nearby = mix_towards(rho, target, delta)
        if nearby.trace < epsilon:
            outcome.skip("smoothing")
            return
        left = self.dh(rho, sigma, epsilon + delta).value + math.log2(epsilon / (epsilon + delta))
        outcome.record("smoothing", left, self.dh(nearby, sigma, epsilon).value)

    def record_effect(self, outcome: TrialOutcome, rho, effect: np.ndarray):
        r = as_matrix(rho)
        squeezed = hermitian_part(effect @ r @ effect)
        outcome.record("effect_distance", purified_distance(r, squeezed), effect_distance_bound(r, effect))

    def record_contraction(self, outcome: TrialOutcome, rho: QState, sigma: np.ndarray, slack: np.ndarray):
        delta = as_matrix(positive_part(hermitian_part(rho.matrix - sigma))) + slack
        trace_delta = float(np.real(np.trace(delta)))
        if trace_delta > 1.0:
            outcome.skip("contraction")
            return
        g = contraction(sigma, delta)
        outcome.record(
            "contraction",
            contracted_purification_distance(rho, g),
            math.sqrt(trace_delta * (2.0 - trace_delta)),
        )

    def run_anchors(self, cfg: CheckConfig):
        return [
            self.run_anchor("identity_effect", self._identity_effect),
            self.run_anchor("dominated_state", self._dominated_state),
        ]

    def _identity_effect(self, outcome: TrialOutcome):
        rho = scaled_state(QState(np.diag(ANCHOR_STATE)), 0.5)
        self.record_effect(outcome, rho, np.eye(2))
        outcome.record("identity_effect", effect_distance_bound(rho, np.eye(2)), 0.0)

    def _dominated_state(self, outcome: TrialOutcome):
        # rho <= sigma needs no slack, so G is the identity on supp(sigma)
        rho = QState(np.diag(ANCHOR_STATE))
        self.record_contraction(outcome, rho, rho.matrix, np.zeros((2, 2)))
        outcome.record_equal("dominated_state", self.trace_distance(rho, rho), 0.0)


def check_appendix_lemmas(
    cfg: CheckConfig,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return AppendixLemmasCheck(corruption=corruption, logger=logger)(cfg, client=client)
