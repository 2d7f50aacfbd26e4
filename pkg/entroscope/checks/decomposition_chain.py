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
from typing import List

import numpy as np

from entroscope.checks.check_base import (
    CheckConfig,
    CheckReport,
    PropositionCheck,
    TrialOutcome,
    choose,
    random_rank,
)
from entroscope.states.quantum_state import HermitianOperator, QState, SystemLayout
from entroscope.utils.distance_utils import purified_distance
from entroscope.utils.linalg_utils import as_matrix, fn_on_support, hermitian_part, psd_sqrt
from entroscope.utils.sampling_utils import random_state
from entroscope.utils.state_utils import (
    maximally_mixed,
    partial_trace,
    tensor_product,
    weyl_heisenberg_twirl,
)

ANCHOR_EPSILON = 0.04
PRODUCT_MARGINAL = (0.7, 0.3)


def decomposition_overhead(epsilon: float, epsilon_prime: float) -> float:
    return math.log2((epsilon + math.sqrt(2.0 * epsilon_prime)) / epsilon)


def admissible_epsilon_prime(rng: np.random.Generator, epsilon: float, epsilons) -> float:
    """
    An eps' from ``epsilons`` with eps + sqrt(8 eps') <= 1, or (1 - eps)^2 / 32
    when none qualifies, so the smoothed epsilons of both relations stay at most 1.
    """
    admissible = [e for e in epsilons if epsilon + math.sqrt(8.0 * e) <= 1.0]
    if not admissible:
        return (1.0 - epsilon) ** 2 / 32.0
    return float(choose(rng, admissible))


def invariant_reference(d_a: int, sigma_b: QState) -> np.ndarray:
    """pi_A (x) sigma_B, invariant under the Weyl-Heisenberg group on A."""
    return as_matrix(tensor_product(maximally_mixed(d_a), sigma_b))


class DecompositionChainCheck(PropositionCheck):
    """
    Decomposition of a hypothesis test against a group invariant sigma,

        D_H^{eps + sqrt(2 eps')}(rho || sigma)
            <= D_H^eps(rho || xi) + D_H^{eps'}(xi || sigma) + log2((eps + sqrt(2 eps')) / eps)

    with xi the Weyl-Heisenberg twirl of rho on A and sigma = pi_A (x) sigma_B,
    and the chain rule

        H_H^{eps + sqrt(8 eps')}(AB|C) >= H_H^eps(A|BC) + H_H^{eps'}(B|C) - log2((eps + sqrt(2 eps')) / eps)

    on tripartite states of the smallest configured dimension. eps' is drawn
    so that both smoothed epsilons stay at most 1.
    """

    check_name = "decomposition_chain"

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        epsilon = float(choose(rng, cfg.epsilons))
        epsilon_prime = admissible_epsilon_prime(rng, epsilon, cfg.epsilons)
        d_a, d_b = int(choose(rng, cfg.dims)), int(choose(rng, cfg.dims))
        rho = random_state([d_a, d_b], random_rank(rng, d_a * d_b), seed=rng)
        sigma_b = random_state(d_b, seed=rng)
        d = min(cfg.dims)
        rho_abc = random_state([d, d, d], random_rank(rng, d ** 3), seed=rng)
        outcome.attach(epsilon=epsilon, epsilon_prime=epsilon_prime, rho=rho, sigma_b=sigma_b, rho_abc=rho_abc)

        self.record_decomposition(outcome, rho, invariant_reference(d_a, sigma_b), epsilon, epsilon_prime)
        self.record_chain_rule(outcome, rho_abc, epsilon, epsilon_prime)

    def record_decomposition(self, outcome: TrialOutcome, rho: QState, sigma, epsilon: float, epsilon_prime: float):
        outer = epsilon + math.sqrt(2.0 * epsilon_prime)
        if outer > 1.0:
            outcome.skip("decomposition")
            return
        xi = weyl_heisenberg_twirl(rho, "A")
        left = self.dh(rho, sigma, outer).value
        first = self.dh(rho, xi, epsilon)
        second = self.dh(xi, sigma, epsilon_prime)
        overhead = decomposition_overhead(epsilon, epsilon_prime)
        outcome.record("decomposition", left, first.value + second.value + overhead)

        # T = sigma^{1/2} (sigma + X_2)^{-1/2} with X_2 twirled, so T commutes with the group
        x_2 = weyl_heisenberg_twirl(second.X_operator(), "A", rho.layout)
        s = as_matrix(sigma)
        t = psd_sqrt(s) @ as_matrix(fn_on_support(hermitian_part(s + x_2), lambda v: v ** -0.5))
        contracted = hermitian_part(t @ rho.matrix @ t.conj().T)
        contracted = QState(HermitianOperator(contracted, validate=False), rho.layout)
        outcome.record("contraction_distance", purified_distance(rho, contracted), math.sqrt(2.0 * epsilon_prime))
        if contracted.trace < epsilon:
            outcome.skip("half_chain")
        else:
            outcome.record("half_chain", self.dh(contracted, sigma, epsilon).value, first.value + second.value)

    def record_chain_rule(self, outcome: TrialOutcome, rho_abc: QState, epsilon: float, epsilon_prime: float):
        outer = epsilon + math.sqrt(2.0 * epsilon_prime)
        wide = epsilon + math.sqrt(8.0 * epsilon_prime)
        if outer > 1.0:
            outcome.skip("chain_rule")
            return
        labels = rho_abc.layout.labels
        a, b, c = labels[0], labels[1], labels[2]
        right = (
            self.hh(rho_abc, ([a], [b, c]), epsilon).bits
            + self.hh(partial_trace(rho_abc, [b, c]), ([b], [c]), epsilon_prime).bits
            - decomposition_overhead(epsilon, epsilon_prime)
        )
        outcome.record("chain_rule_tight", right, self.hh(rho_abc, ([a, b], [c]), outer).bits)
        if wide > 1.0:
            outcome.skip("chain_rule")
            return
        outcome.record("chain_rule", right, self.hh(rho_abc, ([a, b], [c]), wide).bits)

    def run_anchors(self, cfg: CheckConfig) -> List[TrialOutcome]:
        return [
            self.run_anchor("product_state", self._product_state),
            self.run_anchor("invariant_state", self._invariant_state),
        ]

    def _product_state(self, outcome: TrialOutcome):
        # pi_A (x) pi_B (x) rho_C has H_H^eps(AB|C) = log2(d_A d_B) at every eps
        rho_c = QState(np.diag(PRODUCT_MARGINAL))
        pi = maximally_mixed(SystemLayout.from_dims([2, 2]))
        rho = tensor_product(pi, rho_c).with_layout(SystemLayout.from_dims([2, 2, 2]))
        for epsilon in (ANCHOR_EPSILON, ANCHOR_EPSILON + math.sqrt(8.0 * ANCHOR_EPSILON)):
            outcome.record_equal("product_state_entropy", self.hh(rho, (["A", "B"], ["C"]), epsilon).bits, 2.0)
        self.record_chain_rule(outcome, rho, ANCHOR_EPSILON, ANCHOR_EPSILON)

    def _invariant_state(self, outcome: TrialOutcome):
        # rho = pi_A (x) rho_B is its own twirl, so D_H^eps(rho || xi) = 0
        rho_b = QState(np.diag(PRODUCT_MARGINAL))
        rho = tensor_product(maximally_mixed(2), rho_b).with_layout(SystemLayout.from_dims([2, 2]))
        xi = weyl_heisenberg_twirl(rho, "A")
        outcome.record_equal("invariant_state", self.dh(rho, xi, ANCHOR_EPSILON).value, 0.0)
        sigma = invariant_reference(2, QState(np.eye(2) / 2))
        self.record_decomposition(outcome, rho, sigma, ANCHOR_EPSILON, ANCHOR_EPSILON)


def check_decomposition_chain(
    cfg: CheckConfig,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return DecompositionChainCheck(corruption=corruption, logger=logger)(cfg, client=client)
