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
from entroscope.entropies.min_max import (
    d_max,
    d_max_smooth,
    d_min,
    dmax_smoothing_witness,
    dmin_smoothing_witness,
    h_max,
    h_min,
    h_min_fixed_ratio,
)
from entroscope.states.quantum_state import QState
from entroscope.utils.distance_utils import purified_distance
from entroscope.utils.sampling_utils import random_state
from entroscope.utils.state_utils import bell_state

PARTITION = (["A"], ["B"])
BELL_EPSILON = 0.1
EQUAL_STATE = (0.7, 0.3)


class SmoothRelationsCheck(PropositionCheck):
    """
    Sandwiches of D_H^eps between max- and min-relative entropies and their
    smoothed versions, with both smoothing witnesses built from the optimal
    test and dual certificate, plus the conditional forms

        H_min^{sqrt(2 eps)}(A|B) >= H_H^eps(A|B) >= H_min(A|B)_{rho|rho}
        H_max(A|B) + log2(1 / eps^2) >= H_H^{1 - eps}(A|B)

    Conditional relations use the smallest configured dimension on A and B.
    """

    check_name = "smooth_relations"

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        d = int(choose(rng, cfg.dims))
        epsilon = float(choose(rng, cfg.epsilons))
        rho = random_state(d, random_rank(rng, d), seed=rng)
        sigma = random_state(d, seed=rng)
        d_small = min(cfg.dims)
        rho_ab = random_state([d_small, d_small], random_rank(rng, d_small ** 2), seed=rng)
        outcome.attach(epsilon=epsilon, rho=rho, sigma=sigma, rho_ab=rho_ab)

        self.record_relative(outcome, rho, sigma, epsilon)
        self.record_conditional(outcome, rho_ab, epsilon)

    def record_relative(self, outcome: TrialOutcome, rho, sigma, epsilon: float):
        radius = math.sqrt(2.0 * epsilon)
        result = self.dh(rho, sigma, epsilon)
        dh = result.value
        outcome.record("dmax_upper", dh, d_max(rho, sigma).bits)

        smoothed = dmax_smoothing_witness(rho, sigma, epsilon, result=result)
        outcome.record("dmax_witness_distance", purified_distance(rho, smoothed), radius)
        outcome.record("dmax_witness_bound", d_max(smoothed, sigma).bits, dh)
        if radius < 1.0:
            outcome.record("smooth_dmax_lower", d_max_smooth(rho, sigma, radius, self.solver).bits, dh)
        else:
            outcome.skip("smooth_dmax_lower")

        complement = self.dh(rho, sigma, 1.0 - epsilon)
        outcome.record("dmin_lower", d_min(rho, sigma).bits - math.log2(1.0 / epsilon ** 2), complement.value)
        smoothed = dmin_smoothing_witness(rho, sigma, epsilon, result=complement)
        outcome.record("dmin_witness_distance", purified_distance(rho, smoothed), radius)
        outcome.record(
            "dmin_witness_bound",
            complement.value,
            d_min(smoothed, sigma).bits - math.log2(1.0 / (1.0 - epsilon)),
        )

    def record_conditional(self, outcome: TrialOutcome, rho_ab: QState, epsilon: float):
        radius = math.sqrt(2.0 * epsilon)
        hh = self.hh(rho_ab, PARTITION, epsilon).bits
        outcome.record("fixed_ratio_lower", h_min_fixed_ratio(rho_ab, PARTITION).bits, hh)
        if radius < 1.0:
            smooth = h_min(rho_ab, PARTITION, epsilon=radius, solver=self.solver).bits
            outcome.record("smooth_hmin_upper", hh, smooth)
        else:
            outcome.skip("smooth_hmin_upper")

        complement = self.hh(rho_ab, PARTITION, 1.0 - epsilon).bits
        h_max_value = h_max(rho_ab, PARTITION, solver=self.solver).bits
        outcome.record("hmax_upper", complement, h_max_value + math.log2(1.0 / epsilon ** 2))

    def run_anchors(self, cfg: CheckConfig) -> List[TrialOutcome]:
        return [
            self.run_anchor("equal_states", self._equal_states, cfg),
            self.run_anchor("bell_state", self._bell_state),
        ]

    def _equal_states(self, outcome: TrialOutcome, cfg: CheckConfig):
        rho = QState(np.diag(EQUAL_STATE))
        for epsilon in cfg.epsilons:
            self.record_relative(outcome, rho, rho, epsilon)

    def _bell_state(self, outcome: TrialOutcome):
        # For |Phi> the optimal test is eps |Phi><Phi| at every eps, so H_H^eps(A|B) = -1
        rho = bell_state()
        outcome.record_equal("bell_fixed_ratio", h_min_fixed_ratio(rho, PARTITION).bits, -1.0)
        outcome.record_equal("bell_hypothesis_entropy", self.hh(rho, PARTITION, BELL_EPSILON).bits, -1.0)
        self.record_conditional(outcome, rho, BELL_EPSILON)


def check_smooth_relations(
    cfg: CheckConfig,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return SmoothRelationsCheck(corruption=corruption, logger=logger)(cfg, client=client)
