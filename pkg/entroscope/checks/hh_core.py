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
from entroscope.entropies.min_max import h_min_fixed_ratio
from entroscope.states.quantum_state import QState, SystemLayout
from entroscope.utils.linalg_utils import min_eigenvalue, trace_norm
from entroscope.utils.sampling_utils import (
    random_channel,
    random_cq_state,
    random_state,
    random_unital_channel,
)
from entroscope.utils.state_utils import (
    apply_channel,
    basis_state,
    conditioning_operator,
    maximally_mixed,
    partial_trace,
    tensor_product,
    weyl_heisenberg_twirl,
)

PARTITION = (["A"], ["B"])
LIMIT_EPSILONS = (1e-2, 1e-3, 1e-4)


def deterministic_cq_state(probabilities) -> QState:
    """sum_x p(x) |x><x| (x) |x><x|, a register fully determined by B."""
    d = len(probabilities)
    m = sum(
        p * np.outer(np.kron(basis_state(x, d), basis_state(x, d)), np.kron(basis_state(x, d), basis_state(x, d)))
        for x, p in enumerate(probabilities)
    )
    return QState(m, SystemLayout.from_dims([d, d]))


class HhCoreCheck(PropositionCheck):
    """
    Dimension bounds, nonnegativity on CQ states, data processing under a
    sub-unital channel on A and a channel on B, monotonicity in epsilon and
    the approach of H_H^eps(A|B) to H_min(A|B)_{rho|rho} as epsilon shrinks.
    """

    check_name = "hh_core"

    def __init__(self, limit_epsilons=LIMIT_EPSILONS, **kwargs):
        super().__init__(**kwargs)
        self.limit_epsilons = tuple(sorted(limit_epsilons, reverse=True))

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        d_a, d_b = int(choose(rng, cfg.dims)), int(choose(rng, cfg.dims))
        eps_low, eps_high = sorted((float(choose(rng, cfg.epsilons)), float(choose(rng, cfg.epsilons))))
        rho = random_state([d_a, d_b], random_rank(rng, d_a * d_b), seed=rng)
        outcome.attach(epsilons=[eps_low, eps_high], rho=rho)
        log_a = math.log2(d_a)

        h = self.hh(rho, PARTITION, eps_high).bits
        outcome.record("dimension_lower", -log_a, h)
        outcome.record("dimension_upper", h, log_a)

        h_low = h if eps_low == eps_high else self.hh(rho, PARTITION, eps_low).bits
        outcome.record("epsilon_monotone", h_low, h)
        h_fixed = h_min_fixed_ratio(rho, PARTITION).bits
        outcome.record("fixed_ratio_lower", h_fixed, h_low)

        # |A| I_A (x) rho_B >= rho_AB through the Weyl-Heisenberg twirl
        twirled = weyl_heisenberg_twirl(rho, "A")
        product = tensor_product(maximally_mixed(d_a), partial_trace(rho, ["B"]))
        outcome.record("twirl_residual", trace_norm(twirled.matrix - product.matrix), 0.0)
        outcome.record(
            "dimension_operator", 0.0, min_eigenvalue(d_a * conditioning_operator(rho, PARTITION) - rho.matrix)
        )

        cq = random_cq_state([d_a, d_b], seed=rng)
        h_cq = self.hh(cq, PARTITION, eps_high).bits
        outcome.record("cq_nonnegative", 0.0, h_cq)
        outcome.record("cq_upper", h_cq, log_a)

        d_b_out = int(choose(rng, cfg.dims))
        tau = apply_channel(random_unital_channel(d_a, seed=rng), rho, "A")
        tau = apply_channel(random_channel(d_b, d_b_out, seed=rng), tau, "B")
        outcome.record("data_processing", h, self.hh(tau, PARTITION, eps_high).bits)

        gaps = [abs(self.hh(rho, PARTITION, e).bits - h_fixed) for e in self.limit_epsilons]
        for wider, narrower in zip(gaps, gaps[1:]):
            outcome.record("limit_decreasing", narrower, wider)

    def run_anchors(self, cfg: CheckConfig) -> List[TrialOutcome]:
        return [self.run_anchor("deterministic_register", self._deterministic_register, cfg)]

    def _deterministic_register(self, outcome: TrialOutcome, cfg: CheckConfig):
        rho = deterministic_cq_state([0.3, 0.7])
        for epsilon in cfg.epsilons:
            outcome.record_equal("deterministic_register", self.hh(rho, PARTITION, epsilon).bits, 0.0)


def check_hh_core(
    cfg: CheckConfig,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return HhCoreCheck(corruption=corruption, logger=logger)(cfg, client=client)
