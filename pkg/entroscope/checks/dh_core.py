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
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from entroscope.checks.check_base import (
    CheckConfig,
    CheckReport,
    PropositionCheck,
    TrialOutcome,
    choose,
    random_rank,
)
from entroscope.states.quantum_state import HermitianOperator, QState
from entroscope.utils.distance_utils import generalized_trace_distance
from entroscope.utils.linalg_utils import (
    SUPPORT_CUTOFF,
    as_matrix,
    hermitian_part,
    positive_part_projector,
)
from entroscope.utils.sampling_utils import random_state, sample_instance

# Slack below which epsilon - delta counts as zero in the trace distance bounds
BOUND_ATOL = 1e-9


def trace_distance_upper_bound(outcome: TrialOutcome, epsilon: float, dh: float, delta: float):
    """D_H^eps <= log(eps / (eps - delta)), infinite once delta reaches eps."""
    upper = math.inf if epsilon - delta <= BOUND_ATOL else math.log2(epsilon / (epsilon - delta))
    outcome.record("trace_distance_upper", dh, upper)


def trace_distance_bounds(
    outcome: TrialOutcome, rho, sigma, epsilon: float, dh: float, delta: Optional[float] = None
):
    """
    log(eps / (eps - (1 - eps) delta)) <= D_H^eps <= log(eps / (eps - delta)) and
    the Pinsker-like (1 - eps) delta / eps <= D_H^eps for normalized states.

    The lower bound is only claimed when p = tr({rho > sigma} rho) <= eps.
    For p > eps it fails, e.g. on rho = diag(0.99, 0.01), sigma = diag(0.9, 0.1)
    and eps = 0.1, so such pairs count as skipped.
    """
    if delta is None:
        delta = generalized_trace_distance(rho, sigma)
    trace_distance_upper_bound(outcome, epsilon, dh, delta)

    r = as_matrix(rho)
    p = float(np.real(np.trace(as_matrix(positive_part_projector(r - as_matrix(sigma))) @ r)))
    slack = epsilon - (1.0 - epsilon) * delta
    if p > epsilon or slack <= BOUND_ATOL:
        outcome.skip("trace_distance_lower")
        outcome.skip("pinsker")
        return
    outcome.record("trace_distance_lower", math.log2(epsilon / slack), dh)
    outcome.record("pinsker", (1.0 - epsilon) * delta / epsilon, dh)


def low_excess_pair(rho: QState, epsilon: float, rng: np.random.Generator) -> Tuple[QState, QState]:
    """
    A pair (rho', sigma) with p = tr({rho' > sigma} rho') <= eps, so that the
    trace distance lower bound applies.

    rho' is rho unless no eigenvalue of rho is at most eps, in which case its
    smallest eigenvalue (a kernel direction when rho is rank deficient) is
    raised or lowered to a value below eps. In the eigenbasis, the smallest
    eigenvalues of total mass at most eps form a block S. sigma shrinks rho'
    on S by a factor 1 - t and moves the removed mass onto a random state on
    the complement of S, so rho' - sigma is positive on S only.
    """
    vals, vecs = scipy.linalg.eigh(rho.matrix)
    vals = np.where(vals > SUPPORT_CUTOFF, vals, 0.0)
    if vals[vals > 0].min() > epsilon:
        lowered = epsilon * rng.uniform(0.2, 1.0)
        others = np.arange(len(vals)) != 0
        vals[others] *= (vals.sum() - lowered) / vals[others].sum()
        vals[0] = lowered
    positive = np.flatnonzero(vals > 0)
    positive = positive[np.argsort(vals[positive])]
    inside = np.zeros(len(vals), dtype=bool)
    inside[positive[np.cumsum(vals[positive]) <= epsilon]] = True
    outside = ~inside
    rho_matrix = (vecs * vals) @ vecs.conj().T

    t = rng.uniform(0.1, 1.0)
    moved = t * vals[inside].sum()
    v_in, v_out = vecs[:, inside], vecs[:, outside]
    omega = random_state(int(outside.sum()), seed=rng).matrix
    sigma = (v_in * ((1.0 - t) * vals[inside])) @ v_in.conj().T
    sigma = sigma + v_out @ (np.diag(vals[outside]) + moved * omega) @ v_out.conj().T
    return (
        QState(HermitianOperator(hermitian_part(rho_matrix), validate=False), rho.layout),
        QState(HermitianOperator(hermitian_part(sigma), validate=False), rho.layout),
    )


class DhCoreCheck(PropositionCheck):
    """
    Positivity, equality at rho = sigma, the trace distance bounds and data
    processing of D_H^eps under sampled completely positive trace
    non-increasing maps.

    Independent random pairs rarely have p <= eps, so the lower trace distance
    bounds are checked on a pair built from rho to satisfy it.
    """

    check_name = "dh_core"

    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        d = int(choose(rng, cfg.dims))
        epsilon = float(choose(rng, cfg.epsilons))
        rho = random_state(d, random_rank(rng, d), seed=rng)
        sigma = random_state(d, random_rank(rng, d), seed=rng)
        outcome.attach(epsilon=epsilon, rho=rho, sigma=sigma)

        dh = self.dh(rho, sigma, epsilon).value
        outcome.record("nonnegative", 0.0, dh)
        outcome.record_equal("equal_states", self.dh(rho, rho, epsilon).value, 0.0)
        trace_distance_upper_bound(outcome, epsilon, dh, generalized_trace_distance(rho, sigma))

        rho_near, sigma_near = low_excess_pair(rho, epsilon, rng)
        outcome.attach(rho_near=rho_near, sigma_near=sigma_near)
        trace_distance_bounds(outcome, rho_near, sigma_near, epsilon, self.dh(rho_near, sigma_near, epsilon).value)

        d_out = int(choose(rng, cfg.dims))
        kind = choose(rng, ("channel", "trace_non_increasing"))
        channel = sample_instance(kind, (d, d_out), seed=rng)
        rho_out = channel(rho.matrix)
        sigma_out = channel(sigma.matrix)
        outcome.attach(channel_kind=kind, channel_dims=[d, d_out])
        if np.real(np.trace(rho_out)) < epsilon:
            outcome.skip("data_processing")
            return
        outcome.record("data_processing", self.dh(rho_out, sigma_out, epsilon).value, dh)


def check_dh_core(
    cfg: CheckConfig,
    corruption: float = 0.0,
    client=None,
    logger="./",
) -> CheckReport:
    return DhCoreCheck(corruption=corruption, logger=logger)(cfg, client=client)
