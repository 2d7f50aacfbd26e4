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
from scipy.special import entr

from entroscope.entropies.min_max import support_violation
from entroscope.states.quantum_state import InvalidStateError, QState
from entroscope.utils.linalg_utils import as_matrix, fn_on_support, support_eigh, support_projector
from entroscope.utils.state_utils import partial_trace, resolve_partition

LN2 = math.log(2.0)


def _require_normalized(rho: QState, what: str):
    if not rho.is_normalized():
        raise InvalidStateError(f"{what} needs a normalized state, got trace {rho.trace!r}")


def binary_entropy(p: float) -> float:
    return float((entr(p) + entr(1.0 - p)) / LN2)


def shannon_entropy(probabilities) -> float:
    return float(np.sum(entr(np.asarray(probabilities, dtype=np.float64))) / LN2)


def von_neumann(rho: QState) -> float:
    _require_normalized(rho, "Von Neumann entropy")
    vals, _ = support_eigh(rho)
    return shannon_entropy(vals)


def h_cond_vn(rho_ab: QState, partition) -> float:
    """H(A|B) = H(rho_AB) - H(rho_B)."""
    _require_normalized(rho_ab, "Conditional entropy")
    _, b_labels = resolve_partition(rho_ab.layout, partition)
    if not b_labels:
        return von_neumann(rho_ab)
    return von_neumann(rho_ab) - von_neumann(partial_trace(rho_ab, b_labels))


def kl_div(rho: QState, sigma) -> float:
    """tr[rho (log2 rho - log2 sigma)], +inf when supp(rho) is not inside supp(sigma)."""
    _require_normalized(rho, "Relative entropy")
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise InvalidStateError(f"Dimension mismatch: {r.shape} vs {s.shape}")
    if support_violation(r, s):
        return math.inf
    log_sigma = as_matrix(fn_on_support(s, np.log2))
    return -von_neumann(rho) - float(np.real(np.trace(r @ log_sigma)))


def renyi0(rho, sigma) -> float:
    """-log2 tr(rho^0 sigma) with rho^0 the support projector of rho."""
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise InvalidStateError(f"Dimension mismatch: {r.shape} vs {s.shape}")
    overlap = float(np.real(np.trace(as_matrix(support_projector(r)) @ s)))
    if overlap <= 0.0:
        return math.inf
    return -math.log2(overlap)
