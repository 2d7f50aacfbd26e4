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

import numpy as np

from entroscope.states.quantum_state import InvalidStateError
from entroscope.utils.linalg_utils import as_matrix, fidelity_norm, trace_norm


def _pair(rho, sigma):
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise InvalidStateError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def _trace(m) -> float:
    return float(np.real(np.trace(m)))


def generalized_fidelity(rho, sigma) -> float:
    """
    F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1 + sqrt((1 - tr rho)(1 - tr sigma))
    for subnormalized states, clipped to [0, 1].
    """
    a, b = _pair(rho, sigma)
    overlap = fidelity_norm(a, b)
    deficit = max(1.0 - _trace(a), 0.0) * max(1.0 - _trace(b), 0.0)
    return float(np.clip(overlap + np.sqrt(deficit), 0.0, 1.0))


def purified_distance(rho, sigma) -> float:
    f = generalized_fidelity(rho, sigma)
    return float(np.sqrt(max(1.0 - f * f, 0.0)))


def generalized_trace_distance(rho, sigma) -> float:
    """D(rho, sigma) = ||rho - sigma||_1 / 2 + |tr rho - tr sigma| / 2."""
    a, b = _pair(rho, sigma)
    return 0.5 * trace_norm(a - b) + 0.5 * abs(_trace(a) - _trace(b))
