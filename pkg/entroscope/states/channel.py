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

from __future__ import annotations

from typing import Sequence

import numpy as np

from entroscope.states.quantum_state import InvalidStateError

CHANNEL_ATOL = 1e-10


def _below_identity(op: np.ndarray, atol: float = CHANNEL_ATOL) -> bool:
    gap = np.eye(op.shape[0]) - 0.5 * (op + op.conj().T)
    return bool(np.linalg.eigvalsh(gap)[0] >= -atol)


class QChannel:
    """
    Completely positive map in operator-sum form, rho -> sum_k K rho K^dagger.

    The trace_preserving, trace_non_increasing and sub_unital flags are
    established once, at construction, within ``CHANNEL_ATOL``.
    """

    def __init__(self, operator_terms: Sequence[np.ndarray]):
        terms = [np.array(k, dtype=np.complex128) for k in operator_terms]
        if len(terms) == 0:
            raise InvalidStateError("A channel needs at least one operator term")
        shape = terms[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in terms):
            raise InvalidStateError(
                f"Operator terms must share one 2d shape, got {[k.shape for k in terms]}"
            )
        for k in terms:
            k.setflags(write=False)
        self._terms = tuple(terms)

        gram = sum(k.conj().T @ k for k in terms)
        co_gram = sum(k @ k.conj().T for k in terms)
        self._trace_preserving = bool(
            np.max(np.abs(gram - np.eye(self.dim_in))) <= CHANNEL_ATOL
        )
        self._trace_non_increasing = _below_identity(gram)
        self._sub_unital = _below_identity(co_gram)

    @property
    def operator_terms(self):
        return self._terms

    @property
    def dim_in(self) -> int:
        return self._terms[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self._terms[0].shape[0]

    @property
    def trace_preserving(self) -> bool:
        return self._trace_preserving

    @property
    def trace_non_increasing(self) -> bool:
        return self._trace_non_increasing

    @property
    def sub_unital(self) -> bool:
        return self._sub_unital

    def adjoint(self) -> "QChannel":
        return QChannel([k.conj().T for k in self._terms])

    def __call__(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix)
        if matrix.shape != (self.dim_in, self.dim_in):
            raise InvalidStateError(
                f"Channel expects a {self.dim_in}x{self.dim_in} input, got {matrix.shape}"
            )
        return sum(k @ matrix @ k.conj().T for k in self._terms)

    def __repr__(self):
        return (
            f"QChannel({self.dim_in}->{self.dim_out}, terms={len(self._terms)}, "
            f"tp={self._trace_preserving}, sub_unital={self._sub_unital})"
        )
