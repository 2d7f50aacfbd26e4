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

import string
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_RTOL = 1e-10
TRACE_ATOL = 1e-12
NORMALIZATION_ATOL = 1e-10


class InvalidStateError(ValueError):
    pass


class UnknownSubsystemError(KeyError):
    pass


@dataclass(frozen=True)
class SystemLayout:
    """
    Ordered tensor factors of a multipartite Hilbert space.

    Parameters
    ----------
    subsystems: tuple of (label, dim) pairs in tensor order.
    """

    subsystems: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        subsystems = tuple((str(label), int(dim)) for label, dim in self.subsystems)
        labels = [label for label, _ in subsystems]
        if len(set(labels)) != len(labels):
            raise InvalidStateError(f"Subsystem labels must be unique, got {labels}")
        for label, dim in subsystems:
            if dim < 1:
                raise InvalidStateError(
                    f"Subsystem '{label}' has invalid dimension {dim}"
                )
        object.__setattr__(self, "subsystems", subsystems)

    @classmethod
    def from_dims(
        cls, dims: Union[int, Sequence[int]], labels: Optional[Sequence[str]] = None
    ) -> "SystemLayout":
        if np.isscalar(dims):
            dims = [int(dims)]
        dims = [int(d) for d in dims]
        if labels is None:
            labels = default_labels(len(dims))
        if len(labels) != len(dims):
            raise InvalidStateError(
                f"Got {len(labels)} labels for {len(dims)} subsystems"
            )
        return cls(tuple(zip(labels, dims)))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSubsystemError(
                f"Unknown subsystem '{label}', layout has {list(self.labels)}"
            ) from None

    def dim_of(self, labels: Union[str, Iterable[str]]) -> int:
        if isinstance(labels, str):
            labels = [labels]
        return int(np.prod([self.dims[self.index(label)] for label in labels], dtype=np.int64))

    def subset(self, labels: Iterable[str]) -> "SystemLayout":
        keep = set(labels)
        for label in keep:
            self.index(label)
        return SystemLayout(tuple(s for s in self.subsystems if s[0] in keep))

    def replace(self, label: str, dim: int) -> "SystemLayout":
        idx = self.index(label)
        subsystems = list(self.subsystems)
        subsystems[idx] = (label, int(dim))
        return SystemLayout(tuple(subsystems))

    def concat(self, other: "SystemLayout") -> "SystemLayout":
        """
        Layout of a tensor product. Clashing labels of ``other`` are primed
        until unique, so rho_A (x) rho_A becomes A, A'.
        """
        taken = set(self.labels)
        subsystems = list(self.subsystems)
        for label, dim in other.subsystems:
            while label in taken:
                label = label + "'"
            taken.add(label)
            subsystems.append((label, dim))
        return SystemLayout(tuple(subsystems))


def default_labels(n: int) -> Tuple[str, ...]:
    letters = string.ascii_uppercase
    if n <= len(letters):
        return tuple(letters[:n])
    return tuple(f"S{i}" for i in range(n))


def _as_square(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidStateError(f"Expected a square matrix, got shape {m.shape}")
    return m


class HermitianOperator:
    """
    Dense Hermitian operator. The stored matrix is the Hermitian part of the
    input and is read-only.
    """

    def __init__(self, matrix, atol: float = HERMITIAN_ATOL, validate: bool = True):
        if isinstance(matrix, HermitianOperator):
            matrix = matrix.matrix
        m = _as_square(matrix)
        if validate:
            deviation = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if deviation > atol:
                raise InvalidStateError(
                    f"Operator is not Hermitian, max |M - M^dagger| = {deviation:.3e}"
                )
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._matrix)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return np.array(self._matrix)
        return np.array(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


class QState:
    """
    Subnormalized density operator tagged with a tensor layout.

    A state is positive semidefinite up to ``PSD_RTOL`` times its largest
    eigenvalue and has 0 < tr <= 1 + ``TRACE_ATOL``.
    """

    def __init__(self, op, layout: Optional[SystemLayout] = None):
        if not isinstance(op, HermitianOperator):
            op = HermitianOperator(op)
        if layout is None:
            layout = SystemLayout.from_dims([op.dim])
        if layout.dim != op.dim:
            raise InvalidStateError(
                f"Layout dimension {layout.dim} does not match operator dimension {op.dim}"
            )

        eigenvalues = op.eigvalsh()
        largest = max(float(eigenvalues[-1]), 0.0)
        if eigenvalues[0] < -PSD_RTOL * largest or (largest == 0.0 and eigenvalues[0] < 0):
            raise InvalidStateError(
                f"State is not positive semidefinite, min eigenvalue {eigenvalues[0]:.3e}"
            )
        trace = float(np.real(np.trace(op.matrix)))
        if not 0.0 < trace <= 1.0 + TRACE_ATOL:
            raise InvalidStateError(f"State trace {trace!r} is outside (0, 1]")

        self._op = op
        self._layout = layout
        self._trace = trace

    @property
    def op(self) -> HermitianOperator:
        return self._op

    @property
    def matrix(self) -> np.ndarray:
        return self._op.matrix

    @property
    def layout(self) -> SystemLayout:
        return self._layout

    @property
    def trace(self) -> float:
        return self._trace

    @property
    def dim(self) -> int:
        return self._op.dim

    def is_normalized(self, atol: float = NORMALIZATION_ATOL) -> bool:
        return abs(self._trace - 1.0) <= atol

    def with_layout(self, layout: SystemLayout) -> "QState":
        return QState(self._op, layout)

    def __array__(self, dtype=None, copy=None):
        return self._op.__array__(dtype)

    def __repr__(self):
        return f"QState(layout={list(self._layout.subsystems)}, trace={self._trace:.6g})"
