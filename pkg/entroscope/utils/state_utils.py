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

from functools import reduce
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from entroscope.states.channel import QChannel
from entroscope.states.quantum_state import (
    HermitianOperator,
    InvalidStateError,
    QState,
    SystemLayout,
    UnknownSubsystemError,
)
from entroscope.utils.linalg_utils import SUPPORT_CUTOFF, as_matrix, hermitian_part

Operand = Union[QState, HermitianOperator, np.ndarray]


def tensor_product(a: Operand, b: Operand) -> Operand:
    """
    Kronecker product a (x) b. Two states give a state on the concatenated
    layout, whose trace is the product of the traces.
    """
    m = np.kron(as_matrix(a), as_matrix(b))
    if isinstance(a, QState) and isinstance(b, QState):
        return QState(HermitianOperator(m, validate=False), a.layout.concat(b.layout))
    if isinstance(a, (QState, HermitianOperator)) and isinstance(b, (QState, HermitianOperator)):
        return HermitianOperator(m, validate=False)
    return m


def tensor_power(a: Operand, n: int) -> Operand:
    if n < 1:
        raise ValueError(f"Tensor power needs n >= 1, got {n}")
    return reduce(tensor_product, [a] * n)


def _label_indices(layout: SystemLayout, labels: Iterable[str]) -> List[int]:
    return sorted(layout.index(label) for label in labels)


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a dense operator keeping the factor indices ``keep``."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    t = np.asarray(m).reshape(dims + dims)
    # Trace out from the highest index down so remaining axis numbers stay valid
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        current = t.ndim // 2
        t = np.trace(t, axis1=idx, axis2=idx + current)
    kept_dim = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    return t.reshape(kept_dim, kept_dim)


def partial_trace(rho: QState, keep: Iterable[str]) -> QState:
    """
    Marginal of ``rho`` on the subsystems ``keep``, in layout order.
    Raises UnknownSubsystemError for labels missing from the layout.
    """
    keep = list(keep)
    indices = _label_indices(rho.layout, keep)
    m = partial_trace_matrix(rho.matrix, rho.layout.dims, indices)
    layout = SystemLayout(tuple(rho.layout.subsystems[i] for i in indices))
    return QState(HermitianOperator(m, validate=False), layout)


def permute_subsystems(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """
    Reorders tensor factors so that new factor k is old factor ``order[k]``.
    """
    dims = list(dims)
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise ValueError(f"Invalid subsystem order {list(order)} for {n} subsystems")
    d = int(np.prod(dims, dtype=np.int64))
    t = np.asarray(m).reshape(dims + dims)
    axes = list(order) + [n + i for i in order]
    return t.transpose(axes).reshape(d, d)


def reorder_state(rho: QState, labels: Sequence[str]) -> QState:
    order = [rho.layout.index(label) for label in labels]
    if len(order) != len(rho.layout.labels):
        raise ValueError(
            f"Reordering must name every subsystem of {list(rho.layout.labels)}, got {list(labels)}"
        )
    m = permute_subsystems(rho.matrix, rho.layout.dims, order)
    layout = SystemLayout(tuple(rho.layout.subsystems[i] for i in order))
    return QState(HermitianOperator(m, validate=False), layout)


def identity_extension(marginal: Operand, layout: SystemLayout, identity_labels: Sequence[str]) -> np.ndarray:
    """
    Builds I_{identity_labels} (x) marginal in the factor order of ``layout``.
    ``marginal`` acts on the remaining subsystems, in layout order.
    """
    id_idx = _label_indices(layout, identity_labels)
    rest_idx = [i for i in range(len(layout.dims)) if i not in id_idx]
    d_id = int(np.prod([layout.dims[i] for i in id_idx], dtype=np.int64))
    op = np.kron(np.eye(d_id), as_matrix(marginal))
    current = id_idx + rest_idx
    dims_current = [layout.dims[i] for i in current]
    # position in the product of each layout factor
    order = [current.index(i) for i in range(len(layout.dims))]
    return permute_subsystems(op, dims_current, order)


def maximally_mixed(layout: Union[int, SystemLayout]) -> QState:
    if not isinstance(layout, SystemLayout):
        layout = SystemLayout.from_dims([layout])
    return QState(np.eye(layout.dim) / layout.dim, layout)


def basis_state(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def pure_state(vector, layout: SystemLayout = None) -> QState:
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    return QState(np.outer(v, v.conj()), layout)


def bell_state() -> QState:
    v = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    return pure_state(v, SystemLayout.from_dims([2, 2]))


def purification_vector(x: Operand, truncate: bool = False) -> np.ndarray:
    """
    Vector psi with tr_2 |psi><psi| = x for a positive semidefinite x, built
    from the eigendecomposition in eigenvalue-descending order,
    psi = sum_i sqrt(lambda_i) v_i (x) e_i.

    With ``truncate`` the purifying factor has dimension rank(x) rather than
    dim(x).
    """
    m = hermitian_part(as_matrix(x))
    n = m.shape[0]
    vals, vecs = scipy.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    scale = max(np.max(np.abs(vals)), 0.0) if vals.size else 0.0
    vals = np.where(vals > SUPPORT_CUTOFF * scale, vals, 0.0)
    if truncate:
        rank = int(np.count_nonzero(vals))
        vals, vecs = vals[:rank], vecs[:, :rank]
    k = vals.shape[0]
    psi = np.zeros((n, k), dtype=np.complex128)
    psi[:, :] = vecs * np.sqrt(vals)
    return psi.reshape(n * k)


def purify(rho: QState, label: str = "R", truncate: bool = False) -> QState:
    """
    Pure state on H (x) H_R whose marginal on H is ``rho``. The input must be
    normalized.
    """
    if not rho.is_normalized():
        raise InvalidStateError(
            f"Purification needs a normalized state, got trace {rho.trace!r}"
        )
    psi = purification_vector(rho, truncate=truncate)
    k = psi.shape[0] // rho.dim
    layout = rho.layout.concat(SystemLayout(((label, k),)))
    return pure_state(psi, layout)


def apply_kraus(
    kraus: Sequence[np.ndarray], m: np.ndarray, dims: Sequence[int], target: int
) -> np.ndarray:
    """Operator-sum action on factor ``target`` with the identity elsewhere."""
    dims = list(dims)
    d_before = int(np.prod(dims[:target], dtype=np.int64))
    d_after = int(np.prod(dims[target + 1:], dtype=np.int64))
    out = None
    for k in kraus:
        full = np.kron(np.kron(np.eye(d_before), k), np.eye(d_after))
        term = full @ m @ full.conj().T
        out = term if out is None else out + term
    return hermitian_part(out)


def apply_channel(ch: QChannel, rho: Operand, target: str, layout: SystemLayout = None) -> Operand:
    """
    Applies ``ch`` to the ``target`` factor of ``rho``. States carry their
    own layout, bare operators need ``layout``.
    """
    if isinstance(rho, QState):
        layout = rho.layout
    elif layout is None:
        raise ValueError("A layout is required to apply a channel to a bare operator")
    idx = layout.index(target)
    if layout.dims[idx] != ch.dim_in:
        raise InvalidStateError(
            f"Channel input dimension {ch.dim_in} does not match subsystem "
            f"'{target}' of dimension {layout.dims[idx]}"
        )
    m = apply_kraus(ch.operator_terms, as_matrix(rho), layout.dims, idx)
    if isinstance(rho, QState):
        return QState(HermitianOperator(m, validate=False), layout.replace(target, ch.dim_out))
    return m


def weyl_heisenberg_operators(d: int) -> List[np.ndarray]:
    """The d^2 operators U^j V^k with U|j> = |j+1 mod d> and V|k> = w^k |k>."""
    shift = np.roll(np.eye(d), 1, axis=0)
    omega = np.exp(2j * np.pi / d)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for j in range(d):
        uj = np.linalg.matrix_power(shift, j)
        for k in range(d):
            ops.append(uj @ np.linalg.matrix_power(clock, k))
    return ops


def weyl_heisenberg_channel(d: int) -> QChannel:
    return QChannel([op / d for op in weyl_heisenberg_operators(d)])


def weyl_heisenberg_twirl(rho: Operand, target: str, layout: SystemLayout = None) -> Operand:
    """Group average over the Weyl-Heisenberg operators on ``target``."""
    if isinstance(rho, QState):
        layout = rho.layout
    elif layout is None:
        raise ValueError("A layout is required to twirl a bare operator")
    d = layout.dims[layout.index(target)]
    return apply_channel(weyl_heisenberg_channel(d), rho, target, layout)


def labels_of(layout: SystemLayout, indices: Iterable[int]) -> List[str]:
    try:
        return [layout.labels[i] for i in indices]
    except IndexError:
        raise UnknownSubsystemError(
            f"Subsystem index out of range for layout {list(layout.labels)}"
        ) from None


def resolve_partition(layout: SystemLayout, partition) -> Tuple[List[str], List[str]]:
    """
    Validates an (A-labels, B-labels) split of ``layout``. Either side may
    be empty, but together they must cover every subsystem exactly once.
    Labels come back in layout order.
    """
    try:
        a_labels, b_labels = partition
    except (TypeError, ValueError):
        raise ValueError(f"A partition is a pair (A-labels, B-labels), got {partition!r}") from None
    a_labels = _label_list(a_labels)
    b_labels = _label_list(b_labels)
    for label in a_labels + b_labels:
        layout.index(label)
    if set(a_labels) & set(b_labels):
        raise ValueError(f"Partition sides overlap: {sorted(set(a_labels) & set(b_labels))}")
    if sorted(a_labels + b_labels) != sorted(layout.labels):
        raise ValueError(
            f"Partition {a_labels} | {b_labels} does not cover layout {list(layout.labels)}"
        )
    if not a_labels:
        raise ValueError("The conditioned side A of a partition must not be empty")
    a_labels = [label for label in layout.labels if label in set(a_labels)]
    b_labels = [label for label in layout.labels if label in set(b_labels)]
    return a_labels, b_labels


def split_state(rho: QState, partition) -> Tuple[QState, List[str], List[str]]:
    """``rho`` reordered as A (x) B with the resolved partition labels."""
    a_labels, b_labels = resolve_partition(rho.layout, partition)
    return reorder_state(rho, a_labels + b_labels), a_labels, b_labels


def conditioning_operator(rho: QState, partition, sigma_b: Operand = None) -> np.ndarray:
    """
    I_A (x) sigma_B in the layout order of ``rho``, with sigma_B the
    marginal rho_B unless given. An empty B yields tr(rho) I_A.
    """
    a_labels, b_labels = resolve_partition(rho.layout, partition)
    if sigma_b is None:
        sigma_b = partial_trace(rho, b_labels).matrix if b_labels else np.array([[rho.trace]])
    if not b_labels:
        return np.eye(rho.dim) * complex(as_matrix(sigma_b)[0, 0])
    return identity_extension(sigma_b, rho.layout, a_labels)


def _label_list(labels) -> List[str]:
    if isinstance(labels, str):
        return [labels]
    return list(labels)
