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

from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from entroscope.states.channel import QChannel
from entroscope.states.quantum_state import HermitianOperator, QState, SystemLayout

SAMPLE_KINDS = (
    "state",
    "pure",
    "cq_state",
    "channel",
    "unital",
    "trace_non_increasing",
)

Seed = Union[int, np.random.Generator, np.random.SeedSequence, None]


def as_generator(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_dims(dims) -> list:
    if np.isscalar(dims):
        dims = [dims]
    dims = [int(d) for d in dims]
    if len(dims) == 0 or any(d < 1 for d in dims):
        raise ValueError(f"Dimensions must be positive integers, got {dims}")
    return dims


def ginibre_matrix(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))


def random_density_matrix(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """G G^dagger / tr(G G^dagger) for a complex Gaussian dim x rank matrix G."""
    if not 1 <= rank <= dim:
        raise ValueError(f"Rank must lie in [1, {dim}], got {rank}")
    g = ginibre_matrix(dim, rank, rng)
    m = g @ g.conj().T
    return m / np.real(np.trace(m))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_isometry(dim_out: int, dim_in: int, rng: np.random.Generator) -> np.ndarray:
    if dim_out < dim_in:
        raise ValueError(f"An isometry needs dim_out >= dim_in, got {dim_out} < {dim_in}")
    return random_unitary(dim_out, rng)[:, :dim_in]


def random_state(
    layout: Union[int, Sequence[int], SystemLayout],
    rank: Optional[int] = None,
    seed: Seed = 0,
) -> QState:
    if not isinstance(layout, SystemLayout):
        layout = SystemLayout.from_dims(_check_dims(layout))
    rng = as_generator(seed)
    rank = layout.dim if rank is None else int(rank)
    m = random_density_matrix(layout.dim, rank, rng)
    return QState(HermitianOperator(m, validate=False), layout)


def random_cq_state(dims: Sequence[int], rank: Optional[int] = None, seed: Seed = 0) -> QState:
    """
    rho_XB = sum_x p(x) |x><x| (x) rho_B^x. The first entry of ``dims`` is the
    classical register, the rest form B.
    """
    dims = _check_dims(dims)
    if len(dims) < 2:
        raise ValueError(f"A CQ state needs a register and a quantum part, got dims {dims}")
    rng = as_generator(seed)
    d_x = dims[0]
    d_b = int(np.prod(dims[1:]))
    p = rng.dirichlet(np.ones(d_x))
    m = np.zeros((d_x * d_b, d_x * d_b), dtype=np.complex128)
    for x in range(d_x):
        r = d_b if rank is None else int(rank)
        block = random_density_matrix(d_b, r, rng)
        m[x * d_b:(x + 1) * d_b, x * d_b:(x + 1) * d_b] = p[x] * block
    return QState(HermitianOperator(m, validate=False), SystemLayout.from_dims(dims))


def random_channel(
    dim_in: int, dim_out: Optional[int] = None, n_kraus: Optional[int] = None, seed: Seed = 0
) -> QChannel:
    """
    Trace preserving channel from a random Stinespring isometry
    V: H_in -> H_out (x) H_E, with Kraus terms K_j = (I (x) <j|) V.
    """
    dim_out = dim_in if dim_out is None else dim_out
    n_kraus = _default_kraus(dim_in, dim_out) if n_kraus is None else int(n_kraus)
    if dim_out * n_kraus < dim_in:
        raise ValueError(
            f"{n_kraus} operator terms of shape {dim_out}x{dim_in} cannot be trace preserving"
        )
    rng = as_generator(seed)
    v = random_isometry(dim_out * n_kraus, dim_in, rng).reshape(dim_out, n_kraus, dim_in)
    return QChannel([v[:, j, :] for j in range(n_kraus)])


def random_unital_channel(dim: int, n_terms: Optional[int] = None, seed: Seed = 0) -> QChannel:
    """Mixture of random unitaries, unital and trace preserving."""
    n_terms = dim if n_terms is None else int(n_terms)
    if n_terms < 1:
        raise ValueError(f"A mixture needs at least one unitary, got {n_terms}")
    rng = as_generator(seed)
    weights = rng.dirichlet(np.ones(n_terms))
    return QChannel([np.sqrt(w) * random_unitary(dim, rng) for w in weights])


def random_trace_non_increasing_channel(
    dim_in: int, dim_out: Optional[int] = None, n_kraus: Optional[int] = None, seed: Seed = 0
) -> QChannel:
    """A Stinespring channel with its last operator term dropped."""
    dim_out = dim_in if dim_out is None else dim_out
    n_kraus = _default_kraus(dim_in, dim_out) if n_kraus is None else int(n_kraus)
    full = random_channel(dim_in, dim_out, n_kraus + 1, seed)
    return QChannel(full.operator_terms[:-1])


def _default_kraus(dim_in: int, dim_out: int) -> int:
    return max(2, -(-dim_in // dim_out))


def sample_instance(
    kind: str,
    dims: Union[int, Sequence[int]],
    rank: Optional[int] = None,
    seed: Seed = 0,
    n_kraus: Optional[int] = None,
) -> Union[QState, QChannel]:
    """
    Seeded random instance generation.

    Args:
        kind: One of ``SAMPLE_KINDS``.
        dims: Subsystem dimensions for states. Channels read ``(dim_in,)``
            or ``(dim_in, dim_out)``.
        rank: Rank of sampled mixed states, full rank by default.
        seed: Integer seed, SeedSequence or Generator.
        n_kraus: Number of operator terms for channel kinds.
    Returns:
        A QState or a QChannel. Equal arguments give identical outputs.
    """
    dims = _check_dims(dims)
    if kind == "state":
        return random_state(dims, rank, seed)
    if kind == "pure":
        return random_state(dims, 1, seed)
    if kind == "cq_state":
        return random_cq_state(dims, rank, seed)

    if kind in ("channel", "unital", "trace_non_increasing"):
        if len(dims) > 2:
            raise ValueError(f"Channels take (dim_in,) or (dim_in, dim_out), got {dims}")
        dim_in, dim_out = dims[0], dims[-1]
        if kind == "channel":
            return random_channel(dim_in, dim_out, n_kraus, seed)
        if kind == "unital":
            if dim_in != dim_out:
                raise ValueError(f"Unital channels need dim_in == dim_out, got {dims}")
            return random_unital_channel(dim_in, n_kraus, seed)
        return random_trace_non_increasing_channel(dim_in, dim_out, n_kraus, seed)

    raise ValueError(f"Unknown instance kind '{kind}', expected one of {list(SAMPLE_KINDS)}")
