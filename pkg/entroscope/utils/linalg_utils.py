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

from typing import Callable, Tuple

import numpy as np
import scipy.linalg

from entroscope.states.quantum_state import HermitianOperator, QState

# Eigenvalues at or below SUPPORT_CUTOFF * max|lambda| count as zero
SUPPORT_CUTOFF = 1e-10


def as_matrix(x) -> np.ndarray:
    if isinstance(x, (QState, HermitianOperator)):
        return x.matrix
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    return m


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _like(x, m: np.ndarray):
    if isinstance(x, HermitianOperator):
        return HermitianOperator(m, validate=False)
    return m


def support_eigh(x, cutoff: float = SUPPORT_CUTOFF) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenpairs of a Hermitian operator restricted to eigenvalues strictly
    above ``cutoff`` times the largest eigenvalue magnitude.
    """
    m = hermitian_part(as_matrix(x))
    if m.size == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    vals, vecs = scipy.linalg.eigh(m)
    scale = np.max(np.abs(vals))
    keep = vals > cutoff * scale
    return vals[keep], vecs[:, keep]


def _apply_scalar_fn(f: Callable, vals: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(vals), dtype=np.float64)
        if out.shape != vals.shape:
            raise TypeError
    except TypeError:
        out = np.array([f(v) for v in vals], dtype=np.float64)
    return out


def fn_on_support(x, f: Callable, cutoff: float = SUPPORT_CUTOFF):
    """
    Applies ``f`` to the eigenvalues of ``x`` above the support cutoff and
    maps every other eigenvalue to zero.

    Args:
        x: A Hermitian operator (QState, HermitianOperator or array).
        f: Scalar function, vectorized over numpy arrays where possible.
    Returns:
        The operator f(x) on the support of x, of the same kind as ``x``
        (a QState input yields an array).
    """
    vals, vecs = support_eigh(x, cutoff)
    with np.errstate(all="ignore"):
        fvals = _apply_scalar_fn(f, vals)
    if not np.all(np.isfinite(fvals)):
        bad = vals[~np.isfinite(fvals)]
        raise ValueError(f"Function is undefined on support eigenvalue(s) {bad}")
    m = (vecs * fvals) @ vecs.conj().T
    n = as_matrix(x).shape[0]
    if vecs.shape[1] == 0:
        m = np.zeros((n, n), dtype=np.complex128)
    return _like(x, hermitian_part(m))


def support_projector(x, cutoff: float = SUPPORT_CUTOFF):
    return fn_on_support(x, np.ones_like, cutoff)


def positive_part_projector(delta, cutoff: float = SUPPORT_CUTOFF):
    """Projector {delta > 0} onto the strictly positive eigenspaces."""
    return support_projector(delta, cutoff)


def positive_part(delta, cutoff: float = SUPPORT_CUTOFF):
    return fn_on_support(delta, lambda v: v, cutoff)


def psd_sqrt(x) -> np.ndarray:
    return as_matrix(fn_on_support(as_matrix(x), np.sqrt))


def support_isometry(x, cutoff: float = SUPPORT_CUTOFF) -> Tuple[np.ndarray, np.ndarray]:
    """Columns spanning the support of ``x`` with the matching eigenvalues."""
    vals, vecs = support_eigh(x, cutoff)
    return vecs, vals


def trace_norm(x) -> float:
    m = as_matrix(x)
    if m.size == 0:
        return 0.0
    return float(np.sum(scipy.linalg.svdvals(m)))


def fidelity_norm(a, b) -> float:
    """||sqrt(a) sqrt(b)||_1 for positive semidefinite a and b."""
    return trace_norm(psd_sqrt(a) @ psd_sqrt(b))


def min_eigenvalue(x) -> float:
    m = hermitian_part(as_matrix(x))
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.eigvalsh(m)[0])


def max_eigenvalue(x) -> float:
    m = hermitian_part(as_matrix(x))
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.eigvalsh(m)[-1])


def clip_eigenvalues(x, lower: float, upper: float) -> np.ndarray:
    m = hermitian_part(as_matrix(x))
    vals, vecs = scipy.linalg.eigh(m)
    vals = np.clip(vals, lower, upper)
    return hermitian_part((vecs * vals) @ vecs.conj().T)


def psd_part(x) -> np.ndarray:
    """Nearest positive semidefinite operator in Frobenius norm."""
    return clip_eigenvalues(x, 0.0, np.inf)
