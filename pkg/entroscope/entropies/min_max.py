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

from entroscope.entropies.entropy_value import EntropyValue, HypoTestResult
from entroscope.entropies.hypothesis_testing import (
    _check_pair,
    check_epsilon,
    d_hypo,
    solve_or_raise,
)
from entroscope.sdp.problem import SdpBuilder
from entroscope.sdp.solver import InteriorPointSolver
from entroscope.states.quantum_state import (
    NORMALIZATION_ATOL,
    HermitianOperator,
    InvalidStateError,
    QState,
)
from entroscope.utils.linalg_utils import (
    SUPPORT_CUTOFF,
    as_matrix,
    fidelity_norm,
    fn_on_support,
    hermitian_part,
    max_eigenvalue,
    psd_sqrt,
    support_isometry,
    support_projector,
)
from entroscope.utils.state_utils import (
    conditioning_operator,
    partial_trace,
    purification_vector,
    purify,
    resolve_partition,
    split_state,
)

SMOOTH_GAP_TOL = 1e-8
SMOOTH_FEAS_TOL = 1e-9


def _smooth_solver(solver: Optional[InteriorPointSolver]) -> InteriorPointSolver:
    if solver is not None:
        return solver
    return InteriorPointSolver(gap_tol=SMOOTH_GAP_TOL, feas_tol=SMOOTH_FEAS_TOL)


def _trace(m) -> float:
    return float(np.real(np.trace(m)))


def support_violation(rho, sigma) -> bool:
    """True when supp(rho) is not contained in supp(sigma)."""
    r, s = as_matrix(rho), as_matrix(sigma)
    kernel = np.eye(r.shape[0]) - as_matrix(support_projector(s))
    leak = max_eigenvalue(kernel @ r @ kernel)
    return leak > SUPPORT_CUTOFF * max(max_eigenvalue(r), np.finfo(float).tiny)


def d_max(rho, sigma) -> EntropyValue:
    """log2 of the largest eigenvalue of sigma^{-1/2} rho sigma^{-1/2} on supp(sigma)."""
    r, s = _check_pair(rho, sigma)
    if support_violation(r, s):
        return EntropyValue(math.inf, info={"support_violation": True})
    s_inv_half = as_matrix(fn_on_support(s, lambda v: v ** -0.5))
    lam = max_eigenvalue(s_inv_half @ r @ s_inv_half)
    return EntropyValue(math.log2(lam), info={"lambda_max": lam})


def d_min(rho, sigma) -> EntropyValue:
    """-log2 ||sqrt(rho) sqrt(sigma)||_1^2."""
    r, s = _check_pair(rho, sigma)
    overlap = fidelity_norm(r, s)
    if overlap <= 0.0:
        return EntropyValue(math.inf, info={"overlap": 0.0})
    return EntropyValue(-2.0 * math.log2(overlap), info={"overlap": overlap})


def fidelity_sdp(zeta, eta, solver: Optional[InteriorPointSolver] = None) -> float:
    """
    ||sqrt(zeta) sqrt(eta)||_1^2 as the program

        minimize tr(eta Z)  s.t.  Z (x) I_R >= |psi><psi|

    where psi purifies zeta. Both operators are first compressed onto
    supp(eta), which keeps the dual strictly feasible.
    """
    z, e = _check_pair(zeta, eta)
    vecs, vals = support_isometry(e)
    if vals.size == 0:
        return 0.0
    z_c = hermitian_part(vecs.conj().T @ z @ vecs)
    if max_eigenvalue(z_c) <= SUPPORT_CUTOFF * max(max_eigenvalue(z), np.finfo(float).tiny):
        return 0.0
    psi = purification_vector(z_c, truncate=True)
    s = vals.size
    r = psi.size // s

    builder = SdpBuilder()
    var = builder.add_input(s)
    dom = builder.add_output(s * r, "geq")
    for j in range(r):
        lift = np.kron(np.eye(s), np.eye(r)[:, [j]])
        builder.add_term(var, dom, lift)
    builder.set_rhs(dom, np.outer(psi, psi.conj()))
    builder.set_objective(var, np.diag(vals))
    solution = solve_or_raise(builder.build(), _smooth_solver(solver), "Fidelity")
    return solution.alpha


def d_max_sdp(rho, sigma, solver: Optional[InteriorPointSolver] = None) -> EntropyValue:
    """Cross-check of ``d_max``: minimize mu s.t. mu sigma >= rho on supp(sigma)."""
    r, s = _check_pair(rho, sigma)
    if support_violation(r, s):
        return EntropyValue(math.inf, info={"support_violation": True})
    vecs, vals = support_isometry(s)
    builder = SdpBuilder()
    mu = builder.add_input(1)
    dom = builder.add_output(vals.size, "geq")
    builder.add_scalar_term(mu, dom, np.diag(vals))
    builder.set_rhs(dom, vecs.conj().T @ r @ vecs)
    builder.set_objective(mu, np.ones((1, 1)))
    solution = solve_or_raise(builder.build(), _smooth_solver(solver), "Max-relative entropy")
    return EntropyValue(math.log2(solution.alpha), solution)


def _add_smoothing_ball(
    builder: SdpBuilder,
    support: np.ndarray,
    eigenvalues: np.ndarray,
    dim: int,
    trace_rho: float,
    epsilon: float,
) -> Tuple[int, np.ndarray]:
    """
    Adds a variable rho_tilde of size ``dim`` constrained to the purified
    distance ball of radius epsilon around rho = V diag(lambda) V^dagger.

    The block Z = [[rho_tilde, N], [N^dagger, diag(lambda)]] >= 0 bounds
    Re tr(V^dagger N) by ||sqrt(rho_tilde) sqrt(rho)||_1 and the 2x2 block
    T = [[1 - tr rho_tilde, t], [t, 1 - tr rho]] >= 0 bounds t by the
    subnormalization term. T is dropped for normalized rho.

    Returns the index of Z and the selector P1 with P1 Z P1^dagger = rho_tilde.
    """
    r = eigenvalues.size
    size = dim + r
    p1 = np.hstack([np.eye(dim), np.zeros((dim, r))])
    p2 = np.hstack([np.zeros((r, dim)), np.eye(r)])
    cross = np.zeros((size, size), dtype=np.complex128)
    cross[:dim, dim:] = support
    cross[dim:, :dim] = support.conj().T
    cross *= 0.5
    d1 = p1.T @ p1

    z = builder.add_input(size)
    anchor = builder.add_output(r, "eq")
    builder.add_term(z, anchor, p2)
    builder.set_rhs(anchor, np.diag(eigenvalues))

    fidelity = builder.add_output(1, "geq")
    builder.add_trace_term(z, fidelity, cross)
    builder.set_rhs(fidelity, np.full((1, 1), math.sqrt(1.0 - epsilon ** 2)))

    if abs(trace_rho - 1.0) <= NORMALIZATION_ATOL:
        bound = builder.add_output(1, "geq")
        builder.add_trace_term(z, bound, -d1)
        builder.set_rhs(bound, -np.ones((1, 1)))
    else:
        t = builder.add_input(2)
        builder.add_trace_term(t, fidelity, 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]]))
        top = builder.add_output(1, "eq")
        builder.add_trace_term(t, top, np.diag([1.0, 0.0]))
        builder.add_trace_term(z, top, d1)
        builder.set_rhs(top, np.ones((1, 1)))
        bottom = builder.add_output(1, "eq")
        builder.add_trace_term(t, bottom, np.diag([0.0, 1.0]))
        builder.set_rhs(bottom, np.full((1, 1), 1.0 - trace_rho))
    return z, p1


def d_max_smooth(
    rho,
    sigma,
    epsilon: float,
    solver: Optional[InteriorPointSolver] = None,
) -> EntropyValue:
    """
    D_max^eps(rho || sigma): the minimum of D_max(rho_tilde || sigma) over
    subnormalized rho_tilde within purified distance epsilon of rho,
    solved jointly in rho_tilde and mu as

        minimize mu  s.t.  rho_tilde <= mu sigma,  F(rho_tilde, rho) >= sqrt(1 - eps^2)

    rho_tilde is restricted to supp(sigma). The result is -inf when the
    ball contains zero and +inf when no ball member lies in supp(sigma).
    """
    check_epsilon(epsilon, lower_open=False, upper_closed=False)
    if epsilon == 0:
        return d_max(rho, sigma)
    r, s = _check_pair(rho, sigma)
    trace_rho = _trace(r)
    if trace_rho <= epsilon ** 2:
        return EntropyValue(-math.inf, info={"epsilon": epsilon, "zero_in_ball": True})

    w, sigma_vals = support_isometry(s)
    rho_c = hermitian_part(w.conj().T @ r @ w)
    best_fidelity_sq = _trace(rho_c) + 1.0 - trace_rho
    if sigma_vals.size == 0 or best_fidelity_sq < 1.0 - epsilon ** 2:
        return EntropyValue(math.inf, info={"epsilon": epsilon, "support_violation": True})
    v, lam = support_isometry(rho_c)

    builder = SdpBuilder()
    mu = builder.add_input(1)
    builder.set_objective(mu, np.ones((1, 1)))
    z, p1 = _add_smoothing_ball(builder, v, lam, sigma_vals.size, trace_rho, epsilon)
    dom = builder.add_output(sigma_vals.size, "geq")
    builder.add_scalar_term(mu, dom, np.diag(sigma_vals))
    builder.add_term(z, dom, -p1, p1)
    solution = solve_or_raise(builder.build(), _smooth_solver(solver), "Smooth max-relative entropy")

    smoothed = w @ (p1 @ solution.X_blocks[z] @ p1.T) @ w.conj().T
    return EntropyValue(
        math.log2(solution.alpha),
        solution,
        {"epsilon": epsilon, "smoothed_state": hermitian_part(smoothed)},
    )


def _witness_state(m: np.ndarray, like) -> QState:
    m = hermitian_part(m)
    if _trace(m) <= 0.0:
        raise InvalidStateError("The smoothing witness is the zero operator")
    layout = like.layout if isinstance(like, QState) else None
    return QState(HermitianOperator(m, validate=False), layout)


def dmin_smoothing_witness(
    rho,
    sigma,
    epsilon: float,
    result: Optional[HypoTestResult] = None,
    solver: Optional[InteriorPointSolver] = None,
) -> QState:
    """
    rho_tilde = Q^{1/2} rho Q^{1/2} with Q an optimal test of
    D_H^{1 - epsilon}(rho || sigma). It lies within purified distance
    sqrt(2 epsilon) of rho and D_min(rho_tilde || sigma) bounds the
    hypothesis testing entropy from above.
    """
    check_epsilon(epsilon, upper_closed=False)
    if result is None:
        result = d_hypo(rho, sigma, 1.0 - epsilon, solver)
    sq = psd_sqrt(result.Q_operator())
    return _witness_state(sq @ as_matrix(rho) @ sq, rho)


def dmax_smoothing_witness(
    rho,
    sigma,
    epsilon: float,
    result: Optional[HypoTestResult] = None,
    solver: Optional[InteriorPointSolver] = None,
) -> QState:
    """
    rho_tilde = G rho G^dagger with G = sigma^{1/2} (sigma + X)^{-1/2}, the
    inverse taken on the support, for dual optimal (mu, X) of
    D_H^epsilon(rho || sigma). Then mu rho_tilde <= sigma.
    """
    check_epsilon(epsilon)
    if result is None:
        result = d_hypo(rho, sigma, epsilon, solver)
    s = as_matrix(sigma)
    g = psd_sqrt(s) @ as_matrix(fn_on_support(hermitian_part(s + result.X_operator()), lambda v: v ** -0.5))
    return _witness_state(g @ as_matrix(rho) @ g.conj().T, rho)


def h_min(
    rho_ab: QState,
    partition,
    sigma_b=None,
    epsilon: float = 0.0,
    solver: Optional[InteriorPointSolver] = None,
) -> EntropyValue:
    """
    Smooth conditional min-entropy H_min^eps(A|B).

    With ``sigma_b`` given this is -D_max^eps(rho_AB || I_A (x) sigma_B).
    Otherwise sigma_B is optimized through

        minimize tr(sigma_B)  s.t.  rho_tilde <= I_A (x) sigma_B

    over the smoothing ball, and the result is -log2 of the optimum. The
    normalized optimal sigma_B is returned in ``info["sigma_b"]``.
    """
    check_epsilon(epsilon, lower_open=False, upper_closed=False)
    if sigma_b is not None:
        sigma = conditioning_operator(rho_ab, partition, sigma_b)
        return -d_max_smooth(rho_ab, sigma, epsilon, solver)

    ordered, a_labels, b_labels = split_state(rho_ab, partition)
    d_a = ordered.layout.dim_of(a_labels)
    d_b = ordered.layout.dim_of(b_labels) if b_labels else 1
    r = ordered.matrix
    n = r.shape[0]
    if epsilon > 0 and ordered.trace <= epsilon ** 2:
        return EntropyValue(math.inf, info={"epsilon": epsilon, "zero_in_ball": True})

    builder = SdpBuilder()
    sig = builder.add_input(d_b)
    builder.set_objective(sig, np.eye(d_b))
    dom = builder.add_output(n, "geq")
    for a in range(d_a):
        builder.add_term(sig, dom, np.kron(np.eye(d_a)[:, [a]], np.eye(d_b)))
    if epsilon == 0:
        builder.set_rhs(dom, r)
    else:
        v, lam = support_isometry(r)
        z, p1 = _add_smoothing_ball(builder, v, lam, n, ordered.trace, epsilon)
        builder.add_term(z, dom, -p1, p1)
    solution = solve_or_raise(builder.build(), _smooth_solver(solver), "Conditional min-entropy")

    alpha = solution.alpha
    return EntropyValue(
        -math.log2(alpha),
        solution,
        {
            "epsilon": epsilon,
            "trace_sigma_b": alpha,
            "sigma_b": hermitian_part(solution.X_blocks[sig]) / alpha,
        },
    )


def h_min_fixed_ratio(rho_ab: QState, partition) -> EntropyValue:
    """H_min(A|B)_{rho|rho} = -D_max(rho_AB || I_A (x) rho_B)."""
    return -d_max(rho_ab, conditioning_operator(rho_ab, partition))


def h_max(
    rho_ab: QState,
    partition,
    epsilon: float = 0.0,
    sigma_b=None,
    solver: Optional[InteriorPointSolver] = None,
) -> EntropyValue:
    """
    Smooth conditional max-entropy, computed as -H_min^eps(A|C) on a
    purification rho_ABC of rho_AB. With ``sigma_b`` the non-smooth fixed
    form -D_min(rho_AB || I_A (x) sigma_B) is returned instead.
    """
    check_epsilon(epsilon, lower_open=False, upper_closed=False)
    if sigma_b is not None:
        if epsilon != 0:
            raise ValueError(f"The fixed sigma_B form is only defined for epsilon = 0, got {epsilon}")
        return -d_min(rho_ab, conditioning_operator(rho_ab, partition, sigma_b))

    if not rho_ab.is_normalized():
        raise InvalidStateError(
            f"Conditional max-entropy needs a normalized state, got trace {rho_ab.trace!r}"
        )
    a_labels, _ = resolve_partition(rho_ab.layout, partition)
    pure = purify(rho_ab, label="R", truncate=True)
    c_label = pure.layout.labels[-1]
    rho_ac = partial_trace(pure, a_labels + [c_label])
    dual = h_min(rho_ac, (a_labels, [c_label]), epsilon=epsilon, solver=solver)
    return EntropyValue(-dual.bits, dual.witness, {"epsilon": epsilon})
