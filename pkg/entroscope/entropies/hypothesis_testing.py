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

import dataclasses
import math
from typing import Optional

import numpy as np
import scipy.linalg

from entroscope.entropies.entropy_value import EntropyValue, HypoTestResult
from entroscope.sdp.problem import SdpBuilder, SdpProblem, SdpSolution
from entroscope.sdp.solver import InteriorPointSolver, SolverFailure
from entroscope.states.quantum_state import PSD_RTOL, InvalidStateError, QState
from entroscope.utils.linalg_utils import (
    SUPPORT_CUTOFF,
    as_matrix,
    hermitian_part,
    max_eigenvalue,
    min_eigenvalue,
    support_projector,
)
from entroscope.utils.state_utils import conditioning_operator

# Optimal type-II errors at or below this count as zero (D_H = +inf)
ZERO_ERROR_ATOL = 1e-14
# Slack on the tr(rho) >= epsilon feasibility precheck
TRACE_FEASIBILITY_ATOL = 1e-12

# The D_H solve only locates the multiplier mu
HYPOTHESIS_GAP_TOL = 1e-8
HYPOTHESIS_FEAS_TOL = 1e-9
# Relative primal/dual disagreement at which a refined result is rejected
CERTIFICATE_RTOL = 1e-7
# Eigenvalues of mu rho - sigma within this fraction of its norm count as zero
SPECTRAL_NOISE_RTOL = 1e-13
# Relative half-width of the first bracket around the solver multiplier
MULTIPLIER_BRACKET = 1e-6
MULTIPLIER_BISECTIONS = 200
MULTIPLIER_GROWTH = 10.0
MULTIPLIER_GAP_RTOL = 1e-10
MAX_MULTIPLIER = 1e12


def default_solver(solver: Optional[InteriorPointSolver] = None) -> InteriorPointSolver:
    if solver is not None:
        return solver
    return InteriorPointSolver(gap_tol=HYPOTHESIS_GAP_TOL, feas_tol=HYPOTHESIS_FEAS_TOL)


def solve_or_raise(problem: SdpProblem, solver: InteriorPointSolver, what: str) -> SdpSolution:
    solution = solver.solve(problem)
    if not solution.optimal:
        raise SolverFailure(
            f"{what}: solver returned '{solution.status}' after {solution.iterations} iterations",
            solution,
        )
    return solution


def check_epsilon(epsilon: float, lower_open: bool = True, upper_closed: bool = True):
    ok_low = epsilon > 0 if lower_open else epsilon >= 0
    ok_high = epsilon <= 1 if upper_closed else epsilon < 1
    if not (ok_low and ok_high):
        lo = "(0" if lower_open else "[0"
        hi = "1]" if upper_closed else "1)"
        raise ValueError(f"epsilon must lie in {lo}, {hi}, got {epsilon!r}")


def check_psd(sigma, name: str = "sigma") -> np.ndarray:
    s = hermitian_part(as_matrix(sigma))
    top = max(max_eigenvalue(s), 0.0)
    if min_eigenvalue(s) < -PSD_RTOL * max(top, 1.0):
        raise InvalidStateError(f"{name} is not positive semidefinite")
    return s


def _check_pair(rho, sigma):
    r = as_matrix(rho)
    s = check_psd(sigma)
    if r.shape != s.shape:
        raise InvalidStateError(f"Dimension mismatch: rho is {r.shape}, sigma is {s.shape}")
    return r, s


def hypothesis_test_problem(rho: np.ndarray, sigma: np.ndarray, epsilon: float) -> SdpProblem:
    """
    The type-II error program in the variable Q' = Q / epsilon:

        minimize tr(sigma Q')  s.t.  tr(rho Q') >= 1,  -Q' >= -I / epsilon,  Q' >= 0

    with dual maximize mu - tr(X) / epsilon  s.t.  mu rho - X <= sigma.
    """
    n = rho.shape[0]
    builder = SdpBuilder()
    q = builder.add_input(n)
    success = builder.add_output(1, "geq")
    bound = builder.add_output(n, "geq")
    builder.add_trace_term(q, success, rho)
    builder.set_rhs(success, np.ones((1, 1)))
    builder.add_term(q, bound, -np.eye(n), np.eye(n))
    builder.set_rhs(bound, -np.eye(n) / epsilon)
    builder.set_objective(q, sigma)
    return builder.build()


def slackness_residuals(rho, sigma, epsilon, Q, mu, X, dual_slack=None) -> dict:
    """
    Residuals of (sigma + X - mu rho) Q = 0, tr[Q rho] = epsilon,
    (I - Q) X = 0 and [Q, X] = 0. ``dual_slack`` is sigma + X - mu rho when
    the caller holds it without cancellation.
    """
    n = Q.shape[0]
    if dual_slack is None:
        dual_slack = sigma + X - mu * rho
    rho_q = float(np.real(np.trace(Q @ rho)))
    return {
        "stationarity": float(np.linalg.norm(dual_slack @ Q, 2)),
        "success_probability": abs(rho_q - epsilon) if mu > 0 else 0.0,
        "test_support": float(np.linalg.norm((np.eye(n) - Q) @ X, 2)),
        "commutator": float(np.linalg.norm(Q @ X - X @ Q, 2)),
    }


def _infinite_result(rho, sigma, epsilon, Q) -> HypoTestResult:
    n = rho.shape[0]
    X = np.zeros((n, n), dtype=np.complex128)
    return HypoTestResult(
        value=math.inf,
        epsilon=epsilon,
        Q=Q,
        mu=0.0,
        X=X,
        primal_value=0.0,
        dual_value=0.0,
        slackness=slackness_residuals(rho, sigma, epsilon, Q, 0.0, X),
    )


def _spectrum(r, s, mu):
    """Eigenpairs of mu rho - sigma in decreasing order with the weights <v|rho|v>."""
    vals, vecs = scipy.linalg.eigh(hermitian_part(mu * r - s))
    vals, vecs = vals[::-1], vecs[:, ::-1]
    weights = np.real(np.sum(vecs.conj() * (r @ vecs), axis=0))
    positive = vals > SPECTRAL_NOISE_RTOL * max(np.max(np.abs(vals)), 1.0)
    return vals, vecs, np.maximum(weights, 0.0), positive


def _positive_mass(r, s, mu) -> float:
    _, _, weights, positive = _spectrum(r, s, mu)
    return float(np.sum(weights[positive]))


def optimal_multiplier(r, s, epsilon: float, mu_hint: float = 1.0) -> float:
    """
    Smallest mu with tr(rho {mu rho > sigma}) >= epsilon, located by bisection.

    The mass tr(rho {mu rho > sigma}) is the derivative of the convex map
    mu -> tr(mu rho - sigma)_+, hence nondecreasing in mu, and the dual
    objective mu - tr(mu rho - sigma)_+ / epsilon is maximal where it
    crosses epsilon.
    """
    mu_hint = max(float(mu_hint), 0.0) if math.isfinite(mu_hint) else 1.0
    lo, hi = 0.0, max(mu_hint * (1.0 + MULTIPLIER_BRACKET), MULTIPLIER_BRACKET)
    while _positive_mass(r, s, hi) < epsilon:
        lo, hi = hi, 2.0 * hi
        if hi > MAX_MULTIPLIER:
            raise SolverFailure(f"Hypothesis test: no multiplier below {MAX_MULTIPLIER:g} reaches {epsilon}")
    below = mu_hint * (1.0 - MULTIPLIER_BRACKET)
    if lo < below < hi and _positive_mass(r, s, below) < epsilon:
        lo = below
    for _ in range(MULTIPLIER_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if _positive_mass(r, s, mid) >= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def neyman_pearson_witnesses(r, s, epsilon: float, mu: float):
    """
    Test and dual certificate of the D_H program at multiplier ``mu``.

    Q fills the eigenvectors of mu rho - sigma by decreasing eigenvalue until
    tr(Q rho) = epsilon, taking the last one fractionally. X is the positive
    part and Z = sigma + X - mu rho the negative part of mu rho - sigma, so
    Q, X and Z share one eigenbasis.

    Returns:
        (Q, X, Z)
    """
    vals, vecs, weights, positive = _spectrum(r, s, mu)
    q = np.zeros_like(vals)
    remaining = epsilon
    for i in np.flatnonzero(positive):
        if remaining <= 0:
            break
        if weights[i] <= 0:
            continue
        q[i] = min(1.0, remaining / weights[i])
        remaining -= q[i] * weights[i]

    def compose(diagonal):
        return hermitian_part((vecs * diagonal) @ vecs.conj().T)

    return compose(q), compose(np.maximum(vals, 0.0)), compose(np.maximum(-vals, 0.0))


def _certified_result(r, s, epsilon, Q, mu, X, Z, dual, solution=None) -> HypoTestResult:
    primal = float(np.real(np.trace(Q @ s))) / epsilon
    if abs(primal - dual) > CERTIFICATE_RTOL * (1.0 + abs(primal)):
        raise SolverFailure(
            f"Hypothesis test: witnesses disagree, primal {primal:.12g} vs dual {dual:.12g}", solution
        )
    value = math.inf if primal <= ZERO_ERROR_ATOL else -math.log2(primal)
    return HypoTestResult(
        value=value,
        epsilon=epsilon,
        Q=Q,
        mu=mu,
        X=X,
        primal_value=primal,
        dual_value=dual,
        slackness=slackness_residuals(r, s, epsilon, Q, mu, X, dual_slack=Z),
        solution=solution,
    )


def _full_success_result(r, s, epsilon) -> HypoTestResult:
    """
    epsilon = tr(rho): every feasible test acts as the identity on supp(rho),
    so Q = rho^0 and the value is -log2(tr(rho^0 sigma) / epsilon).

    In a basis (supp rho, ker rho) with mu rho - sigma = [[M, B], [B^dagger, -K]],
    the certificate X = [[M, B], [B^dagger, B^dagger M^-1 B]] is feasible once
    M > 0 and leaves the gap tr(B^dagger M^-1 B) / epsilon, which vanishes as
    mu grows. For B = 0 the dual optimum is attained and the gap is zero.
    """
    vals, vecs = scipy.linalg.eigh(hermitian_part(r))
    inside = vals > SUPPORT_CUTOFF * max(np.max(np.abs(vals)), ZERO_ERROR_ATOL)
    v_s, v_k = vecs[:, inside], vecs[:, ~inside]
    Q = hermitian_part(v_s @ v_s.conj().T)
    r_s = hermitian_part(v_s.conj().T @ r @ v_s)
    s_s = hermitian_part(v_s.conj().T @ s @ v_s)
    success = float(np.real(np.trace(r_s)))

    # Smallest mu with mu r_s >= s_s
    mu = max(float(scipy.linalg.eigh(s_s, r_s, eigvals_only=True)[-1]), 0.0)
    mu = 2.0 * mu + 1.0
    primal = float(np.real(np.trace(s_s))) / success
    while True:
        a = hermitian_part(mu * r - s)
        m = hermitian_part(v_s.conj().T @ a @ v_s)
        b = v_s.conj().T @ a @ v_k
        if b.size:
            schur = hermitian_part(b.conj().T @ scipy.linalg.solve(m, b, assume_a="pos"))
        else:
            schur = np.zeros((v_k.shape[1], v_k.shape[1]), dtype=np.complex128)
        gap = float(np.real(np.trace(schur))) / success
        if gap <= MULTIPLIER_GAP_RTOL * (1.0 + abs(primal)) or mu * MULTIPLIER_GROWTH > MAX_MULTIPLIER:
            break
        mu *= MULTIPLIER_GROWTH

    w = np.concatenate([v_s, v_k], axis=1)
    X = hermitian_part(w @ np.block([[m, b], [b.conj().T, schur]]) @ w.conj().T)
    Z = hermitian_part(v_k @ (schur - v_k.conj().T @ a @ v_k) @ v_k.conj().T)
    result = _certified_result(r, s, success, Q, mu, X, Z, primal - gap)
    return dataclasses.replace(result, epsilon=epsilon)


def d_hypo(
    rho: QState,
    sigma,
    epsilon: float,
    solver: Optional[InteriorPointSolver] = None,
) -> HypoTestResult:
    """
    Hypothesis testing relative entropy

        D_H^eps(rho || sigma) = -log2( min { tr(Q sigma) / eps : 0 <= Q <= I, tr(Q rho) >= eps } )

    The interior point solve gives a first estimate of the optimal dual
    multiplier mu, refined by bisection on the spectrum of mu rho - sigma
    whether or not the solver met its tolerances. The returned test and
    certificate are built in that eigenbasis and their values must agree
    before a result is returned. The solver diagnostics stay attached as
    ``solution``.

    Args:
        rho: Subnormalized state with tr(rho) >= epsilon.
        sigma: Positive semidefinite operator of the same dimension.
        epsilon: Success probability on rho, in (0, 1].
        solver: Interior point solver for the D_H program.
    Returns:
        A HypoTestResult.
    Raises:
        SolverFailure: The program was reported infeasible or the
            certificate does not close the duality gap.
    """
    check_epsilon(epsilon)
    r, s = _check_pair(rho, sigma)
    trace_rho = float(np.real(np.trace(r)))
    if trace_rho < epsilon - TRACE_FEASIBILITY_ATOL:
        raise ValueError(
            f"No test reaches success probability {epsilon} on a state of trace {trace_rho:.12g}"
        )

    # Tests supported off supp(sigma) have zero type-II error
    kernel = np.eye(r.shape[0]) - as_matrix(support_projector(s))
    if float(np.real(np.trace(kernel @ r))) >= epsilon - TRACE_FEASIBILITY_ATOL:
        return _infinite_result(r, s, epsilon, kernel)

    if epsilon >= trace_rho - TRACE_FEASIBILITY_ATOL:
        return _full_success_result(r, s, epsilon)

    solution = default_solver(solver).solve(hypothesis_test_problem(r, s, epsilon))
    if solution.status == "infeasible":
        raise SolverFailure("Hypothesis test: solver reported an infeasible program", solution)
    mu = optimal_multiplier(r, s, epsilon, float(np.real(solution.Y_blocks[0][0, 0])))
    Q, X, Z = neyman_pearson_witnesses(r, s, epsilon, mu)
    dual = mu - float(np.real(np.trace(X))) / epsilon
    return _certified_result(r, s, epsilon, Q, mu, X, Z, dual, solution)


def d_hypo_classical(p, q, epsilon: float) -> HypoTestResult:
    """
    Exact D_H^eps for commuting inputs given as nonnegative vectors, by the
    Neyman-Pearson fractional knapsack: include outcomes by decreasing
    likelihood ratio p/q until the success probability reaches epsilon.
    ``Q`` and ``X`` of the result are diagonals.
    """
    check_epsilon(epsilon)
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    if p.shape != q.shape:
        raise InvalidStateError(f"Dimension mismatch: {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise InvalidStateError("Classical inputs must be nonnegative")
    if p.sum() < epsilon - TRACE_FEASIBILITY_ATOL:
        raise ValueError(
            f"No test reaches success probability {epsilon} on a distribution of mass {p.sum():.12g}"
        )

    free = (q == 0) & (p > 0)
    if p[free].sum() >= epsilon - TRACE_FEASIBILITY_ATOL:
        Q = free.astype(np.float64)
        return HypoTestResult(
            value=math.inf, epsilon=epsilon, Q=Q, mu=0.0, X=np.zeros_like(p),
            primal_value=0.0, dual_value=0.0,
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(q > 0, p / q, np.where(p > 0, np.inf, 0.0))
    order = np.argsort(-ratio, kind="stable")
    cumulative = np.cumsum(p[order])
    k = int(np.argmax(cumulative >= epsilon - TRACE_FEASIBILITY_ATOL))
    Q = np.zeros_like(p)
    Q[order[:k]] = 1.0
    threshold = order[k]
    before = cumulative[k - 1] if k > 0 else 0.0
    Q[threshold] = min(max((epsilon - before) / p[threshold], 0.0), 1.0)

    mu = q[threshold] / p[threshold]
    X = np.maximum(mu * p - q, 0.0)
    primal = float(Q @ q) / epsilon
    dual = mu - float(X.sum()) / epsilon
    success = float(Q @ p)
    return HypoTestResult(
        value=-math.log2(primal),
        epsilon=epsilon,
        Q=Q,
        mu=mu,
        X=X,
        primal_value=primal,
        dual_value=dual,
        slackness={
            "stationarity": float(np.max(np.abs((q + X - mu * p) * Q))),
            "success_probability": abs(success - epsilon),
            "test_support": float(np.max(np.abs((1.0 - Q) * X))),
            "commutator": 0.0,
        },
    )


def h_hypo(
    rho_ab: QState,
    partition,
    epsilon: float,
    solver: Optional[InteriorPointSolver] = None,
) -> EntropyValue:
    """H_H^eps(A|B) = -D_H^eps(rho_AB || I_A (x) rho_B) for a normalized rho_AB."""
    if not rho_ab.is_normalized():
        raise InvalidStateError(
            f"Conditional entropies need a normalized state, got trace {rho_ab.trace!r}"
        )
    sigma = conditioning_operator(rho_ab, partition)
    result = d_hypo(rho_ab, sigma, epsilon, solver)
    return EntropyValue(-result.value, result, {"epsilon": epsilon})


def trace_distance_sdp(
    rho,
    sigma,
    solver: Optional[InteriorPointSolver] = None,
) -> float:
    """
    max { tr[P (rho - sigma)] : 0 <= P <= I } with the arguments ordered so
    that tr(rho) >= tr(sigma). For subnormalized states this equals the
    generalized trace distance.
    """
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise InvalidStateError(f"Dimension mismatch: {r.shape} vs {s.shape}")
    if np.real(np.trace(r)) < np.real(np.trace(s)):
        r, s = s, r
    n = r.shape[0]
    builder = SdpBuilder()
    p = builder.add_input(n)
    bound = builder.add_output(n, "geq")
    builder.add_term(p, bound, -np.eye(n), np.eye(n))
    builder.set_rhs(bound, -np.eye(n))
    builder.set_objective(p, s - r)
    solution = solve_or_raise(builder.build(), default_solver(solver), "Trace distance")
    return -solution.alpha
