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

import logging
from typing import List, Optional, Union

import numpy as np
import scipy.linalg

from entroscope.log import create_module_logger, get_library_logger
from entroscope.sdp.problem import SdpProblem, SdpSolution

# Homogeneous residual ratio beyond which a problem is declared infeasible
INFEASIBILITY_RATIO = 1e8
STEP_FRACTION = 0.98
MIN_STEP = 1e-8


class SolverFailure(RuntimeError):
    """Raised by callers that need an optimal solution and did not get one."""

    def __init__(self, message: str, solution: Optional[SdpSolution] = None):
        super().__init__(message)
        self.solution = solution


def embed(h: np.ndarray) -> np.ndarray:
    """Real symmetric image [[Re, -Im], [Im, Re]] of (a stack of) Hermitian matrices."""
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def deembed(w: np.ndarray) -> np.ndarray:
    n = w.shape[-1] // 2
    p, r = w[..., :n, :n], w[..., n:, n:]
    q12, q21 = w[..., :n, n:], w[..., n:, :n]
    h = 0.5 * (p + r) + 0.5j * (q21 - q12)
    return 0.5 * (h + np.swapaxes(h.conj(), -1, -2))


def hermitian_basis(m: int) -> np.ndarray:
    """
    Orthonormal basis of the m x m Hermitian matrices under tr(E_k E_l):
    E_jj, (E_jk + E_kj)/sqrt(2) and i(E_jk - E_kj)/sqrt(2) for j < k.
    """
    basis = np.zeros((m * m, m, m), dtype=np.complex128)
    k = 0
    for j in range(m):
        basis[k, j, j] = 1.0
        k += 1
    s = 1.0 / np.sqrt(2.0)
    for j in range(m):
        for l in range(j + 1, m):
            basis[k, j, l] = basis[k, l, j] = s
            k += 1
            basis[k, j, l] = 1j * s
            basis[k, l, j] = -1j * s
            k += 1
    return basis


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


class _Block:
    """One real symmetric cone block with its active constraint matrices."""

    def __init__(self, size: int, index: np.ndarray, F: np.ndarray, C: np.ndarray):
        self.size = size
        self.index = index
        self.F = F
        self.C = C
        self.F_flat = F.reshape(len(index), -1)


class _StandardForm:
    """
    Real standard form  min <C, W>  s.t.  <F_k, W> = b_k,  W >= 0  of a
    minimization ``SdpProblem``.

    Constraints are the coordinates of each output block in an orthonormal
    Hermitian basis. Input blocks come first, then one slack block per
    "geq" output block.
    """

    def __init__(self, p: SdpProblem):
        self.problem = p
        self.bases = [hermitian_basis(m) for m in p.output_sizes]
        offsets = np.cumsum([0] + [m * m for m in p.output_sizes])
        self.offsets = offsets
        self.n_constraints = int(offsets[-1])

        self.b = np.concatenate(
            [
                np.real(np.einsum("kab,ba->k", e, rhs))
                for e, rhs in zip(self.bases, p.rhs)
            ]
        ) if self.n_constraints else np.zeros(0)

        self.blocks: List[_Block] = []
        for j, n in enumerate(p.input_blocks):
            self.blocks.append(self._input_block(j, n))
        self.n_inputs = len(self.blocks)
        self.slack_of = {}
        for i, (m, kind) in enumerate(p.output_blocks):
            if kind != "geq":
                continue
            index = np.arange(offsets[i], offsets[i + 1])
            F = -0.5 * embed(self.bases[i])
            self.slack_of[i] = len(self.blocks)
            self.blocks.append(_Block(2 * m, index, F, np.zeros((2 * m, 2 * m))))

        self.norm_b = float(np.linalg.norm(self.b))
        self.norm_C = float(np.sqrt(sum(np.sum(blk.C ** 2) for blk in self.blocks)))

    def _input_block(self, j: int, n: int) -> _Block:
        p = self.problem
        index, stacks = [], []
        for i, m in enumerate(p.output_sizes):
            terms = [t for t in p.map_terms if t.in_block == j and t.out_block == i]
            if not terms:
                continue
            e = self.bases[i]
            g = np.zeros((m * m, n, n), dtype=np.complex128)
            for t in terms:
                g += t.left.conj().T @ e @ t.right
            g = 0.5 * (g + np.swapaxes(g.conj(), -1, -2))
            stacks.append(0.5 * embed(g))
            index.append(np.arange(self.offsets[i], self.offsets[i + 1]))
        if stacks:
            F = np.concatenate(stacks, axis=0)
            index = np.concatenate(index)
        else:
            F = np.zeros((0, 2 * n, 2 * n))
            index = np.zeros(0, dtype=np.int64)
        return _Block(2 * n, index, F, 0.5 * embed(p.objective[j]))

    def op(self, W) -> np.ndarray:
        out = np.zeros(self.n_constraints)
        for blk, w in zip(self.blocks, W):
            if len(blk.index):
                out[blk.index] += blk.F_flat @ w.reshape(-1)
        return out

    def op_adjoint(self, y) -> List[np.ndarray]:
        out = []
        for blk in self.blocks:
            if len(blk.index):
                out.append(np.tensordot(y[blk.index], blk.F, axes=1))
            else:
                out.append(np.zeros((blk.size, blk.size)))
        return out


def _inner(U, V) -> float:
    return float(sum(np.sum(u * v) for u, v in zip(U, V)))


def _frob(U) -> float:
    return float(np.sqrt(sum(np.sum(u * u) for u in U)))


def _inverse_spd(z: np.ndarray) -> np.ndarray:
    factor = scipy.linalg.cho_factor(z, lower=True)
    return _sym(scipy.linalg.cho_solve(factor, np.eye(z.shape[0])))


def _max_step(X, dX) -> float:
    """Largest alpha with X + alpha dX positive semidefinite, infinite if unbounded."""
    alpha = np.inf
    for x, dx in zip(X, dX):
        try:
            L = scipy.linalg.cholesky(x, lower=True)
        except np.linalg.LinAlgError:
            return 0.0
        t = scipy.linalg.solve_triangular(L, dx, lower=True)
        t = scipy.linalg.solve_triangular(L, t.T, lower=True).T
        lam = scipy.linalg.eigvalsh(_sym(t))[0]
        if lam < 0:
            alpha = min(alpha, -1.0 / lam)
    return alpha


class InteriorPointSolver:
    """
    Dense primal-dual path following solver with the HKM search direction
    and Mehrotra's predictor-corrector.

    Complex Hermitian blocks are solved as real symmetric blocks through
    the embedding H -> [[Re H, -Im H], [Im H, Re H]] and mapped back.

    Args:
        gap_tol: Relative duality gap |alpha - beta| / (1 + |alpha|) at exit.
        feas_tol: Relative primal and dual residuals at exit.
        max_iter: Iteration cap. Runs that stall or reach it before meeting
            both tolerances are numerical failures.
        logger: A LoggerAdapter or a log directory. None logs through the
            ``entroscope`` library logger.
    """

    def __init__(
        self,
        gap_tol: float = 1e-7,
        feas_tol: float = 1e-8,
        max_iter: int = 200,
        logger: Union[logging.LoggerAdapter, str, None] = None,
    ):
        if gap_tol <= 0 or feas_tol <= 0:
            raise ValueError(f"Tolerances must be positive, got {gap_tol}, {feas_tol}")
        if max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {max_iter}")
        self.gap_tol = gap_tol
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        if logger is None:
            self._logger = get_library_logger("entroscope.sdp")
        else:
            self._logger = create_module_logger(logger, "InteriorPointSolver")

    def _initial_point(self, sf: _StandardForm):
        W, Z = [], []
        for blk in sf.blocks:
            n = blk.size
            norms = np.linalg.norm(blk.F_flat, axis=1) if len(blk.index) else np.zeros(0)
            b = np.abs(sf.b[blk.index]) if len(blk.index) else np.zeros(0)
            xi_p = max(10.0, np.sqrt(n), n * np.max((1.0 + b) / (1.0 + norms), initial=0.0))
            xi_d = max(
                10.0,
                np.sqrt(n),
                np.max(norms, initial=0.0),
                float(np.linalg.norm(blk.C)),
            )
            W.append(xi_p * np.eye(n))
            Z.append(xi_d * np.eye(n))
        return W, np.zeros(sf.n_constraints), Z

    def _schur(self, sf: _StandardForm, W, Zinv) -> np.ndarray:
        M = np.zeros((sf.n_constraints, sf.n_constraints))
        for blk, w, zi in zip(sf.blocks, W, Zinv):
            if not len(blk.index):
                continue
            G = w @ blk.F @ zi
            # <F_k, G_l> with F_k symmetric
            M[np.ix_(blk.index, blk.index)] += blk.F_flat @ np.swapaxes(G, 1, 2).reshape(
                len(blk.index), -1
            ).T
        return _sym(M)

    @staticmethod
    def _factor(M: np.ndarray):
        try:
            factor = scipy.linalg.cho_factor(M, lower=True)
            return lambda r: scipy.linalg.cho_solve(factor, r)
        except np.linalg.LinAlgError:
            return lambda r: scipy.linalg.lstsq(M, r)[0]

    def solve(self, problem: SdpProblem) -> SdpSolution:
        q = problem.minimization_form()
        sf = _StandardForm(q)
        n_total = sum(blk.size for blk in sf.blocks)
        W, y, Z = self._initial_point(sf)

        history = []
        status = "numerical_failure"
        stalled = False
        pinf = dinf = np.inf
        it = 0
        for it in range(self.max_iter + 1):
            rp = sf.b - sf.op(W)
            ATy = sf.op_adjoint(y)
            Rd = [blk.C - z - a for blk, z, a in zip(sf.blocks, Z, ATy)]
            pobj = _inner([blk.C for blk in sf.blocks], W)
            dobj = float(sf.b @ y)
            complementarity = _inner(W, Z)
            mu = complementarity / n_total
            pinf = float(np.linalg.norm(rp)) / (1.0 + sf.norm_b)
            dinf = _frob(Rd) / (1.0 + sf.norm_C)
            relgap = max(abs(pobj - dobj), complementarity) / (1.0 + abs(pobj))

            entry = {
                "iteration": it,
                "primal_objective": pobj,
                "dual_objective": dobj,
                "gap": relgap,
                "primal_infeasibility": pinf,
                "dual_infeasibility": dinf,
                "mu": mu,
            }
            history.append(entry)
            self._logger.debug(
                f"iter {it:3d} pobj {pobj: .9e} dobj {dobj: .9e} gap {relgap:.2e} "
                f"pinf {pinf:.2e} dinf {dinf:.2e} mu {mu:.2e}"
            )

            if relgap <= self.gap_tol and pinf <= self.feas_tol and dinf <= self.feas_tol:
                status = "optimal"
                break

            ray_dual = _frob([a + z for a, z in zip(ATy, Z)])
            if dobj > 0 and dobj > INFEASIBILITY_RATIO * ray_dual:
                status = "infeasible"
                break
            norm_AW = float(np.linalg.norm(sf.op(W)))
            if pobj < 0 and -pobj > INFEASIBILITY_RATIO * norm_AW:
                status = "infeasible"
                break

            # Only the exit test above may declare a run optimal
            if stalled or it == self.max_iter:
                break

            try:
                Zinv = [_inverse_spd(z) for z in Z]
            except np.linalg.LinAlgError:
                stalled = True
                continue
            solve_schur = self._factor(self._schur(sf, W, Zinv))

            def direction(Rc):
                r = rp - sf.op([rc - w @ rd @ zi for rc, w, rd, zi in zip(Rc, W, Rd, Zinv)])
                dy = solve_schur(r)
                dZ = [rd - a for rd, a in zip(Rd, sf.op_adjoint(dy))]
                dW = [_sym(rc - w @ dz @ zi) for rc, w, dz, zi in zip(Rc, W, dZ, Zinv)]
                return dW, dy, dZ

            # predictor
            dW_a, _, dZ_a = direction([-w for w in W])
            ap = min(1.0, _max_step(W, dW_a))
            ad = min(1.0, _max_step(Z, dZ_a))
            mu_aff = _inner(
                [w + ap * dw for w, dw in zip(W, dW_a)],
                [z + ad * dz for z, dz in zip(Z, dZ_a)],
            ) / n_total
            sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0)) if mu > 0 else 0.0

            # corrector
            Rc = [
                sigma * mu * zi - w - dwa @ dza @ zi
                for zi, w, dwa, dza in zip(Zinv, W, dW_a, dZ_a)
            ]
            dW, dy, dZ = direction(Rc)
            ap = min(1.0, STEP_FRACTION * _max_step(W, dW))
            ad = min(1.0, STEP_FRACTION * _max_step(Z, dZ))
            entry["step_primal"], entry["step_dual"] = ap, ad

            W = [_sym(w + ap * dw) for w, dw in zip(W, dW)]
            y = y + ad * dy
            Z = [_sym(z + ad * dz) for z, dz in zip(Z, dZ)]
            stalled = max(ap, ad) < MIN_STEP

        solution = self._to_solution(problem, sf, W, y, status, it, pinf, dinf, history)
        message = (
            f"SDP {status} after {it} iterations: alpha {solution.alpha:.10g}, "
            f"beta {solution.beta:.10g}, pinf {pinf:.2e}, dinf {dinf:.2e}"
        )
        if status == "optimal":
            self._logger.info(message)
        else:
            self._logger.warning(message)
        return solution

    def _to_solution(self, problem, sf, W, y, status, it, pinf, dinf, history) -> SdpSolution:
        q = sf.problem
        X_blocks = tuple(deembed(W[j]) for j in range(sf.n_inputs))
        Y_blocks = tuple(
            np.tensordot(y[sf.offsets[i]:sf.offsets[i + 1]], e, axes=1)
            for i, e in enumerate(sf.bases)
        )
        slacks = tuple(
            deembed(W[sf.slack_of[i]]) if i in sf.slack_of else np.zeros((m, m), dtype=np.complex128)
            for i, m in enumerate(q.output_sizes)
        )
        sign = 1.0 if problem.sense == "min" else -1.0
        alpha = sign * sum(float(np.real(np.trace(a @ x))) for a, x in zip(q.objective, X_blocks))
        beta = sign * sum(float(np.real(np.trace(b @ yb))) for b, yb in zip(q.rhs, Y_blocks))
        return SdpSolution(
            X_blocks=X_blocks,
            Y_blocks=Y_blocks,
            alpha=alpha,
            beta=beta,
            status=status,
            iterations=it,
            primal_infeasibility=pinf,
            dual_infeasibility=dinf,
            slacks=slacks,
            log=history,
        )


def solve(
    p: SdpProblem,
    gap_tol: float = 1e-7,
    feas_tol: float = 1e-8,
    max_iter: int = 200,
    logger: Union[logging.LoggerAdapter, str, None] = None,
) -> SdpSolution:
    return InteriorPointSolver(gap_tol, feas_tol, max_iter, logger).solve(p)
