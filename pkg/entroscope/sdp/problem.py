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

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from entroscope.states.quantum_state import HermitianOperator

SENSES = ("min", "max")
BLOCK_SENSES = ("geq", "eq")

HERMITICITY_PROBE_ATOL = 1e-10


@dataclass(frozen=True)
class MapTerm:
    """One term X_in -> left @ X_in @ right^dagger of a block map."""

    in_block: int
    out_block: int
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class SdpProblem:
    """
    Semidefinite program given by a triple (Psi, A, B) over block-diagonal
    complex Hermitian variables.

    With ``sense="min"`` the primal is

        minimize <A, X>  subject to  Psi(X)_i >= B_i  ("geq" blocks),
                                     Psi(X)_i  = B_i  ("eq" blocks),  X >= 0

    and the dual maximizes <B, Y> subject to Psi^*(Y) <= A with Y_i >= 0 on
    "geq" blocks and Y_i free on "eq" blocks, so that beta <= alpha.
    ``sense="max"`` flips every inequality: maximize <A, X> subject to
    Psi(X) <= B, with dual minimize <B, Y> subject to Psi^*(Y) >= A, and
    alpha <= beta.
    """

    input_blocks: Tuple[int, ...]
    output_blocks: Tuple[Tuple[int, str], ...]
    map_terms: Tuple[MapTerm, ...]
    objective: Tuple[np.ndarray, ...]
    rhs: Tuple[np.ndarray, ...]
    sense: str = "min"

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"Invalid sense '{self.sense}', expected one of {SENSES}")
        if len(self.objective) != len(self.input_blocks):
            raise ValueError(
                f"Got {len(self.objective)} objective blocks for {len(self.input_blocks)} inputs"
            )
        if len(self.rhs) != len(self.output_blocks):
            raise ValueError(
                f"Got {len(self.rhs)} right-hand side blocks for {len(self.output_blocks)} outputs"
            )
        for j, (a, n) in enumerate(zip(self.objective, self.input_blocks)):
            if a.shape != (n, n):
                raise ValueError(f"Objective block {j} has shape {a.shape}, expected {(n, n)}")
        for i, (b, (m, kind)) in enumerate(zip(self.rhs, self.output_blocks)):
            if kind not in BLOCK_SENSES:
                raise ValueError(f"Output block {i} has invalid sense '{kind}'")
            if b.shape != (m, m):
                raise ValueError(f"Right-hand side block {i} has shape {b.shape}, expected {(m, m)}")
        for t in self.map_terms:
            n = self.input_blocks[t.in_block]
            m = self.output_blocks[t.out_block][0]
            if t.left.shape != (m, n) or t.right.shape != (m, n):
                raise ValueError(
                    f"Term {t.in_block}->{t.out_block} has shapes {t.left.shape}, "
                    f"{t.right.shape}, expected {(m, n)}"
                )

    @property
    def A(self) -> HermitianOperator:
        return HermitianOperator(scipy.linalg.block_diag(*self.objective), validate=False)

    @property
    def B(self) -> HermitianOperator:
        return HermitianOperator(scipy.linalg.block_diag(*self.rhs), validate=False)

    @property
    def output_sizes(self) -> Tuple[int, ...]:
        return tuple(m for m, _ in self.output_blocks)

    def minimization_form(self) -> "SdpProblem":
        """The equivalent ``sense="min"`` problem, negating A, B and Psi for a max problem."""
        if self.sense == "min":
            return self
        return SdpProblem(
            input_blocks=self.input_blocks,
            output_blocks=self.output_blocks,
            map_terms=tuple(
                MapTerm(t.in_block, t.out_block, -t.left, t.right) for t in self.map_terms
            ),
            objective=tuple(-a for a in self.objective),
            rhs=tuple(-b for b in self.rhs),
            sense="min",
        )

    def apply(self, x_blocks) -> List[np.ndarray]:
        """Psi(X) as a list of output blocks."""
        x_blocks = split_blocks(x_blocks, self.input_blocks)
        out = [np.zeros((m, m), dtype=np.complex128) for m in self.output_sizes]
        for t in self.map_terms:
            out[t.out_block] += t.left @ x_blocks[t.in_block] @ t.right.conj().T
        return out

    def apply_adjoint(self, y_blocks) -> List[np.ndarray]:
        """Psi^*(Y) = sum left^dagger @ Y @ right as a list of input blocks."""
        y_blocks = split_blocks(y_blocks, self.output_sizes)
        out = [np.zeros((n, n), dtype=np.complex128) for n in self.input_blocks]
        for t in self.map_terms:
            out[t.in_block] += t.left.conj().T @ y_blocks[t.out_block] @ t.right
        return out

    def is_hermiticity_preserving(self, seed: int = 0, atol: float = HERMITICITY_PROBE_ATOL) -> bool:
        rng = np.random.default_rng(seed)
        probe = [_random_hermitian(n, rng) for n in self.input_blocks]
        return all(
            np.max(np.abs(y - y.conj().T), initial=0.0) <= atol * max(1.0, np.max(np.abs(y), initial=0.0))
            for y in self.apply(probe)
        )


def _random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def split_blocks(value, sizes: Sequence[int]) -> List[np.ndarray]:
    """Accepts a list of blocks or one block-diagonal matrix."""
    if isinstance(value, HermitianOperator):
        value = value.matrix
    if isinstance(value, np.ndarray) and value.ndim == 2:
        if value.shape != (sum(sizes), sum(sizes)):
            raise ValueError(f"Expected a {sum(sizes)}x{sum(sizes)} operator, got {value.shape}")
        offsets = np.cumsum([0] + list(sizes))
        return [value[a:b, a:b] for a, b in zip(offsets[:-1], offsets[1:])]
    blocks = [np.asarray(v, dtype=np.complex128).reshape(n, n) for v, n in zip(value, sizes)]
    if len(blocks) != len(sizes):
        raise ValueError(f"Expected {len(sizes)} blocks, got {len(blocks)}")
    return blocks


def adjoint(p: SdpProblem) -> Callable:
    """Evaluator Y -> Psi^*(Y), returning the block-diagonal operator."""

    def evaluate(y):
        return scipy.linalg.block_diag(*p.apply_adjoint(y))

    return evaluate


class SdpBuilder:
    """
    Assembles an ``SdpProblem`` block by block.

    Blocks are referred to by the integer returned when they are added.
    Unset objective and right-hand side blocks default to zero.
    """

    def __init__(self):
        self._inputs: List[int] = []
        self._outputs: List[Tuple[int, str]] = []
        self._terms: List[MapTerm] = []
        self._objective: Dict[int, np.ndarray] = {}
        self._rhs: Dict[int, np.ndarray] = {}

    def add_input(self, size: int) -> int:
        if size < 1:
            raise ValueError(f"Invalid input block size {size}")
        self._inputs.append(int(size))
        return len(self._inputs) - 1

    def add_output(self, size: int, sense: str = "geq") -> int:
        if size < 1:
            raise ValueError(f"Invalid output block size {size}")
        if sense not in BLOCK_SENSES:
            raise ValueError(f"Invalid block sense '{sense}', expected one of {BLOCK_SENSES}")
        self._outputs.append((int(size), sense))
        return len(self._outputs) - 1

    def add_term(self, in_block: int, out_block: int, left, right=None) -> "SdpBuilder":
        left = np.atleast_2d(np.asarray(left, dtype=np.complex128))
        right = left if right is None else np.atleast_2d(np.asarray(right, dtype=np.complex128))
        self._terms.append(MapTerm(in_block, out_block, left, right))
        return self

    def add_trace_term(self, in_block: int, out_block: int, weight) -> "SdpBuilder":
        """Adds X -> tr(weight X) into a 1x1 output block."""
        vals, vecs = scipy.linalg.eigh(_hermitian(weight))
        for lam, v in zip(vals, vecs.T):
            if lam == 0.0:
                continue
            row = np.sqrt(abs(lam)) * v.conj().reshape(1, -1)
            self.add_term(in_block, out_block, row, np.sign(lam) * row)
        return self

    def add_scalar_term(self, in_block: int, out_block: int, operator) -> "SdpBuilder":
        """Adds x -> x * operator for a 1x1 input block."""
        vals, vecs = scipy.linalg.eigh(_hermitian(operator))
        for lam, v in zip(vals, vecs.T):
            if lam == 0.0:
                continue
            col = np.sqrt(abs(lam)) * v.reshape(-1, 1)
            self.add_term(in_block, out_block, col, np.sign(lam) * col)
        return self

    def set_objective(self, in_block: int, operator) -> "SdpBuilder":
        self._objective[in_block] = _hermitian(operator)
        return self

    def set_rhs(self, out_block: int, operator) -> "SdpBuilder":
        self._rhs[out_block] = _hermitian(operator)
        return self

    def build(self, sense: str = "min", check: bool = True) -> SdpProblem:
        objective = tuple(
            self._objective.get(j, np.zeros((n, n), dtype=np.complex128))
            for j, n in enumerate(self._inputs)
        )
        rhs = tuple(
            self._rhs.get(i, np.zeros((m, m), dtype=np.complex128))
            for i, (m, _) in enumerate(self._outputs)
        )
        problem = SdpProblem(
            input_blocks=tuple(self._inputs),
            output_blocks=tuple(self._outputs),
            map_terms=tuple(self._terms),
            objective=objective,
            rhs=rhs,
            sense=sense,
        )
        if check and not problem.is_hermiticity_preserving():
            raise ValueError("The assembled map is not Hermiticity-preserving")
        return problem


def _hermitian(x) -> np.ndarray:
    if isinstance(x, HermitianOperator):
        return x.matrix
    m = np.atleast_2d(np.asarray(x, dtype=np.complex128))
    return 0.5 * (m + m.conj().T)


@dataclass
class SdpSolution:
    """
    Primal and dual witnesses of a solved ``SdpProblem``.

    ``alpha`` is the primal objective <A, X> and ``beta`` the dual objective
    <B, Y>, both in the sense of the original problem.
    """

    X_blocks: Tuple[np.ndarray, ...]
    Y_blocks: Tuple[np.ndarray, ...]
    alpha: float
    beta: float
    status: str
    iterations: int
    primal_infeasibility: float
    dual_infeasibility: float
    slacks: Tuple[np.ndarray, ...] = ()
    log: List[dict] = field(default_factory=list)

    @property
    def X(self) -> HermitianOperator:
        return HermitianOperator(scipy.linalg.block_diag(*self.X_blocks), validate=False)

    @property
    def Y(self) -> HermitianOperator:
        return HermitianOperator(scipy.linalg.block_diag(*self.Y_blocks), validate=False)

    @property
    def gap(self) -> float:
        return abs(self.alpha - self.beta)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def residuals(self) -> dict:
        return {
            "primal_infeasibility": self.primal_infeasibility,
            "dual_infeasibility": self.dual_infeasibility,
            "gap": self.gap,
        }


@dataclass
class SolutionReport:
    primal_residual: float
    dual_residual: float
    gap: float
    primal_slackness: float
    dual_slackness: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(
            self.primal_residual,
            self.dual_residual,
            self.primal_slackness,
            self.dual_slackness,
        ) <= self.tolerance and self.gap <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "gap": self.gap,
            "primal_slackness": self.primal_slackness,
            "dual_slackness": self.dual_slackness,
            "passed": self.passed,
        }


def _neg_part(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return max(-float(scipy.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]), 0.0)


def verify_solution(
    p: SdpProblem,
    s: SdpSolution,
    tolerance: float = 1e-6,
    X: Optional[Sequence[np.ndarray]] = None,
    Y: Optional[Sequence[np.ndarray]] = None,
) -> SolutionReport:
    """
    Feasibility, gap and complementary slackness residuals of a solution.

    Slackness is measured as ||(Psi(X) - B) Y|| and ||(A - Psi^*(Y)) X|| in
    spectral norm. ``X`` or ``Y`` override the witnesses stored in ``s``.
    """
    q = p.minimization_form()
    xs = split_blocks(s.X_blocks if X is None else X, q.input_blocks)
    ys = split_blocks(s.Y_blocks if Y is None else Y, q.output_sizes)

    psi_x = q.apply(xs)
    psi_star_y = q.apply_adjoint(ys)

    primal = max((_neg_part(x) for x in xs), default=0.0)
    dual = 0.0
    primal_slack = 0.0
    for (m, kind), px, b, y in zip(q.output_blocks, psi_x, q.rhs, ys):
        excess = px - b
        if kind == "geq":
            primal = max(primal, _neg_part(excess))
            dual = max(dual, _neg_part(y))
        else:
            primal = max(primal, float(np.linalg.norm(excess, 2)))
        primal_slack = max(primal_slack, float(np.linalg.norm(excess @ y, 2)))

    dual_slack = 0.0
    for a, py, x in zip(q.objective, psi_star_y, xs):
        reduced = a - py
        dual = max(dual, _neg_part(reduced))
        dual_slack = max(dual_slack, float(np.linalg.norm(reduced @ x, 2)))

    alpha = sum(float(np.real(np.trace(a @ x))) for a, x in zip(q.objective, xs))
    beta = sum(float(np.real(np.trace(b @ y))) for b, y in zip(q.rhs, ys))
    return SolutionReport(
        primal_residual=primal,
        dual_residual=dual,
        gap=abs(alpha - beta) / (1.0 + abs(alpha)),
        primal_slackness=primal_slack,
        dual_slackness=dual_slack,
        tolerance=tolerance,
    )
