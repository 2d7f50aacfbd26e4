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
import importlib
import logging
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from dask import delayed

from entroscope.entropies.entropy_value import EntropyValue, HypoTestResult, bits_to_json
from entroscope.entropies.hypothesis_testing import (
    d_hypo,
    d_hypo_classical,
    h_hypo,
    trace_distance_sdp,
)
from entroscope.log import create_module_logger
from entroscope.sdp.solver import InteriorPointSolver, SolverFailure
from entroscope.states.quantum_state import QState
from entroscope.utils.distributed_utils import compute_tasks
from entroscope.utils.file_utils import state_to_dict

# Trial index given to the fixed anchor instances of a check
ANCHOR_TRIAL = -1
# Errors recorded as a failed trial instead of aborting the run. InvalidStateError
# and UnknownSubsystemError derive from ValueError and KeyError.
TRIAL_ERRORS = (SolverFailure, np.linalg.LinAlgError, ValueError, KeyError, ArithmeticError)


class UnknownCheckError(KeyError):
    pass


@dataclass
class CheckConfig:
    """
    Sampling parameters shared by every check.

    seed: Master seed. Trial i draws from SeedSequence(seed).spawn(trials)[i].
    trials: Number of random trials.
    dims: Subsystem dimensions sampled by the trials, each at least 2.
    epsilons: Values of epsilon sampled by the trials, each in (0, 1).
    tolerance: A relation is violated when its margin is below -tolerance.
    n_workers: Threads running trials, see ``get_num_workers``.
    """

    seed: int = 42
    trials: int = 100
    dims: Tuple[int, ...] = (2, 3)
    epsilons: Tuple[float, ...] = (0.05, 0.1, 0.25, 0.5)
    tolerance: float = 1e-6
    n_workers: Optional[int] = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.epsilons = tuple(float(e) for e in self.epsilons)
        if int(self.trials) < 0:
            raise ValueError(f"trials must be nonnegative, got {self.trials}")
        self.trials = int(self.trials)
        if not self.dims or any(d < 2 for d in self.dims):
            raise ValueError(f"Check dimensions must be at least 2, got {list(self.dims)}")
        if not self.epsilons or any(not 0 < e < 1 for e in self.epsilons):
            raise ValueError(f"Check epsilons must lie in (0, 1), got {list(self.epsilons)}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.tolerance}")

    def replace(self, **changes) -> "CheckConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "dims": list(self.dims),
            "epsilons": list(self.epsilons),
            "tolerance": self.tolerance,
        }


def relation_margin(lower: float, upper: float) -> float:
    """
    Slack of ``lower <= upper``. Equal infinities give 0 and a NaN on
    either side gives -inf.
    """
    lower, upper = float(lower), float(upper)
    if math.isnan(lower) or math.isnan(upper):
        return -math.inf
    if lower == upper:
        return 0.0
    return upper - lower


@dataclass
class TrialOutcome:
    """Margins of one trial, keyed by relation name."""

    trial: int
    margins: Dict[str, float] = field(default_factory=dict)
    skipped: int = 0
    failures: List[str] = field(default_factory=list)
    instance: Dict[str, Any] = field(default_factory=dict)

    def record(self, relation: str, lower: float, upper: float) -> float:
        margin = relation_margin(lower, upper)
        self.margins[relation] = min(self.margins.get(relation, math.inf), margin)
        return margin

    def record_equal(self, relation: str, value: float, expected: float):
        self.record(f"{relation}_lower", expected, value)
        self.record(f"{relation}_upper", value, expected)

    def skip(self, relation: str):
        self.skipped += 1

    def fail(self, relation: str, error: Exception):
        self.failures.append(f"{relation}: {error}")

    def attach(self, **operands):
        for key, value in operands.items():
            if isinstance(value, QState):
                value = state_to_dict(value)
            self.instance[key] = value

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values(), default=math.inf)

    @property
    def worst_relation(self) -> Optional[str]:
        if not self.margins:
            return None
        return min(self.margins, key=self.margins.get)

    def violated(self, tolerance: float) -> bool:
        return bool(self.failures) or self.worst_margin < -tolerance


@dataclass
class CheckReport:
    """
    Aggregate of a check run. ``violations`` counts the trials (anchors
    included) with a margin below -tolerance or a solver failure.
    """

    check_name: str
    trials_run: int
    violations: int
    worst_margin: float
    witness: Optional[Dict[str, Any]]
    elapsed: float
    skipped: int = 0
    margins_by_relation: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    tolerance: float = 1e-6
    seed: int = 0
    corruption: float = 0.0

    @classmethod
    def from_outcomes(
        cls,
        name: str,
        cfg: CheckConfig,
        outcomes: List[TrialOutcome],
        elapsed: float,
        corruption: float = 0.0,
    ) -> "CheckReport":
        margins_by_relation = {}
        for outcome in outcomes:
            for relation, margin in outcome.margins.items():
                margins_by_relation[relation] = min(margins_by_relation.get(relation, math.inf), margin)

        worst, witness = math.inf, None
        if outcomes:
            # Solver failures outrank margins when picking the witness
            chosen = min(outcomes, key=lambda o: (not o.failures, o.worst_margin))
            worst = min(o.worst_margin for o in outcomes)
            witness = {
                "trial": chosen.trial,
                "relation": chosen.worst_relation,
                "margin": bits_to_json(chosen.worst_margin),
                "failures": list(chosen.failures),
                **chosen.instance,
            }

        return cls(
            check_name=name,
            trials_run=sum(1 for o in outcomes if o.trial != ANCHOR_TRIAL),
            violations=sum(1 for o in outcomes if o.violated(cfg.tolerance)),
            worst_margin=worst,
            witness=witness,
            elapsed=elapsed,
            skipped=sum(o.skipped for o in outcomes),
            margins_by_relation=dict(sorted(margins_by_relation.items())),
            failures=[f"trial {o.trial}: {f}" for o in outcomes for f in o.failures],
            tolerance=cfg.tolerance,
            seed=cfg.seed,
            corruption=corruption,
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "trials_run": self.trials_run,
            "violations": self.violations,
            "worst_margin": bits_to_json(self.worst_margin),
            "skipped": self.skipped,
            "elapsed": self.elapsed,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "corruption": self.corruption,
            "margins_by_relation": {k: bits_to_json(v) for k, v in self.margins_by_relation.items()},
            "failures": list(self.failures),
            "witness": self.witness,
        }


class PropositionCheck(ABC):
    """
    A randomized check of a family of entropy relations.

    Subclasses implement ``run_trial`` and may add fixed instances in
    ``run_anchors``. ``corruption`` is added to every hypothesis testing
    value and every SDP trace distance the check computes, so a check run
    with a nonzero corruption must report violations.
    """

    check_name = None

    def __init__(
        self,
        corruption: float = 0.0,
        solver: Optional[InteriorPointSolver] = None,
        logger: Union[logging.LoggerAdapter, str, None] = "./",
    ):
        super().__init__()
        self._name = self.check_name or self.__class__.__name__
        self.corruption = float(corruption)
        self.solver = solver
        self._logger = create_module_logger(logger, self.__class__.__name__)

    @property
    def name(self):
        return self._name

    @abstractmethod
    def run_trial(self, rng: np.random.Generator, cfg: CheckConfig, outcome: TrialOutcome):
        """Samples one instance from ``rng`` and records its margins in ``outcome``."""
        pass

    def run_anchors(self, cfg: CheckConfig) -> List[TrialOutcome]:
        return []

    def dh(self, rho, sigma, epsilon: float) -> HypoTestResult:
        result = d_hypo(rho, sigma, epsilon, self.solver)
        if self.corruption:
            result = dataclasses.replace(result, value=result.value + self.corruption)
        return result

    def dh_classical(self, p, q, epsilon: float) -> HypoTestResult:
        result = d_hypo_classical(p, q, epsilon)
        if self.corruption:
            result = dataclasses.replace(result, value=result.value + self.corruption)
        return result

    def hh(self, rho_ab: QState, partition, epsilon: float) -> EntropyValue:
        value = h_hypo(rho_ab, partition, epsilon, self.solver)
        if self.corruption:
            value = EntropyValue(value.bits - self.corruption, value.witness, dict(value.info))
        return value

    def trace_distance(self, rho, sigma) -> float:
        return trace_distance_sdp(rho, sigma, self.solver) + self.corruption

    def trial(self, index: int, seed: np.random.SeedSequence, cfg: CheckConfig) -> TrialOutcome:
        outcome = TrialOutcome(trial=index)
        try:
            self.run_trial(np.random.default_rng(seed), cfg, outcome)
        except TRIAL_ERRORS as e:
            self._record_error(outcome, f"trial {index}", e)
        return outcome

    def __call__(self, cfg: CheckConfig, client=None) -> CheckReport:
        t0 = time.time()
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
        tasks = [delayed(self.trial)(i, s, cfg) for i, s in enumerate(seeds)]
        outcomes = compute_tasks(tasks, client=client, n_workers=cfg.n_workers)
        if cfg.trials > 0:
            outcomes.extend(self.run_anchors(cfg))
        report = CheckReport.from_outcomes(
            self.name, cfg, outcomes, time.time() - t0, self.corruption
        )
        self._logger.info(
            f"{self.name}: {report.trials_run} trials, {report.violations} violations, "
            f"{report.skipped} skipped, worst margin {report.worst_margin:.3e} "
            f"in {report.elapsed:.2f}s"
        )
        return report

    def run_anchor(self, name: str, fn, *args) -> TrialOutcome:
        """Runs ``fn(outcome, *args)`` on a fixed instance named ``name``."""
        outcome = TrialOutcome(trial=ANCHOR_TRIAL, instance={"anchor": name})
        try:
            fn(outcome, *args)
        except TRIAL_ERRORS as e:
            self._record_error(outcome, f"anchor {name}", e)
        return outcome

    def _record_error(self, outcome: TrialOutcome, where: str, error: Exception):
        kind = "solver" if isinstance(error, (SolverFailure, np.linalg.LinAlgError)) else type(error).__name__
        outcome.fail(kind, error)
        self._logger.warning(f"{self.name}: {where} failed with {kind}: {error}")


def import_check(check_path: str):
    module_path, check_name = check_path.rsplit(".", 1)
    check_module = importlib.import_module(module_path)
    check_class = getattr(check_module, check_name)
    if not isinstance(check_class, type) or not issubclass(check_class, PropositionCheck):
        raise ValueError(f"Input check {check_path} must be derived "
                         "from PropositionCheck defined in entroscope.checks.check_base")
    return check_class


def choose(rng: np.random.Generator, values):
    return values[int(rng.integers(len(values)))]


def random_rank(rng: np.random.Generator, dim: int) -> int:
    return int(rng.integers(1, dim + 1))
