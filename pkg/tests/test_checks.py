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

import numpy as np
import pytest

from entroscope.checks import (
    ANCHOR_TRIAL,
    CHECKS,
    CheckConfig,
    CheckReport,
    DhCoreCheck,
    TrialOutcome,
    UnknownCheckError,
    get_check,
    import_check,
)
from entroscope.checks.aep import record_shrinking
from entroscope.checks.check_base import PropositionCheck, relation_margin
from entroscope.checks.decomposition_chain import admissible_epsilon_prime
from entroscope.checks.dh_core import BOUND_ATOL, low_excess_pair
from entroscope.states.quantum_state import InvalidStateError, UnknownSubsystemError
from entroscope.utils.distance_utils import generalized_trace_distance
from entroscope.utils.linalg_utils import positive_part_projector
from entroscope.utils.sampling_utils import random_state

SMALL = dict(seed=3, trials=2, dims=(2,), epsilons=(0.1, 0.25))


class BrokenWitnessCheck(PropositionCheck):
    check_name = "broken_witness"

    def run_trial(self, rng, cfg, outcome):
        outcome.record("nonnegative", 0.0, 1.0)
        if outcome.trial == 1:
            raise InvalidStateError("witness is not positive semidefinite")

    def run_anchors(self, cfg):
        return [self.run_anchor("missing_subsystem", self._missing_subsystem)]

    def _missing_subsystem(self, outcome):
        raise UnknownSubsystemError("C")


class TestCheckConfig:
    def test_defaults(self):
        cfg = CheckConfig()
        assert cfg.dims == (2, 3)
        assert cfg.to_dict()["epsilons"] == [0.05, 0.1, 0.25, 0.5]

    @pytest.mark.parametrize(
        "changes",
        [
            {"trials": -1},
            {"dims": (1, 2)},
            {"dims": ()},
            {"epsilons": (0.0,)},
            {"epsilons": (1.0,)},
            {"tolerance": -1e-3},
        ],
    )
    def test_invalid(self, changes):
        with pytest.raises(ValueError):
            CheckConfig(**changes)

    def test_replace_validates(self):
        with pytest.raises(ValueError):
            CheckConfig().replace(dims=(0,))


class TestMargins:
    def test_relation_margin(self):
        assert relation_margin(1.0, 3.0) == 2.0
        assert relation_margin(math.inf, math.inf) == 0.0
        assert relation_margin(-math.inf, -math.inf) == 0.0
        assert relation_margin(math.nan, 1.0) == -math.inf
        assert relation_margin(0.0, math.inf) == math.inf

    def test_record_keeps_minimum(self):
        outcome = TrialOutcome(trial=0)
        outcome.record("upper", 0.0, 1.0)
        outcome.record("upper", 0.0, 0.5)
        assert outcome.margins["upper"] == 0.5
        assert outcome.worst_relation == "upper"

    def test_record_equal(self):
        outcome = TrialOutcome(trial=0)
        outcome.record_equal("anchor", 1.2, 1.0)
        assert outcome.margins["anchor_lower"] == pytest.approx(0.2)
        assert outcome.margins["anchor_upper"] == pytest.approx(-0.2)
        assert outcome.violated(1e-6)
        assert not outcome.violated(0.5)

    @pytest.mark.parametrize("tolerance", [0.0, 1e-6])
    def test_trend_is_strict(self, tolerance):
        flat = TrialOutcome(trial=ANCHOR_TRIAL)
        record_shrinking(flat, "gap_trend", [0.3, 0.25, 0.3], tolerance)
        assert flat.violated(tolerance), f"Expected equal end gaps to violate, got {flat.margins}"
        shrinking = TrialOutcome(trial=ANCHOR_TRIAL)
        record_shrinking(shrinking, "gap_trend", [0.3, 0.2, 0.1], tolerance)
        assert not shrinking.violated(tolerance), f"Expected a shrinking gap to pass, got {shrinking.margins}"

    def test_failures_violate(self):
        outcome = TrialOutcome(trial=0)
        outcome.fail("solver", RuntimeError("stalled"))
        assert outcome.violated(1.0)
        assert outcome.worst_margin == math.inf


class TestCheckReport:
    def test_from_outcomes(self):
        good = TrialOutcome(trial=0, margins={"a": 0.1}, skipped=1)
        bad = TrialOutcome(trial=1, margins={"a": 0.2, "b": -0.5}, instance={"epsilon": 0.1})
        anchor = TrialOutcome(trial=ANCHOR_TRIAL, margins={"c": 0.0})
        report = CheckReport.from_outcomes("demo", CheckConfig(), [good, bad, anchor], 0.5)
        assert report.trials_run == 2, f"Expected anchors to be left out of trials_run, got {report.trials_run}"
        assert report.violations == 1
        assert report.skipped == 1
        assert report.worst_margin == -0.5
        assert report.margins_by_relation == {"a": 0.1, "b": -0.5, "c": 0.0}
        assert report.witness["trial"] == 1
        assert report.witness["relation"] == "b"
        assert report.witness["epsilon"] == 0.1
        assert not report.passed

    def test_failure_is_witness(self):
        failed = TrialOutcome(trial=4)
        failed.fail("solver", RuntimeError("stalled"))
        worse = TrialOutcome(trial=5, margins={"a": -1.0})
        report = CheckReport.from_outcomes("demo", CheckConfig(), [worse, failed], 0.0)
        assert report.witness["trial"] == 4
        assert report.failures == ["trial 4: solver: stalled"]

    def test_empty(self):
        report = CheckReport.from_outcomes("demo", CheckConfig(), [], 0.0)
        assert report.passed
        assert report.witness is None
        assert report.to_dict()["worst_margin"] == "inf"


class TestRegistry:
    def test_names(self):
        assert list(CHECKS) == [
            "dh_core",
            "hh_core",
            "aep",
            "smooth_relations",
            "decomposition_chain",
            "appendix_lemmas",
        ]

    def test_dotted_path(self):
        assert get_check("entroscope.checks.dh_core.DhCoreCheck") is DhCoreCheck

    @pytest.mark.parametrize("name", ["no_such_check", "entroscope.checks.NoSuchCheck", "no.such.module.Check"])
    def test_unknown(self, name):
        with pytest.raises(UnknownCheckError):
            get_check(name)

    def test_import_check_rejects_non_checks(self):
        with pytest.raises(ValueError):
            import_check("entroscope.checks.check_base.CheckConfig")


class TestInstanceSampling:
    @pytest.mark.parametrize("epsilon", [0.05, 0.1, 0.25, 0.5])
    def test_low_excess_pair(self, epsilon):
        rng = np.random.default_rng(11)
        for d in (2, 3, 4):
            for rank in range(1, d + 1):
                rho = random_state(d, rank, seed=rng)
                rho_near, sigma = low_excess_pair(rho, epsilon, rng)
                r = rho_near.matrix
                p = np.real(np.trace(np.asarray(positive_part_projector(r - sigma.matrix)) @ r))
                assert p <= epsilon + 1e-9, f"Expected p <= {epsilon}, got {p} for d={d}, rank={rank}"
                assert rho_near.trace == pytest.approx(1.0, abs=1e-8)
                assert sigma.trace == pytest.approx(1.0, abs=1e-8)
                slack = epsilon - (1.0 - epsilon) * generalized_trace_distance(rho_near, sigma)
                assert slack > BOUND_ATOL, f"Expected positive slack, got {slack}"

    def test_low_excess_pair_keeps_small_eigenvalues(self):
        rho = random_state(4, 3, seed=5)
        rho_near, _ = low_excess_pair(rho, 0.5, np.random.default_rng(0))
        np.testing.assert_allclose(rho_near.matrix, rho.matrix, atol=1e-9)

    @pytest.mark.parametrize(
        "epsilon, epsilons, expected",
        [
            (0.1, (0.05, 0.1, 0.5), {0.05, 0.1}),
            (0.25, (0.1, 0.25), {(0.75 ** 2) / 32.0}),
            (0.5, (0.5,), {(0.5 ** 2) / 32.0}),
        ],
    )
    def test_admissible_epsilon_prime(self, epsilon, epsilons, expected):
        rng = np.random.default_rng(0)
        drawn = {admissible_epsilon_prime(rng, epsilon, epsilons) for _ in range(20)}
        assert drawn <= expected, f"Expected draws from {expected}, got {drawn}"
        assert all(epsilon + math.sqrt(8.0 * e) <= 1.0 + 1e-12 for e in drawn)


class TestCheckRuns:
    def test_trial_errors_are_recorded(self, tmp_path):
        report = BrokenWitnessCheck(logger=str(tmp_path))(CheckConfig(**{**SMALL, "trials": 3}))
        assert report.trials_run == 3
        assert report.violations == 2, f"Expected the failing trial and anchor to count, got {report.violations}"
        assert report.failures[0] == "trial 1: InvalidStateError: witness is not positive semidefinite"
        assert report.failures[1].startswith("trial -1: UnknownSubsystemError"), report.failures
        assert report.witness["trial"] == 1
        assert report.witness["failures"] == ["InvalidStateError: witness is not positive semidefinite"]

    def test_zero_trials(self, tmp_path):
        report = DhCoreCheck(logger=str(tmp_path))(CheckConfig(**{**SMALL, "trials": 0}))
        assert report.trials_run == 0
        assert report.violations == 0
        assert report.witness is None

    @pytest.mark.slow
    @pytest.mark.parametrize("name", list(CHECKS))
    def test_passes(self, name, tmp_path):
        report = CHECKS[name](logger=str(tmp_path))(CheckConfig(**SMALL))
        assert report.trials_run == SMALL["trials"]
        assert report.passed, f"Expected {name} to pass, got {report.to_dict()}"

    @pytest.mark.slow
    @pytest.mark.parametrize("name", list(CHECKS))
    def test_corruption_detected(self, name, tmp_path):
        report = CHECKS[name](corruption=0.1, logger=str(tmp_path))(CheckConfig(**SMALL))
        assert report.violations > 0, f"Expected {name} to flag a corrupted run"
        assert report.corruption == 0.1

    @pytest.mark.slow
    def test_lower_trace_distance_bounds_run(self, tmp_path):
        cfg = CheckConfig(**{**SMALL, "trials": 4})
        report = DhCoreCheck(logger=str(tmp_path))(cfg)
        for relation in ("trace_distance_lower", "pinsker", "trace_distance_upper"):
            assert relation in report.margins_by_relation, f"Expected {relation} to be checked"
        assert report.skipped <= cfg.trials, f"Only data_processing may skip, got {report.skipped} skips"
        assert report.passed, report.to_dict()

    @pytest.mark.slow
    def test_decomposition_relations_run(self, tmp_path):
        cfg = CheckConfig(**{**SMALL, "trials": 3})
        report = CHECKS["decomposition_chain"](logger=str(tmp_path))(cfg)
        for relation in ("decomposition", "chain_rule", "chain_rule_tight"):
            assert relation in report.margins_by_relation, f"Expected {relation} to be checked"
        # half_chain may skip once per trial and once in the invariant state anchor
        assert report.skipped <= cfg.trials + 1, f"Only half_chain may skip, got {report.skipped} skips"

    @pytest.mark.slow
    def test_deterministic(self, tmp_path):
        cfg = CheckConfig(**SMALL)
        first = DhCoreCheck(logger=str(tmp_path))(cfg)
        second = DhCoreCheck(logger=str(tmp_path))(cfg)
        assert first.margins_by_relation.keys() == second.margins_by_relation.keys()
        for relation, margin in first.margins_by_relation.items():
            assert np.isclose(margin, second.margins_by_relation[relation], atol=1e-9), \
                f"Expected equal margins for {relation}"
