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

import pandas as pd
import pytest

from entroscope.checks import CheckConfig, CheckReport, TrialOutcome, UnknownCheckError
from entroscope.modules.suite import (
    REPORT_COLUMNS,
    has_solver_failures,
    reports_to_frame,
    resolve_selection,
    run_suite,
    suite_summary,
)
from entroscope.utils.config_utils import build_check_config, build_check_suite


def report(name, margins, failed=False):
    outcome = TrialOutcome(trial=0, margins=margins)
    if failed:
        outcome.fail("solver", RuntimeError("stalled"))
    return CheckReport.from_outcomes(name, CheckConfig(), [outcome], 0.1)


class TestSuite:
    def test_empty_selection(self, tmp_path):
        assert run_suite(CheckConfig(trials=1), selection=[], logger=str(tmp_path)) == []

    def test_unknown_selection(self, tmp_path):
        with pytest.raises(UnknownCheckError):
            run_suite(CheckConfig(trials=1), selection=["dh_core", "bogus"], logger=str(tmp_path))

    def test_all_selected_by_default(self):
        assert len(resolve_selection(None)) == 6

    def test_zero_trials(self, tmp_path):
        reports = run_suite(CheckConfig(trials=0), selection=["dh_core", "aep"], logger=str(tmp_path))
        assert [r.check_name for r in reports] == ["dh_core", "aep"]
        summary = suite_summary(reports)
        assert summary["passed"], f"Expected an empty run to pass, got {summary}"
        assert summary["total_violations"] == 0

    def test_summary(self):
        reports = [report("a", {"x": 0.1}), report("b", {"y": -1.0}), report("c", {}, failed=True)]
        summary = suite_summary(reports)
        assert summary["total_violations"] == 2
        assert summary["solver_failures"] == 1
        assert not summary["passed"]
        assert has_solver_failures(reports)
        assert not has_solver_failures(reports[:2])

    def test_frame(self):
        frame = reports_to_frame([report("a", {"x": 0.1}), report("c", {}, failed=True)])
        assert isinstance(frame, pd.DataFrame)
        assert list(frame.columns) == REPORT_COLUMNS
        assert frame["failures"].tolist() == [0, 1]
        assert frame["worst_margin"].tolist() == [0.1, "inf"]


class TestSuiteConfig:
    def test_build_check_config(self):
        defaults = CheckConfig(seed=1, trials=10)
        cfg = build_check_config({"trials": 3, "dims": [2], "seed": None}, defaults)
        assert cfg.trials == 3
        assert cfg.dims == (2,)
        assert cfg.seed == 1, "Expected a null key to keep its default"

    def test_build_suite(self, tmp_path):
        path = tmp_path / "suite.yaml"
        path.write_text(
            "seed: 5\n"
            "trials: 0\n"
            "checks:\n"
            "  - name: dh_core\n"
            "  - name: entroscope.checks.aep.AepCheck\n"
            "    params:\n"
            "      n_max: 3\n"
            "    config:\n"
            "      trials: 2\n"
        )
        suite = build_check_suite(str(path), CheckConfig(seed=1, trials=9), logger=str(tmp_path))
        (first, first_cfg), (second, second_cfg) = suite.checks
        assert first.name == "dh_core"
        assert first_cfg.seed == 5 and first_cfg.trials == 0
        assert second.name == "aep"
        assert second_cfg.trials == 2

    @pytest.mark.parametrize("body", ["seed: 5\n", "checks: []\n", "- dh_core\n"])
    def test_missing_checks(self, tmp_path, body):
        path = tmp_path / "suite.yaml"
        path.write_text(body)
        with pytest.raises(ValueError):
            build_check_suite(str(path), logger=str(tmp_path))

    def test_unknown_check(self, tmp_path):
        path = tmp_path / "suite.yaml"
        path.write_text("checks:\n  - name: bogus\n")
        with pytest.raises(UnknownCheckError):
            build_check_suite(str(path), logger=str(tmp_path))
