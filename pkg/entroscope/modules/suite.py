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
import time
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from entroscope.checks import CHECKS, get_check
from entroscope.checks.check_base import CheckConfig, CheckReport, PropositionCheck
from entroscope.entropies.entropy_value import bits_to_json
from entroscope.log import create_module_logger

# Columns of the tabular suite report
REPORT_COLUMNS = [
    "check_name",
    "trials_run",
    "violations",
    "worst_margin",
    "skipped",
    "failures",
    "elapsed",
    "seed",
    "tolerance",
]


class CheckSuite:
    """Runs a list of configured checks one after another"""

    def __init__(
        self,
        checks: Sequence[Tuple[PropositionCheck, CheckConfig]],
        logger: Union[logging.LoggerAdapter, str, None] = "./",
    ):
        """
        Parameters
        ----------
        checks: Pairs of a check instance and the config it runs with.
        logger: Existing logger to log to, or a path to a log directory.
        """
        self.checks = list(checks)
        self._logger = create_module_logger(logger, "CheckSuite")

    def __call__(self, client=None) -> List[CheckReport]:
        t0 = time.time()
        reports = []
        for check, cfg in self.checks:
            self._logger.info(f"Running {check.name} with {cfg.trials} trials, seed {cfg.seed}")
            reports.append(check(cfg, client=client))
        self._logger.info(
            f"Suite of {len(reports)} checks finished in {time.time() - t0:.2f}s "
            f"with {total_violations(reports)} violations"
        )
        return reports


def resolve_selection(selection: Optional[Iterable[str]]) -> List[type]:
    """
    Check classes for a list of names. None selects every registered check.
    Raises UnknownCheckError before anything runs.
    """
    if selection is None:
        return list(CHECKS.values())
    return [get_check(name) for name in selection]


def run_suite(
    cfg: CheckConfig,
    selection: Optional[Iterable[str]] = None,
    corruption: float = 0.0,
    client=None,
    logger: Union[logging.LoggerAdapter, str, None] = "./",
) -> List[CheckReport]:
    """
    Runs the selected checks with one shared config. An empty selection
    runs nothing and returns an empty list.
    """
    classes = resolve_selection(selection)
    suite = CheckSuite(
        [(cls(corruption=corruption, logger=logger), cfg) for cls in classes],
        logger=logger,
    )
    return suite(client=client)


def total_violations(reports: Iterable[CheckReport]) -> int:
    return sum(report.violations for report in reports)


def has_solver_failures(reports: Iterable[CheckReport]) -> bool:
    return any(report.failures for report in reports)


def suite_summary(reports: List[CheckReport]) -> dict:
    return {
        "checks": [report.to_dict() for report in reports],
        "total_violations": total_violations(reports),
        "solver_failures": sum(len(report.failures) for report in reports),
        "passed": all(report.passed for report in reports),
    }


def reports_to_frame(reports: List[CheckReport]) -> pd.DataFrame:
    """One row per check, ``failures`` given as a count."""
    rows = []
    for report in reports:
        rows.append({
            "check_name": report.check_name,
            "trials_run": report.trials_run,
            "violations": report.violations,
            "worst_margin": bits_to_json(report.worst_margin),
            "skipped": report.skipped,
            "failures": len(report.failures),
            "elapsed": report.elapsed,
            "seed": report.seed,
            "tolerance": report.tolerance,
        })
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)
