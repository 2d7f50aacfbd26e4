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

from .check_base import (
    ANCHOR_TRIAL,
    CheckConfig,
    CheckReport,
    PropositionCheck,
    TrialOutcome,
    UnknownCheckError,
    import_check,
)
from .aep import AepCheck, check_aep
from .appendix_lemmas import AppendixLemmasCheck, check_appendix_lemmas
from .decomposition_chain import DecompositionChainCheck, check_decomposition_chain
from .dh_core import DhCoreCheck, check_dh_core
from .hh_core import HhCoreCheck, check_hh_core
from .smooth_relations import SmoothRelationsCheck, check_smooth_relations

# Checks run by ``--all``, in report order
CHECKS = {
    check.check_name: check
    for check in [
        DhCoreCheck,
        HhCoreCheck,
        AepCheck,
        SmoothRelationsCheck,
        DecompositionChainCheck,
        AppendixLemmasCheck,
    ]
}


def get_check(name: str):
    """Check class registered under ``name``, or a dotted class path."""
    if name in CHECKS:
        return CHECKS[name]
    if "." in name:
        try:
            return import_check(name)
        except (ImportError, AttributeError) as e:
            raise UnknownCheckError(f"Cannot import check '{name}': {e}") from e
    raise UnknownCheckError(f"Unknown check '{name}', expected one of {list(CHECKS)}")


__all__ = [
    "ANCHOR_TRIAL",
    "AepCheck",
    "AppendixLemmasCheck",
    "CHECKS",
    "CheckConfig",
    "CheckReport",
    "DecompositionChainCheck",
    "DhCoreCheck",
    "HhCoreCheck",
    "PropositionCheck",
    "SmoothRelationsCheck",
    "TrialOutcome",
    "UnknownCheckError",
    "check_aep",
    "check_appendix_lemmas",
    "check_decomposition_chain",
    "check_dh_core",
    "check_hh_core",
    "check_smooth_relations",
    "get_check",
    "import_check",
]
