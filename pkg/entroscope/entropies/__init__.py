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

from .entropy_value import EntropyValue, HypoTestResult
from .hypothesis_testing import d_hypo, d_hypo_classical, h_hypo, trace_distance_sdp
from .min_max import (
    d_max,
    d_max_sdp,
    d_max_smooth,
    d_min,
    dmax_smoothing_witness,
    dmin_smoothing_witness,
    fidelity_sdp,
    h_max,
    h_min,
    h_min_fixed_ratio,
)
from .quantities import QUANTITIES, evaluate_quantity, hypothesis_test_from_config
from .von_neumann import binary_entropy, h_cond_vn, kl_div, renyi0, von_neumann

__all__ = [
    "EntropyValue",
    "HypoTestResult",
    "QUANTITIES",
    "binary_entropy",
    "d_hypo",
    "d_hypo_classical",
    "d_max",
    "d_max_sdp",
    "d_max_smooth",
    "d_min",
    "dmax_smoothing_witness",
    "dmin_smoothing_witness",
    "evaluate_quantity",
    "fidelity_sdp",
    "h_cond_vn",
    "h_hypo",
    "h_max",
    "h_min",
    "h_min_fixed_ratio",
    "hypothesis_test_from_config",
    "kl_div",
    "renyi0",
    "trace_distance_sdp",
    "von_neumann",
]
