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

from .problem import (
    MapTerm,
    SdpBuilder,
    SdpProblem,
    SdpSolution,
    SolutionReport,
    adjoint,
    verify_solution,
)
from .solver import (
    InteriorPointSolver,
    SolverFailure,
    deembed,
    embed,
    hermitian_basis,
    solve,
)

__all__ = [
    "InteriorPointSolver",
    "MapTerm",
    "SdpBuilder",
    "SdpProblem",
    "SdpSolution",
    "SolutionReport",
    "SolverFailure",
    "adjoint",
    "deembed",
    "embed",
    "hermitian_basis",
    "solve",
    "verify_solution",
]
