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
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional

from entroscope.entropies.entropy_value import EntropyValue, HypoTestResult
from entroscope.entropies.hypothesis_testing import d_hypo, h_hypo
from entroscope.entropies.min_max import (
    d_max,
    d_max_smooth,
    d_min,
    fidelity_sdp,
    h_max,
    h_min,
    h_min_fixed_ratio,
)
from entroscope.entropies.von_neumann import h_cond_vn, kl_div, renyi0, von_neumann
from entroscope.states.quantum_state import QState


@dataclass(frozen=True)
class Quantity:
    """
    How a named quantity is called.

    operands: "pair" takes (rho, sigma), "conditional" takes (rho_AB,
        partition) and "single" takes rho alone.
    epsilon: "required", "optional" (defaults to 0) or "none".
    unit: "bits" for entropies and divergences, None for unitless values.
    """

    name: str
    function: Callable
    operands: str
    epsilon: str
    unit: Optional[str] = "bits"


QUANTITIES = {
    q.name: q
    for q in [
        Quantity("d_hypo", d_hypo, "pair", "required"),
        Quantity("h_hypo", h_hypo, "conditional", "required"),
        Quantity("d_max", d_max, "pair", "none"),
        Quantity("d_min", d_min, "pair", "none"),
        Quantity("d_max_smooth", d_max_smooth, "pair", "optional"),
        Quantity("h_min", h_min, "conditional", "optional"),
        Quantity("h_min_fixed_ratio", h_min_fixed_ratio, "conditional", "none"),
        Quantity("h_max", h_max, "conditional", "optional"),
        Quantity("von_neumann", von_neumann, "single", "none"),
        Quantity("h_cond_vn", h_cond_vn, "conditional", "none"),
        Quantity("kl_div", kl_div, "pair", "none"),
        Quantity("renyi0", renyi0, "pair", "none"),
        Quantity("fidelity_sdp", fidelity_sdp, "pair", "none", unit=None),
    ]
}


def get_quantity(name: str) -> Quantity:
    try:
        return QUANTITIES[name]
    except KeyError:
        raise ValueError(
            f"Unknown quantity '{name}', expected one of {sorted(QUANTITIES)}"
        ) from None


def as_entropy_value(value, unit: Optional[str] = "bits") -> EntropyValue:
    if isinstance(value, EntropyValue):
        return value if value.unit == unit else dataclasses.replace(value, unit=unit)
    if isinstance(value, HypoTestResult):
        return EntropyValue(value.value, value, {"epsilon": value.epsilon}, unit)
    return EntropyValue(float(value), unit=unit)


def evaluate_quantity(
    name: str,
    rho: QState,
    sigma=None,
    epsilon: Optional[float] = None,
    partition=None,
) -> EntropyValue:
    q = get_quantity(name)
    args = [rho]
    if q.operands == "pair":
        if sigma is None:
            raise ValueError(f"Quantity '{name}' needs a second operand sigma")
        args.append(sigma)
    elif q.operands == "conditional":
        if partition is None:
            raise ValueError(f"Quantity '{name}' needs a partition")
        args.append(partition)

    kwargs = {}
    if q.epsilon == "required":
        if epsilon is None:
            raise ValueError(f"Quantity '{name}' needs epsilon")
        args.append(epsilon)
    elif q.epsilon == "optional":
        kwargs["epsilon"] = 0.0 if epsilon is None else epsilon
    elif epsilon is not None:
        raise ValueError(f"Quantity '{name}' takes no epsilon, got {epsilon}")
    return as_entropy_value(q.function(*args, **kwargs), q.unit)


def hypothesis_test_from_config(config: dict) -> Callable:
    """
    Callable (rho, sigma=None) -> EntropyValue for a config with keys
    ``quantity`` and optionally ``epsilon`` and ``partition``.
    """
    if "quantity" not in config:
        raise ValueError("Quantity config is missing the 'quantity' key")
    get_quantity(config["quantity"])
    return partial(
        _evaluate_configured,
        config["quantity"],
        config.get("epsilon"),
        config.get("partition"),
    )


def _evaluate_configured(name, epsilon, partition, rho, sigma=None) -> EntropyValue:
    return evaluate_quantity(name, rho, sigma, epsilon, partition)
