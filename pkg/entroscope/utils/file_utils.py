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

import json
import os
import pathlib

import numpy as np

from entroscope.states.channel import QChannel
from entroscope.states.quantum_state import (
    HermitianOperator,
    InvalidStateError,
    QState,
    SystemLayout,
)


class StateFileError(ValueError):
    pass


def mkdir(d):
    pathlib.Path(d).mkdir(parents=True, exist_ok=True)


def expand_outdir_and_mkdir(outdir):
    outdir = os.path.abspath(os.path.expanduser(outdir))
    mkdir(outdir)
    return outdir


def _parent_mkdir(path):
    parent = os.path.dirname(os.path.abspath(os.path.expanduser(path)))
    mkdir(parent)


def matrix_to_json(m) -> list:
    """Row-major nested lists of [re, im] pairs."""
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(value, field: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) == 0:
        raise StateFileError(f"Field '{field}' must be a non-empty list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise StateFileError(f"Field '{field}[{i}]' must be a list of entries")
        entries = []
        for j, entry in enumerate(row):
            entries.append(_complex_entry(entry, f"{field}[{i}][{j}]"))
        rows.append(entries)
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise StateFileError(f"Field '{field}' has rows of unequal length {sorted(width)}")
    return np.array(rows, dtype=np.complex128)


def _complex_entry(entry, field: str) -> complex:
    if isinstance(entry, bool):
        raise StateFileError(f"Field '{field}' must be a number or an [re, im] pair")
    if isinstance(entry, (int, float)):
        return complex(entry, 0.0)
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise StateFileError(f"Field '{field}' must be a number or an [re, im] pair, got {entry!r}")


def state_to_dict(rho: QState) -> dict:
    return {
        "dims": list(rho.layout.dims),
        "labels": list(rho.layout.labels),
        "matrix": matrix_to_json(rho.matrix),
    }


def state_from_dict(record) -> QState:
    if not isinstance(record, dict):
        raise StateFileError("A state file must hold a JSON object")
    if "matrix" not in record:
        raise StateFileError("Missing required field 'matrix'")
    m = matrix_from_json(record["matrix"], "matrix")
    if m.shape[0] != m.shape[1]:
        raise StateFileError(f"Field 'matrix' must be square, got shape {m.shape}")

    dims = record.get("dims", [m.shape[0]])
    if not isinstance(dims, list) or not all(
        isinstance(d, int) and not isinstance(d, bool) for d in dims
    ):
        raise StateFileError(f"Field 'dims' must be a list of integers, got {dims!r}")
    labels = record.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or not all(isinstance(s, str) for s in labels)
    ):
        raise StateFileError(f"Field 'labels' must be a list of strings, got {labels!r}")

    try:
        layout = SystemLayout.from_dims(dims, labels)
    except InvalidStateError as e:
        raise StateFileError(f"Field 'dims'/'labels': {e}") from None
    if layout.dim != m.shape[0]:
        raise StateFileError(
            f"Field 'dims' multiplies to {layout.dim} but 'matrix' is {m.shape[0]}x{m.shape[0]}"
        )
    try:
        return QState(HermitianOperator(m), layout)
    except InvalidStateError as e:
        raise StateFileError(f"Field 'matrix': {e}") from None


def channel_to_dict(ch: QChannel) -> dict:
    return {
        "dims": [ch.dim_in, ch.dim_out],
        "trace_preserving": ch.trace_preserving,
        "trace_non_increasing": ch.trace_non_increasing,
        "sub_unital": ch.sub_unital,
        "kraus": [matrix_to_json(k) for k in ch.operator_terms],
    }


def channel_from_dict(record) -> QChannel:
    """The stored flags are informational; they are recomputed from the terms."""
    if not isinstance(record, dict):
        raise StateFileError("A channel file must hold a JSON object")
    terms = record.get("kraus")
    if not isinstance(terms, list) or len(terms) == 0:
        raise StateFileError("Field 'kraus' must be a non-empty list of matrices")
    matrices = [matrix_from_json(k, f"kraus[{i}]") for i, k in enumerate(terms)]
    try:
        return QChannel(matrices)
    except InvalidStateError as e:
        raise StateFileError(f"Field 'kraus': {e}") from None


def _load_json(path):
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise StateFileError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}") from None


def _dump_json(record, path):
    _parent_mkdir(path)
    with open(path, "w") as f:
        json.dump(record, f)
        f.write("\n")


def read_state(path) -> QState:
    record = _load_json(path)
    try:
        return state_from_dict(record)
    except StateFileError as e:
        raise StateFileError(f"{path}: {e}") from None


def write_state(rho: QState, path):
    _dump_json(state_to_dict(rho), path)


def read_channel(path) -> QChannel:
    record = _load_json(path)
    try:
        return channel_from_dict(record)
    except StateFileError as e:
        raise StateFileError(f"{path}: {e}") from None


def write_channel(ch: QChannel, path):
    _dump_json(channel_to_dict(ch), path)


def write_json_report(report: dict, path):
    _dump_json(report, path)
