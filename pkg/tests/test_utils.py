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

import argparse
import json

import numpy as np
import pytest

from entroscope.states.quantum_state import QState, SystemLayout, UnknownSubsystemError
from entroscope.utils.distributed_utils import THREADS_ENV_VAR, get_client, get_num_workers
from entroscope.utils.file_utils import (
    StateFileError,
    read_channel,
    read_state,
    write_channel,
    write_state,
)
from entroscope.utils.linalg_utils import fn_on_support, psd_sqrt, support_projector, trace_norm
from entroscope.utils.sampling_utils import random_state, sample_instance
from entroscope.utils.script_utils import (
    parse_dims,
    parse_epsilons,
    parse_partition,
    partition_for_layout,
)


class TestLinalg:
    def test_sqrt_on_support(self):
        got = psd_sqrt(np.diag([4.0, 0.0]))
        assert np.allclose(got, np.diag([2.0, 0.0])), f"Expected diag(2, 0) but got {got}"

    def test_inverse_on_support(self):
        got = fn_on_support(np.diag([4.0, 0.0]), lambda v: 1.0 / v)
        assert np.allclose(got, np.diag([0.25, 0.0])), f"Expected diag(0.25, 0) but got {got}"

    def test_undefined_function(self):
        with pytest.raises(ValueError):
            fn_on_support(np.diag([1.0, 0.5]), lambda v: np.log(v - 0.75))

    def test_support_projector(self):
        rho = random_state(4, rank=2, seed=3)
        proj = support_projector(rho.matrix)
        assert np.isclose(np.trace(proj).real, 2.0), f"Expected a rank 2 projector, got trace {np.trace(proj)}"

    def test_trace_norm(self):
        assert trace_norm(np.diag([0.5, -0.25])) == pytest.approx(0.75)


class TestSampling:
    def test_seeded_states_repeat(self):
        a = sample_instance("state", [2, 2], seed=11)
        b = sample_instance("state", [2, 2], seed=11)
        assert np.array_equal(a.matrix, b.matrix), "Expected equal seeds to give equal states"

    def test_rank(self):
        rho = sample_instance("state", [3], rank=1, seed=5)
        rank = np.linalg.matrix_rank(rho.matrix, tol=1e-10)
        assert rank == 1, f"Expected rank 1 but got {rank}"

    def test_cq_state_is_block_diagonal(self):
        rho = sample_instance("cq_state", [2, 2], seed=2)
        off = rho.matrix[:2, 2:]
        assert np.allclose(off, 0.0), "Expected no coherence between classical values"
        assert rho.trace == pytest.approx(1.0)

    def test_channel_kinds(self):
        assert sample_instance("channel", [2, 3], seed=0).trace_preserving
        assert sample_instance("unital", [2], seed=0).sub_unital
        assert not sample_instance("trace_non_increasing", [2], seed=0).trace_preserving

    @pytest.mark.parametrize("dims", [[0], [2, -1], []])
    def test_invalid_dims(self, dims):
        with pytest.raises(ValueError):
            sample_instance("state", dims, seed=0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            sample_instance("qutrit", [3], seed=0)


class TestStateFiles:
    def test_state_file(self, tmp_path):
        rho = random_state([2, 2], seed=9)
        path = str(tmp_path / "rho.json")
        write_state(rho, path)
        back = read_state(path)
        assert np.array_equal(back.matrix, rho.matrix), "Expected the stored matrix to be exact"
        assert back.layout == rho.layout, f"Expected layout {rho.layout} but got {back.layout}"

    def test_channel_file(self, tmp_path):
        ch = sample_instance("channel", [2, 2], seed=1, n_kraus=4)
        path = str(tmp_path / "channel.json")
        write_channel(ch, path)
        with open(path) as f:
            record = json.load(f)
        assert record["trace_preserving"] is True, f"Expected a trace preserving header, got {record}"
        assert len(read_channel(path).operator_terms) == 4

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"matrix": [[1, 0], [0, 0]')
        with pytest.raises(StateFileError):
            read_state(str(path))

    def test_missing_matrix(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"dims": [2]}')
        with pytest.raises(StateFileError, match="matrix"):
            read_state(str(path))

    def test_bad_entry_names_field(self, tmp_path):
        path = tmp_path / "entry.json"
        path.write_text('{"matrix": [[1, 0], [0, "x"]]}')
        with pytest.raises(StateFileError, match=r"matrix\[1\]\[1\]"):
            read_state(str(path))

    def test_dims_mismatch(self, tmp_path):
        path = tmp_path / "dims.json"
        path.write_text('{"dims": [3], "matrix": [[0.5, 0], [0, 0.5]]}')
        with pytest.raises(StateFileError, match="dims"):
            read_state(str(path))

    def test_not_a_state(self, tmp_path):
        path = tmp_path / "negative.json"
        path.write_text('{"matrix": [[1.5, 0], [0, -0.5]]}')
        with pytest.raises(StateFileError, match="matrix"):
            read_state(str(path))


class TestWorkers:
    def test_env_caps_request(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "2")
        assert get_num_workers(8) == 2
        assert get_num_workers() == 2

    def test_explicit_request(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        assert get_num_workers(3) == 3

    def test_invalid_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        with pytest.raises(ValueError):
            get_num_workers()

    def test_no_scheduler(self):
        assert get_client({"scheduler_address": None, "scheduler_file": None}) is None

    def test_both_schedulers(self):
        with pytest.raises(ValueError):
            get_client({"scheduler_address": "tcp://localhost:8786", "scheduler_file": "s.json"})


class TestArgumentParsing:
    def test_parse_dims(self):
        assert parse_dims("2,3") == [2, 3]
        with pytest.raises(argparse.ArgumentTypeError):
            parse_dims("0")
        with pytest.raises(argparse.ArgumentTypeError):
            parse_dims("two")

    def test_parse_epsilons(self):
        assert parse_epsilons("0.1, 0.5") == [0.1, 0.5]

    def test_parse_partition(self):
        assert parse_partition("A:0;B:1") == (["0"], ["1"])
        assert parse_partition("A:0,1;B:2") == (["0", "1"], ["2"])
        assert parse_partition("A:0") == (["0"], [])

    @pytest.mark.parametrize("value", ["B:1", "A:0;C:1", "A:0;A:1", "nothing"])
    def test_invalid_partition(self, value):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_partition(value)

    def test_partition_for_layout(self):
        layout = SystemLayout.from_dims([2, 2, 2])
        assert partition_for_layout(layout, (["0"], ["1", "2"])) == (["A"], ["B", "C"])
        assert partition_for_layout(layout, (["B"], ["A"])) == (["B"], ["A"])

    @pytest.mark.parametrize("token", ["5", "-1", "Z"])
    def test_partition_unknown_subsystem(self, token):
        layout = SystemLayout.from_dims([2, 2])
        with pytest.raises(UnknownSubsystemError):
            partition_for_layout(layout, ([token], []))
