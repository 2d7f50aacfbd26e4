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
import math

import numpy as np
import pandas as pd
import pytest

from entroscope.scripts import cli, compute_entropy, generate_instances, verify_propositions
from entroscope.states.quantum_state import QState
from entroscope.utils.file_utils import read_channel, read_state, write_state
from entroscope.utils.script_utils import EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS
from entroscope.utils.state_utils import bell_state


def parse(module, argv):
    return module.attach_args(argparse.ArgumentParser()).parse_args(argv)


@pytest.fixture
def state_files(tmp_path):
    rho, sigma = tmp_path / "rho.json", tmp_path / "sigma.json"
    write_state(QState(np.diag([0.9, 0.1])), str(rho))
    write_state(QState(np.diag([0.5, 0.5])), str(sigma))
    return str(rho), str(sigma)


class TestCompute:
    def test_d_hypo(self, state_files, tmp_path, capsys):
        rho, sigma = state_files
        args = parse(compute_entropy, [
            "--quantity", "d_hypo", "--state", rho, "--sigma", sigma,
            "--epsilon", "0.9", "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert record["quantity"] == "d_hypo"
        assert record["value_bits"] == pytest.approx(math.log2(1.8), abs=1e-5), \
            f"Expected {math.log2(1.8)} but got {record['value_bits']}"
        assert record["seed"] is None
        assert "witness" in record

    def test_fidelity_is_unitless(self, state_files, tmp_path, capsys):
        rho, sigma = state_files
        args = parse(compute_entropy, [
            "--quantity", "fidelity_sdp", "--state", rho, "--sigma", sigma,
            "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert "value_bits" not in record
        assert record["value"] == pytest.approx(0.8, abs=1e-5), f"Expected 0.8 but got {record['value']}"

    def test_von_neumann_csv(self, tmp_path):
        path = tmp_path / "mixed.json"
        write_state(QState(np.eye(2) / 2), str(path))
        out = tmp_path / "reports" / "value.csv"
        args = parse(compute_entropy, [
            "--quantity", "von_neumann", "--state", str(path), "--format", "csv",
            "--out", str(out), "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_OK
        frame = pd.read_csv(out)
        assert frame["value_bits"].tolist() == [pytest.approx(1.0)]

    def test_conditional_partition(self, tmp_path, capsys):
        path = tmp_path / "bell.json"
        write_state(bell_state(), str(path))
        args = parse(compute_entropy, [
            "--quantity", "h_cond_vn", "--state", str(path), "--partition", "A:0;B:1",
            "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["value_bits"] == pytest.approx(-1.0)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        args = parse(compute_entropy, [
            "--quantity", "von_neumann", "--state", str(path), "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        args = parse(compute_entropy, [
            "--quantity", "von_neumann", "--state", str(tmp_path / "absent.json"),
            "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_USAGE

    def test_missing_epsilon(self, state_files, tmp_path):
        rho, sigma = state_files
        args = parse(compute_entropy, [
            "--quantity", "d_hypo", "--state", rho, "--sigma", sigma, "--log-dir", str(tmp_path / "logs"),
        ])
        assert compute_entropy.main(args) == EXIT_USAGE

    def test_unknown_quantity(self, state_files):
        rho, _ = state_files
        with pytest.raises(SystemExit) as e:
            parse(compute_entropy, ["--quantity", "d_bogus", "--state", rho])
        assert e.value.code == 2


class TestVerify:
    def test_unknown_check(self, tmp_path):
        args = parse(verify_propositions, ["--check", "bogus", "--log-dir", str(tmp_path)])
        assert verify_propositions.main(args) == EXIT_USAGE

    def test_nothing_selected(self, tmp_path):
        args = parse(verify_propositions, ["--log-dir", str(tmp_path)])
        assert verify_propositions.main(args) == EXIT_USAGE

    def test_invalid_dims(self, tmp_path):
        args = parse(verify_propositions, ["--all", "--dims", "1", "--log-dir", str(tmp_path)])
        assert verify_propositions.main(args) == EXIT_USAGE

    def test_zero_trials(self, tmp_path, capsys):
        args = parse(verify_propositions, [
            "--check", "dh_core", "--trials", "0", "--log-dir", str(tmp_path),
        ])
        assert verify_propositions.main(args) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert record["passed"]
        assert [c["check_name"] for c in record["checks"]] == ["dh_core"]
        assert record["args"]["checks"] == ["dh_core"]

    @pytest.mark.slow
    def test_corruption(self, tmp_path):
        out = tmp_path / "report.json"
        args = parse(verify_propositions, [
            "--check", "dh_core", "--trials", "2", "--dims", "2", "--epsilons", "0.1,0.25",
            "--corruption", "0.1", "--out", str(out), "--log-dir", str(tmp_path),
        ])
        assert verify_propositions.main(args) == EXIT_VIOLATIONS
        record = json.loads(out.read_text())
        assert record["total_violations"] > 0


class TestGenerate:
    def test_reproducible(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for out in (first, second):
            args = parse(generate_instances, [
                "--dims", "2,2", "--seed", "11", "--out", str(out), "--log-dir", str(tmp_path),
            ])
            assert generate_instances.main(args) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert read_state(str(first)).layout.dims == (2, 2)

    def test_count(self, tmp_path):
        args = parse(generate_instances, [
            "--kind", "pure", "--dims", "3", "--count", "2",
            "--out", str(tmp_path / "pure.json"), "--log-dir", str(tmp_path),
        ])
        assert generate_instances.main(args) == EXIT_OK
        for i in range(2):
            rho = read_state(str(tmp_path / f"pure_{i}.json"))
            assert np.linalg.matrix_rank(rho.matrix, tol=1e-9) == 1

    def test_channel(self, tmp_path):
        out = tmp_path / "channel.json"
        args = parse(generate_instances, [
            "--kind", "channel", "--dims", "2,3", "--out", str(out), "--log-dir", str(tmp_path),
        ])
        assert generate_instances.main(args) == EXIT_OK
        channel = read_channel(str(out))
        assert channel.trace_preserving
        assert (channel.dim_in, channel.dim_out) == (2, 3)

    def test_bad_count(self, tmp_path):
        args = parse(generate_instances, ["--dims", "2", "--count", "0", "--log-dir", str(tmp_path)])
        assert generate_instances.main(args) == EXIT_USAGE

    def test_zero_dimension(self):
        with pytest.raises(SystemExit) as e:
            parse(generate_instances, ["--dims", "0"])
        assert e.value.code == 2


class TestCli:
    def test_dispatch(self, tmp_path):
        out = tmp_path / "state.json"
        args = parse(cli, ["gen", "--dims", "2", "--out", str(out), "--log-dir", str(tmp_path)])
        assert args.command == "gen"
        assert cli.main(args) == EXIT_OK
        assert out.exists()

    def test_command_required(self):
        with pytest.raises(SystemExit) as e:
            parse(cli, [])
        assert e.value.code == 2
