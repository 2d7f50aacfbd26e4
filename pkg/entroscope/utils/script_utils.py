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
import os
from typing import List, Tuple

import pandas as pd

from entroscope import __version__
from entroscope.states.quantum_state import UnknownSubsystemError
from entroscope.utils.file_utils import expand_outdir_and_mkdir, write_json_report
from entroscope.utils.state_utils import labels_of


def add_parallel_args(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    """
    Adds the arguments that control how verification trials are scheduled
    """
    parser.add_argument(
        "--scheduler-address",
        type=str,
        default=None,
        help="Address to the scheduler of a created dask cluster. If not provided"
        " trials run on the local threaded scheduler.",
    )
    parser.add_argument(
        "--scheduler-file",
        type=str,
        default=None,
        help="Path to the scheduler file of a created dask cluster. If not provided"
        " trials run on the local threaded scheduler.",
    )
    parser.add_argument(
        "--n-workers",
        type=int,
        default=None,
        help="The number of threads running trials. Defaults to ENTROSCOPE_THREADS"
        " or the CPU count, and is always capped by ENTROSCOPE_THREADS.",
    )

    return parser


def add_verification_args(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    """
    Adds the sampling arguments shared by the verification and generation scripts
    """
    parser.add_argument(
        "--seed",
        type=int,
        default=42,
        help="Master seed. Every sampled instance is a function of this seed.",
    )
    parser.add_argument(
        "--trials",
        type=int,
        default=100,
        help="Number of random trials per check.",
    )
    parser.add_argument(
        "--dims",
        type=parse_dims,
        default=None,
        help="Comma separated subsystem dimensions, e.g. '2,3'.",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=1e-6,
        help="A relation counts as violated when its margin drops below -tolerance.",
    )
    parser.add_argument(
        "--log-dir",
        type=str,
        default=None,
        help="Directory receiving the log files. Logs go to stderr when not provided.",
    )

    return parser


def parse_dims(value: str) -> List[int]:
    """'2,3' -> [2, 3]. Every entry must be a positive integer."""
    try:
        dims = [int(v) for v in str(value).replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Dimensions must be comma separated integers, got '{value}'") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"Dimensions must be positive integers, got '{value}'")
    return dims


def parse_epsilons(value: str) -> List[float]:
    try:
        return [float(v) for v in str(value).replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Epsilons must be comma separated numbers, got '{value}'") from None


def parse_partition(value: str) -> Tuple[List[str], List[str]]:
    """
    Parses the partition syntax "A:0;B:1" into (A-labels, B-labels).

    Each side lists subsystem labels separated by commas, so "A:0,1;B:2"
    conditions the first two subsystems on the third. The B side may be
    empty ("A:0;B:") or left out ("A:0").
    """
    sides = {}
    for part in str(value).split(";"):
        part = part.strip()
        if not part:
            continue
        name, sep, labels = part.partition(":")
        name = name.strip().upper()
        if not sep or name not in ("A", "B"):
            raise argparse.ArgumentTypeError(
                f"Partition sides look like 'A:<labels>' or 'B:<labels>', got '{part}'"
            )
        if name in sides:
            raise argparse.ArgumentTypeError(f"Partition side '{name}' given twice in '{value}'")
        sides[name] = [label.strip() for label in labels.split(",") if label.strip()]
    if not sides.get("A"):
        raise argparse.ArgumentTypeError(f"Partition '{value}' names no subsystem on side A")
    return sides["A"], sides.get("B", [])


def partition_for_layout(layout, sides: Tuple[List[str], List[str]]) -> Tuple[List[str], List[str]]:
    """
    Maps parsed partition tokens onto subsystem labels of ``layout``. A
    token is a label when the layout has one of that name, otherwise it is
    read as a zero-based subsystem index.
    """
    def to_label(token):
        if token in layout.labels:
            return token
        try:
            index = int(token)
        except ValueError:
            raise UnknownSubsystemError(
                f"Partition names unknown subsystem '{token}', layout has {list(layout.labels)}"
            ) from None
        if index < 0:
            raise UnknownSubsystemError(f"Subsystem indices are zero-based, got {index}")
        return labels_of(layout, [index])[0]

    a_tokens, b_tokens = sides
    return [to_label(t) for t in a_tokens], [to_label(t) for t in b_tokens]


EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_SOLVER_FAILURE = 3


def add_report_args(parser: argparse.ArgumentParser, default_out: str = None) -> argparse.ArgumentParser:
    """
    Adds the arguments that select where and how a report is written
    """
    parser.add_argument(
        "--out",
        type=str,
        default=default_out,
        help="Path of the report file. The report is printed to stdout if not provided.",
    )
    parser.add_argument(
        "--format",
        type=str,
        default="json",
        choices=["json", "csv"],
        help="Report format.",
    )

    return parser


def report_header(args) -> dict:
    """Version, resolved arguments and seed heading every report."""
    resolved = {key: value for key, value in sorted(vars(args).items()) if not callable(value)}
    return {
        "version": __version__,
        "args": resolved,
        "seed": resolved.get("seed"),
    }


def write_report(record: dict, frame: pd.DataFrame, args):
    """
    Writes ``record`` as JSON or ``frame`` as CSV according to ``args.format``,
    to ``args.out`` or to stdout.
    """
    if args.format == "csv":
        if args.out:
            expand_outdir_and_mkdir(os.path.dirname(os.path.abspath(args.out)))
            frame.to_csv(args.out, index=False)
        else:
            print(frame.to_csv(index=False), end="")
    elif args.out:
        write_json_report(record, args.out)
    else:
        print(json.dumps(record))
