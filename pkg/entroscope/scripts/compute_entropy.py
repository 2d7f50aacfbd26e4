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
import sys

import pandas as pd

from entroscope.entropies.quantities import QUANTITIES, evaluate_quantity
from entroscope.log import create_module_logger
from entroscope.sdp.solver import SolverFailure
from entroscope.states.quantum_state import UnknownSubsystemError
from entroscope.utils.file_utils import StateFileError, read_state
from entroscope.utils.script_utils import (
    EXIT_OK,
    EXIT_SOLVER_FAILURE,
    EXIT_USAGE,
    add_report_args,
    parse_partition,
    partition_for_layout,
    report_header,
    write_report,
)


def compute(args):
  rho = read_state(args.state)
  sigma = read_state(args.sigma) if args.sigma else None
  partition = partition_for_layout(rho.layout, args.partition) if args.partition else None
  return evaluate_quantity(args.quantity, rho, sigma, args.epsilon, partition)


def main(args):
  logger = create_module_logger(args.log_dir, "compute_entropy")

  try:
    value = compute(args)
  except SolverFailure as e:
    logger.error(f"Solver failure: {e}")
    return EXIT_SOLVER_FAILURE
  except (StateFileError, UnknownSubsystemError, ValueError, OSError) as e:
    logger.error(f"Invalid input: {e}")
    return EXIT_USAGE

  result = {"quantity": args.quantity, "epsilon": args.epsilon, **value.to_dict()}
  key = "value_bits" if value.unit == "bits" else "value"
  logger.info(f"{args.quantity} = {result[key]}" + (" bits" if value.unit == "bits" else ""))
  record = {**report_header(args), **result}
  frame = pd.DataFrame([{
      "quantity": args.quantity,
      "epsilon": args.epsilon,
      key: result[key],
  }])
  write_report(record, frame, args)

  return EXIT_OK


def attach_args(parser=argparse.ArgumentParser(
    """
    Computes one entropy quantity of the states stored in JSON files
    and writes the value, in bits for entropies and divergences,
    together with the optimal test or solver diagnostics behind it.

    Relative quantities (d_hypo, d_max, d_min, d_max_smooth, kl_div,
    renyi0, fidelity_sdp) read --state and --sigma. Conditional ones
    (h_hypo, h_min, h_max, h_min_fixed_ratio, h_cond_vn) read --state
    and --partition, where "A:0;B:1" conditions subsystem 0 on
    subsystem 1.
    """,
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
)):
  parser.add_argument(
      "--quantity",
      type=str,
      required=True,
      choices=sorted(QUANTITIES),
      help="Name of the quantity to compute.",
  )
  parser.add_argument(
      "--state",
      type=str,
      required=True,
      help="JSON file holding the state rho.",
  )
  parser.add_argument(
      "--sigma",
      type=str,
      default=None,
      help="JSON file holding the second operand sigma of relative quantities.",
  )
  parser.add_argument(
      "--epsilon",
      type=float,
      default=None,
      help="Smoothing or success probability parameter. Required by d_hypo and h_hypo"
      " and optional for the smoothed quantities.",
  )
  parser.add_argument(
      "--partition",
      type=parse_partition,
      default=None,
      help="Partition of conditional quantities, e.g. 'A:0;B:1'. Sides list"
      " subsystem labels or zero-based indices separated by commas.",
  )
  parser.add_argument(
      "--log-dir",
      type=str,
      default=None,
      help="Directory receiving the log file. Logs go to stderr when not provided.",
  )
  parser = add_report_args(parser)

  return parser


def console_script():
  sys.exit(main(attach_args().parse_args()))


if __name__ == "__main__":
  console_script()
