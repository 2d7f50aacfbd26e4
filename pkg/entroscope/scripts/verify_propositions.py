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

import yaml

from entroscope.checks import CHECKS, UnknownCheckError
from entroscope.checks.check_base import CheckConfig
from entroscope.log import create_module_logger
from entroscope.modules.suite import (
    CheckSuite,
    has_solver_failures,
    reports_to_frame,
    resolve_selection,
    suite_summary,
    total_violations,
)
from entroscope.utils.config_utils import build_check_suite
from entroscope.utils.distributed_utils import get_client
from entroscope.utils.script_utils import (
    EXIT_OK,
    EXIT_SOLVER_FAILURE,
    EXIT_USAGE,
    EXIT_VIOLATIONS,
    add_parallel_args,
    add_report_args,
    add_verification_args,
    parse_epsilons,
    report_header,
    write_report,
)


def check_config_from_args(args):
  defaults = CheckConfig()
  return CheckConfig(
      seed=args.seed,
      trials=args.trials,
      dims=args.dims if args.dims else defaults.dims,
      epsilons=args.epsilons if args.epsilons else defaults.epsilons,
      tolerance=args.tolerance,
      n_workers=args.n_workers,
  )


def build_suite(args):
  cfg = check_config_from_args(args)
  if args.config:
    return build_check_suite(args.config, defaults=cfg, logger=args.log_dir)

  if not args.all and not args.checks:
    raise ValueError("Select checks with --check, --all or --config")
  classes = resolve_selection(None if args.all else args.checks)
  checks = [(cls(corruption=args.corruption, logger=args.log_dir), cfg) for cls in classes]
  return CheckSuite(checks, logger=args.log_dir)


def main(args):
  logger = create_module_logger(args.log_dir, "verify_propositions")

  try:
    suite = build_suite(args)
    client = get_client(args)
  except (UnknownCheckError, ValueError, OSError, yaml.YAMLError) as e:
    # KeyError quotes its message
    message = e.args[0] if isinstance(e, KeyError) and e.args else e
    logger.error(f"Invalid verification setup: {message}")
    return EXIT_USAGE

  reports = suite(client=client)

  record = {**report_header(args), **suite_summary(reports)}
  write_report(record, reports_to_frame(reports), args)

  if has_solver_failures(reports):
    logger.error("Verification hit solver failures")
    return EXIT_SOLVER_FAILURE
  if total_violations(reports) > 0:
    logger.error(f"Verification found {total_violations(reports)} violating trials")
    return EXIT_VIOLATIONS
  return EXIT_OK


def attach_args(parser=argparse.ArgumentParser(
    """
    Runs the randomized verification checks of the entropy relations
    and writes a report with one entry per check: trials run,
    violations, the worst margin per relation and a witness instance.

    Checks are selected with --check (repeatable), --all or a YAML
    suite given with --config. The exit code is 0 when every relation
    holds within --tolerance, 1 on violations and 3 on solver failures.
    """,
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
)):
  parser.add_argument(
      "--check",
      type=str,
      action="append",
      dest="checks",
      default=None,
      help=f"Check to run, one of {list(CHECKS)} or a dotted class path."
      " Can be given more than once.",
  )
  parser.add_argument(
      "--all",
      action="store_true",
      help="Run every registered check.",
  )
  parser.add_argument(
      "--config",
      type=str,
      default=None,
      help="YAML suite file. Its top-level seed, trials, dims, epsilons and"
      " tolerance take precedence over the command line values.",
  )
  parser.add_argument(
      "--epsilons",
      type=parse_epsilons,
      default=None,
      help="Comma separated epsilons sampled by the trials, each in (0, 1).",
  )
  parser.add_argument(
      "--corruption",
      type=float,
      default=0.0,
      help="Offset in bits added to every hypothesis testing value. A nonzero"
      " value must make the checks report violations.",
  )
  parser = add_verification_args(parser)
  parser = add_parallel_args(parser)
  parser = add_report_args(parser)

  return parser


def console_script():
  sys.exit(main(attach_args().parse_args()))


if __name__ == "__main__":
  console_script()
