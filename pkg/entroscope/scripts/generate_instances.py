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
import os
import sys

import numpy as np

from entroscope.log import create_module_logger
from entroscope.states.channel import QChannel
from entroscope.utils.file_utils import write_channel, write_state
from entroscope.utils.sampling_utils import SAMPLE_KINDS, sample_instance
from entroscope.utils.script_utils import EXIT_OK, EXIT_USAGE, parse_dims


def instance_paths(out, count):
  if count == 1:
    return [out]
  stem, ext = os.path.splitext(out)
  return [f"{stem}_{i}{ext or '.json'}" for i in range(count)]


def main(args):
  logger = create_module_logger(args.log_dir, "generate_instances")

  if args.count < 1:
    logger.error(f"--count must be positive, got {args.count}")
    return EXIT_USAGE

  # One child seed per instance, so instance i is the same for any --count
  seeds = np.random.SeedSequence(args.seed).spawn(args.count)
  paths = instance_paths(args.out, args.count)
  for seed, path in zip(seeds, paths):
    try:
      instance = sample_instance(args.kind, args.dims, rank=args.rank, seed=seed, n_kraus=args.n_kraus)
    except ValueError as e:
      logger.error(f"Cannot generate {args.kind} with dims {args.dims}: {e}")
      return EXIT_USAGE
    if isinstance(instance, QChannel):
      write_channel(instance, path)
    else:
      write_state(instance, path)
    logger.info(f"Wrote {args.kind} {args.dims} to {path}")

  return EXIT_OK


def attach_args(parser=argparse.ArgumentParser(
    """
    Generates seeded random states and channels and writes them as
    JSON instance files. Re-running with the same seed reproduces the
    files byte for byte.
    """,
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
)):
  parser.add_argument(
      "--kind",
      type=str,
      default="state",
      choices=list(SAMPLE_KINDS),
      help="Kind of instance. Channels read --dims as 'dim_in' or 'dim_in,dim_out'.",
  )
  parser.add_argument(
      "--dims",
      type=parse_dims,
      required=True,
      help="Comma separated subsystem dimensions, e.g. '2,2'.",
  )
  parser.add_argument(
      "--rank",
      type=int,
      default=None,
      help="Rank of sampled mixed states. Full rank if not provided.",
  )
  parser.add_argument(
      "--n-kraus",
      type=int,
      default=None,
      help="Number of operator terms of sampled channels.",
  )
  parser.add_argument(
      "--seed",
      type=int,
      default=42,
      help="Master seed of the generated instances.",
  )
  parser.add_argument(
      "--count",
      type=int,
      default=1,
      help="Number of instances. With more than one, files are suffixed _0, _1, ...",
  )
  parser.add_argument(
      "--out",
      type=str,
      default="instance.json",
      help="Path of the instance file.",
  )
  parser.add_argument(
      "--log-dir",
      type=str,
      default=None,
      help="Directory receiving the log file. Logs go to stderr when not provided.",
  )

  return parser


def console_script():
  sys.exit(main(attach_args().parse_args()))


if __name__ == "__main__":
  console_script()
