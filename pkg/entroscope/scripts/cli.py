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

from entroscope import __version__
from entroscope.scripts import compute_entropy, generate_instances, verify_propositions

COMMANDS = {
    "compute": compute_entropy,
    "verify": verify_propositions,
    "gen": generate_instances,
}

COMMAND_HELP = {
    "compute": "Compute one entropy quantity of states stored in JSON files.",
    "verify": "Run the randomized verification checks and write a report.",
    "gen": "Generate seeded random states and channels as JSON files.",
}


def main(args):
  return COMMANDS[args.command].main(args)


def attach_args(parser=argparse.ArgumentParser(
    """
    Hypothesis testing entropies of finite dimensional quantum states.
    Run 'entroscope <command> --help' for the options of a command.
    """,
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
)):
  parser.add_argument("--version", action="version", version=f"entroscope {__version__}")
  subparsers = parser.add_subparsers(dest="command", required=True)
  for name, module in COMMANDS.items():
    subparser = subparsers.add_parser(
        name,
        help=COMMAND_HELP[name],
        description=COMMAND_HELP[name],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    module.attach_args(subparser)

  return parser


def console_script():
  sys.exit(main(attach_args().parse_args()))


if __name__ == "__main__":
  console_script()
