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

import yaml

from entroscope.checks import get_check
from entroscope.checks.check_base import CheckConfig
from entroscope.modules.suite import CheckSuite

# Top-level suite keys that map onto CheckConfig fields
CONFIG_KEYS = ("seed", "trials", "dims", "epsilons", "tolerance", "n_workers")


def build_check_config(params, defaults=None):
  # Fields missing from the file keep their defaults
  defaults = CheckConfig() if defaults is None else defaults
  overrides = {key: params[key] for key in CONFIG_KEYS if params.get(key) is not None}
  return defaults.replace(**overrides)


def build_check(check_config, suite_config, logger="./"):
  # Import the check, a registered name or a dotted class path
  check_class = get_check(check_config['name'])

  # Check if constructor has been provided
  if ('params' not in check_config) or (check_config['params'] is None):
    check_config['params'] = {}

  check = check_class(logger=logger, **check_config["params"])
  cfg = build_check_config(check_config.get("config") or {}, suite_config)

  return check, cfg


def build_check_suite(suite_config_file, defaults=None, logger="./"):
  # Get the suite config file
  with open(suite_config_file, 'r') as config_file:
    suite_params = yaml.load(config_file, Loader=yaml.FullLoader)

  if not isinstance(suite_params, dict) or not suite_params.get("checks"):
    raise ValueError(f"Suite config {suite_config_file} must define a non-empty 'checks' list")

  suite_config = build_check_config(suite_params, defaults)
  checks = []
  for check_config in suite_params.get("checks"):
    checks.append(build_check(check_config, suite_config, logger))

  return CheckSuite(checks, logger=logger)
