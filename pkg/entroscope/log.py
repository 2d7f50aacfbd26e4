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

import os
import logging
import socket
from typing import Union

from entroscope.utils.file_utils import expand_outdir_and_mkdir


def create_logger(rank, log_file, name='logger', log_level=logging.INFO):
  # Create the logger
  logger = logging.getLogger(name)
  logger.setLevel(log_level)

  myhost = socket.gethostname()

  extra = {'host': myhost, 'rank': rank}
  formatter = logging.Formatter(
      '%(asctime)s | %(host)s | Rank %(rank)s | %(message)s')

  # File handler for output, stderr when no file is given
  if log_file is None:
    handler = logging.StreamHandler()
  else:
    handler = logging.FileHandler(log_file, mode='a')
  handler.setFormatter(formatter)

  # Loggers are process-wide, so re-creating one must not duplicate output
  if not any(_same_target(h, handler) for h in logger.handlers):
    logger.addHandler(handler)
  else:
    handler.close()

  logger = logging.LoggerAdapter(logger, extra)

  return logger


def create_module_logger(
    logger: Union[logging.LoggerAdapter, str, None],
    name: str,
    log_level=logging.INFO,
):
  """
  Resolves the ``logger`` argument accepted by long running classes.
  A string is a log directory that receives ``<name>.log``, None logs
  to stderr and an existing adapter is returned unchanged.
  """
  if isinstance(logger, logging.LoggerAdapter):
    return logger
  if logger is None:
    return create_logger(rank=0, log_file=None, name=name, log_level=log_level)

  log_dir = expand_outdir_and_mkdir(logger)
  return create_logger(
      rank=0,
      log_file=os.path.join(log_dir, f'{name}.log'),
      name=name,
      log_level=log_level,
  )


def _same_target(existing, new):
  if isinstance(existing, logging.FileHandler) and isinstance(new, logging.FileHandler):
    return existing.baseFilename == new.baseFilename
  return type(existing) is type(new) and not isinstance(existing, logging.FileHandler)


def get_library_logger(name, rank=0):
  """
  Adapter over a handler-less named logger, so library code stays quiet
  unless the application configures ``logging``.
  """
  extra = {'host': socket.gethostname(), 'rank': rank}
  return logging.LoggerAdapter(logging.getLogger(name), extra)
