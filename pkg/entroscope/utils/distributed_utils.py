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
from typing import List, Optional

import dask
from dask.distributed import Client

THREADS_ENV_VAR = "ENTROSCOPE_THREADS"


class DotDict:
    def __init__(self, d):
        self.__dict__['_data'] = d

    def __getattr__(self, name):
        if name in self._data:
            return self._data[name]
        else:
            raise AttributeError(f"No attribute '{name}'")


def get_num_workers(n_workers: Optional[int] = None) -> int:
    """
    Number of threads used for trial parallelism. An explicit ``n_workers``
    wins, otherwise ENTROSCOPE_THREADS, otherwise the CPU count. The
    environment variable also caps an explicit request.
    """
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got '{cap}'") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be positive, got {cap}")
    if n_workers is None:
        n_workers = cap if cap is not None else (os.cpu_count() or 1)
    elif n_workers < 1:
        raise ValueError(f"n_workers must be positive, got {n_workers}")
    if cap is not None:
        n_workers = min(n_workers, cap)
    return int(n_workers)


def get_client(args) -> Optional[Client]:
    """
    Connects to an existing Dask cluster when the arguments name one.
    Without a scheduler, trials run on the local threaded scheduler and
    None is returned.

    Args:
        args: An argparse Namespace object or a dict.
    Returns:
        A Dask client object or None.
    """
    # Helper class allows the user to pass in a dict instead of a parser
    if type(args) == dict:
        args = DotDict(args)

    scheduler_address = getattr(args, "scheduler_address", None)
    scheduler_file = getattr(args, "scheduler_file", None)
    if scheduler_address:
        if scheduler_file:
            raise ValueError(
                "Only one of scheduler_address or scheduler_file can be provided"
            )
        else:
            return Client(address=scheduler_address, timeout="30s")
    elif scheduler_file:
        return Client(scheduler_file=scheduler_file, timeout="30s")
    return None


def compute_tasks(tasks: List, client: Optional[Client] = None, n_workers: Optional[int] = None) -> List:
    """
    Computes a list of dask delayed objects, on ``client`` when given and
    on the threaded scheduler otherwise. Results keep the input order.
    """
    if not tasks:
        return []
    if client is not None:
        return list(client.gather(client.compute(tasks)))
    return list(
        dask.compute(*tasks, scheduler="threads", num_workers=get_num_workers(n_workers))
    )
