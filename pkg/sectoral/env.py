"""
Copyright 2024 The sectoral-nk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

   https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

import os
from pathlib import Path


class SectoralEnv:
    """
    Reads the environment variables that configure sectoral runs.

    :param threads: worker count for parallel candidate and chain evaluation; falls back to ``SECTORAL_THREADS``
    :param home: work directory for experiments and cached benchmarks; falls back to ``SECTORAL_HOME``
    """

    default_home = ".sectoral"

    def __init__(self, threads: int = None, home: str = None):
        self.threads = threads or SectoralEnv.get_threads()
        self.home = Path(home) if home else SectoralEnv.get_home()

    @staticmethod
    def get_threads() -> int:
        """
        Number of workers, ``SECTORAL_THREADS`` or min(4, cpu count).
        """
        env_threads = os.getenv("SECTORAL_THREADS")
        if env_threads:
            return max(1, int(env_threads))
        return max(1, min(4, os.cpu_count() or 1))

    @staticmethod
    def get_home() -> Path:
        """
        Base directory for local experiments.
        """
        env_home = os.getenv("SECTORAL_HOME")
        if env_home:
            return Path(env_home)
        return Path.home() / SectoralEnv.default_home
