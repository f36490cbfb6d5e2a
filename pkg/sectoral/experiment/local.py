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
from contextlib import closing
from datetime import datetime
from pathlib import Path
from typing import Callable, List, Optional

import dill

from ..env import SectoralEnv
from ..properties import PropertyManager
from ..utils import get_logger, log_message
from .model import Run

log = get_logger(__name__)


class LocalExperiment:
    """
    Keeps runs of one experiment under ``<basedir>/experiments/<name>``: a YAML run index and dill artifacts.
    """

    config_file = "config.yml"
    root_key = "experiment"
    dir_artifacts = "artifacts"
    dir_experiments = "experiments"
    runs_key = "runs"

    def __init__(self, name, basedir=None):
        self._name = name
        self._basedir = Path(basedir) if basedir else SectoralEnv.get_home()
        self._work_dir = self._basedir / self.dir_experiments / self.name
        self._work_dir.mkdir(parents=True, exist_ok=True)
        Path(self._work_dir / self.dir_artifacts).mkdir(parents=True, exist_ok=True)

        prop_mgr = PropertyManager()
        try:
            prop_mgr.load(str(self._work_dir / self.config_file))
        except FileNotFoundError:
            prop_mgr.set("meta", {"created": str(datetime.now())})
        self._config = prop_mgr

    @property
    def name(self) -> str:
        """Name of the experiment."""
        return self._name

    @property
    def work_dir(self) -> Path:
        """Directory holding the run index and artifacts."""
        return self._work_dir

    def start_run(self) -> Run:
        """
        Creates a run for the experiment.

        :rtype: :class:`sectoral.experiment.model.Run`
        """
        return Run(self)

    def save_run(self, run: Run) -> None:
        """
        Saves a run: replaces an existing entry with the same id, appends otherwise, and pickles its artifacts.
        """
        updated_runs = []
        runs = self._config.get(self._config.join(self.root_key, self.runs_key)) or []
        replaced = False
        for each_run in runs:
            if each_run["id"] == run.id:
                updated_runs.append(run.to_json())
                replaced = True
            else:
                updated_runs.append(each_run)
        if not replaced:
            updated_runs.append(run.to_json())

        self._config.set(self._config.join(self.root_key, self.runs_key), updated_runs)
        self._save_config()

        for name, artifact in run.artifacts.items():
            with closing(open(self.get_artifact_path(run, name), "wb")) as file_d:
                dill.dump(artifact, file_d)

    def reset(self):
        """
        Removes every run and artifact of the experiment.
        """
        self._config.remove(self.root_key)
        self.clean_dir(self._work_dir)
        self.clean_dir(self._work_dir / self.dir_artifacts)

    @staticmethod
    def clean_dir(dir_to_clean) -> None:
        """Removes only the files from the given directory."""
        for file_d in os.listdir(dir_to_clean):
            if os.path.isfile(os.path.join(dir_to_clean, file_d)):
                os.remove(os.path.join(dir_to_clean, file_d))

    def set_meta(self, prop: str, value) -> None:
        """Associates a JSON-serializable metadata property with the experiment."""
        meta = self._config.get("meta") or {}
        meta[prop] = value
        self._config.set("meta", meta)
        self._save_config()

    def runs(self, load_artifacts: bool = True) -> List[Run]:
        """Runs of the experiment in creation order."""
        props = self._config
        runs = props.get(props.join(self.root_key, self.runs_key)) or []
        return [Run.from_json(r, self, load_artifacts) for r in runs]

    def get_run(self, run_id: str) -> Optional[Run]:
        """Run with ``run_id`` or ``None``."""
        for run in self.runs(load_artifacts=False):
            if run.id == run_id:
                return Run.from_json(run.to_json(), self)
        return None

    def last_run(self) -> Optional[Run]:
        """The most recent run of this experiment."""
        runs = self.runs()
        return runs[-1] if runs else None

    def find_runs(self, **params) -> List[Run]:
        """Runs whose parameters match every keyword, artifacts loaded."""
        found = []
        for run in self.runs(load_artifacts=False):
            if all(run.params.get(k) == v for k, v in params.items()):
                found.append(Run.from_json(run.to_json(), self))
        return found

    def cached(self, artifact: str, compute: Callable[[], object], **params):
        """
        Returns ``artifact`` of the latest run with matching parameters, or computes it and records a new run.
        """
        found = self.find_runs(**params)
        if found and found[-1].get_artifact(artifact) is not None:
            log_message("Reusing %s from run %s", log, artifact, found[-1].id)
            return found[-1].get_artifact(artifact)
        with self.start_run() as run:
            run.log_params(params)
            value = compute()
            run.log_artifact(artifact, value)
        return value

    def _save_config(self):
        self._config.save(self._work_dir / self.config_file)

    def load_artifact(self, run: Run, name: str, extension: str = "pk"):
        """Unpickles an artifact of ``run``."""
        artifact_file = self.get_artifact_path(run, name, extension)
        with closing(open(artifact_file, "rb")) as file_d:
            return dill.load(file_d)

    def get_artifact_path(self, run: Run, name: str, extension: str = "pk") -> Path:
        """Local path of an artifact of ``run``."""
        return self._work_dir / self.dir_artifacts / "{}_{}.{}".format(name, run.id, extension)
