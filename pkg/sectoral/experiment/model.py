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

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import cuid

from ..__version__ import __version__
from ..exceptions import error_report
from ..timer import Timer
from ..utils import to_builtin


class RunStatus(str, Enum):
    """Lifecycle of a run."""

    CREATED = "created"
    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"


@dataclass
class Run:
    # pylint: disable=too-many-instance-attributes,invalid-name,redefined-builtin
    """
    Record of one CLI command or cached computation (a planner benchmark, a posterior).

    Params identify the computation and are what :meth:`LocalExperiment.find_runs` matches on; metrics hold
    scalar results such as ``omega100`` or the acceptance rate; artifacts are pickled when the run is saved.
    A run that raises keeps the error report and is saved as ``failed``.
    """

    experiment: Any = field(repr=False, compare=False)
    id: str = field(default_factory=cuid.slug)
    status: RunStatus = RunStatus.CREATED
    started: Optional[float] = None
    took: Optional[float] = None
    version: str = __version__
    params: Dict[str, Any] = field(default_factory=dict)
    metrics: Dict[str, Any] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)
    error: Optional[Dict[str, str]] = None
    artifacts: Dict[str, Any] = field(default_factory=dict, repr=False)
    _timer: Optional[Timer] = field(default=None, init=False, repr=False, compare=False)

    def start(self) -> "Run":
        """
        Starts timing the run.

        :raises ValueError: when the run was already started
        """
        if self.status != RunStatus.CREATED:
            raise ValueError(f"Run {self.id} is already {self.status.value}")
        self._timer = Timer()
        self._timer.start()
        self.started = self._timer.start_time
        self.status = RunStatus.RUNNING
        return self

    def stop(self, exc: Optional[BaseException] = None) -> None:
        """Stops the run, marks it finished or failed, and saves it with its artifacts."""
        self.took = self._timer.stop() if self._timer is not None else None
        if exc is not None:
            self.error = error_report(exc)
        self.status = RunStatus.FAILED if exc is not None else RunStatus.FINISHED
        self.experiment.save_run(self)

    def __enter__(self):
        return self.start()

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop(exc_val)

    @property
    def failed(self) -> bool:
        return self.status == RunStatus.FAILED

    def get_param(self, name: str):
        return self.params.get(name)

    def get_metric(self, name: str):
        return self.metrics.get(name)

    def get_meta(self, name: str):
        return self.meta.get(name)

    def get_artifact(self, name: str):
        return self.artifacts.get(name)

    def log_param(self, name: str, value) -> None:
        self.params[name] = to_builtin(value)

    def log_params(self, params) -> None:
        for name, value in params.items():
            self.log_param(name, value)

    def log_metric(self, name: str, value) -> None:
        self.metrics[name] = to_builtin(value)

    def log_metrics(self, metrics) -> None:
        for name, value in metrics.items():
            self.log_metric(name, value)

    def set_meta(self, name: str, value) -> None:
        self.meta[name] = to_builtin(value)

    def log_artifact(self, name: str, artifact) -> None:
        """Keeps ``artifact`` to be pickled when the run is saved."""
        self.artifacts[name] = artifact

    def to_json(self) -> Dict[str, Any]:
        """Index entry of the run; artifacts are listed by name only."""
        return {
            "id": self.id,
            "status": self.status.value,
            "started": self.started,
            "took": self.took,
            "version": self.version,
            "params": self.params,
            "metrics": self.metrics,
            "meta": self.meta,
            "error": self.error,
            "artifacts": sorted(self.artifacts),
        }

    @classmethod
    def from_json(cls, doc: Dict[str, Any], experiment, load_artifacts: bool = True) -> "Run":
        """
        Rebuilds a run from its index entry.

        :param load_artifacts: unpickle the artifacts right away, otherwise they are listed with ``None`` values
        """
        run = cls(
            experiment,
            id=doc["id"],
            status=RunStatus(doc.get("status", RunStatus.FINISHED.value)),
            started=doc.get("started"),
            took=doc.get("took"),
            version=doc.get("version", __version__),
            params=dict(doc.get("params") or {}),
            metrics=dict(doc.get("metrics") or {}),
            meta=dict(doc.get("meta") or {}),
            error=doc.get("error"),
        )
        for name in doc.get("artifacts") or ():
            run.artifacts[name] = experiment.load_artifact(run, name) if load_artifacts else None
        return run
