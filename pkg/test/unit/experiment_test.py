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
import unittest

import numpy as np

from sectoral.__version__ import __version__
from sectoral.exceptions import SteadyStateException
from sectoral.experiment import LocalExperiment, Run, RunStatus

from .fixtures import temp_home


class TestLocalExperiment(unittest.TestCase):
    """
    Runs, artifacts and cached computations of the local experiment store.
    """

    EXP_NAME = "unittest-exp"

    def setUp(self):
        self.home = temp_home()
        self.experiment = LocalExperiment(self.EXP_NAME, basedir=self.home)

    def test_work_dir(self):
        self.assertTrue(os.path.isdir(os.path.join(self.home, "experiments", self.EXP_NAME, "artifacts")))
        self.assertEqual(self.experiment.name, self.EXP_NAME)

    def test_run_round_trip(self):
        with self.experiment.start_run() as run:
            run.log_params({"preset": "symmetric", "lambda": np.float64(1.0)})
            run.log_metric("omega100", np.float64(0.0123))
            run.log_artifact("levels", {"R": 1.0101})
        loaded = LocalExperiment(self.EXP_NAME, basedir=self.home).get_run(run.id)
        self.assertIsNotNone(loaded)
        self.assertEqual(loaded.get_param("preset"), "symmetric")
        self.assertEqual(loaded.get_param("lambda"), 1.0)
        self.assertAlmostEqual(loaded.get_metric("omega100"), 0.0123)
        self.assertEqual(loaded.get_artifact("levels"), {"R": 1.0101})
        self.assertIsNotNone(loaded.took)
        self.assertEqual(loaded.status, RunStatus.FINISHED)
        self.assertEqual(loaded.version, __version__)
        self.assertIsNone(loaded.error)

    def test_failed_run_is_recorded(self):
        with self.assertRaises(SteadyStateException):
            with self.experiment.start_run() as run:
                raise SteadyStateException("no convergence")
        last = self.experiment.last_run()
        self.assertEqual(last.id, run.id)
        self.assertTrue(last.failed)
        self.assertEqual(last.error["type"], "SteadyStateException")
        self.assertEqual(last.error["code"], SteadyStateException.code)
        self.assertEqual(last.error["message"], "no convergence")

    def test_cached_computes_once(self):
        calls = []

        def compute():
            calls.append(1)
            return {"welfare": -123.4}

        first = self.experiment.cached("summary", compute, key="economy|w_r=0")
        second = self.experiment.cached("summary", compute, key="economy|w_r=0")
        third = self.experiment.cached("summary", compute, key="economy|w_r=5")
        self.assertEqual(first, second)
        self.assertEqual(third, {"welfare": -123.4})
        self.assertEqual(len(calls), 2)
        self.assertEqual(len(self.experiment.find_runs(key="economy|w_r=0")), 1)

    def test_reset(self):
        with self.experiment.start_run() as run:
            run.log_artifact("x", 1)
        self.experiment.reset()
        self.assertEqual(self.experiment.runs(), [])
        self.assertIsNone(self.experiment.last_run())


class TestRun(unittest.TestCase):
    def setUp(self):
        self.experiment = LocalExperiment("unittest-run", basedir=temp_home())

    def test_start_twice(self):
        run = self.experiment.start_run()
        self.assertEqual(run.status, RunStatus.CREATED)
        run.start()
        self.assertEqual(run.status, RunStatus.RUNNING)
        with self.assertRaises(ValueError):
            run.start()

    def test_to_json(self):
        run = Run(self.experiment)
        run.log_param("seed", 3)
        run.set_meta("command", "irf")
        doc = run.to_json()
        self.assertEqual(doc["params"], {"seed": 3})
        self.assertEqual(doc["meta"], {"command": "irf"})
        self.assertEqual(doc["artifacts"], [])
        self.assertIsNone(doc["started"])
        self.assertEqual(doc["status"], "created")
        restored = Run.from_json(doc, self.experiment)
        self.assertEqual(restored.id, run.id)
        self.assertEqual(restored.get_meta("command"), "irf")
