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

import json
import math
import os
import unittest
from pathlib import Path
from unittest import mock

import numpy as np
from pytest import raises

from sectoral.env import SectoralEnv
from sectoral.exceptions import ConfigurationException
from sectoral.properties import PropertyManager
from sectoral.timer import Timer
from sectoral.utils import json_str, to_builtin

from .fixtures import temp_home


class TestSectoralEnv(unittest.TestCase):
    def test_threads_from_environment(self):
        with mock.patch.dict(os.environ, {"SECTORAL_THREADS": "3"}):
            self.assertEqual(SectoralEnv.get_threads(), 3)
            self.assertEqual(SectoralEnv().threads, 3)
        with mock.patch.dict(os.environ, {"SECTORAL_THREADS": "0"}):
            self.assertEqual(SectoralEnv.get_threads(), 1)

    def test_default_threads(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertGreaterEqual(SectoralEnv.get_threads(), 1)
            self.assertLessEqual(SectoralEnv.get_threads(), 4)

    def test_home(self):
        with mock.patch.dict(os.environ, {"SECTORAL_HOME": "/tmp/sectoral-home"}):
            self.assertEqual(SectoralEnv.get_home(), Path("/tmp/sectoral-home"))
        self.assertEqual(SectoralEnv(threads=2, home="/data/runs").home, Path("/data/runs"))
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(SectoralEnv.get_home().name, SectoralEnv.default_home)


class TestPropertyManager(unittest.TestCase):
    def test_dot_keys(self):
        props = PropertyManager({"config": {"preset": "symmetric"}})
        props.set("config.coefs.tau", 0.5)
        self.assertEqual(props.get("config.coefs"), {"tau": 0.5})
        self.assertTrue(props.is_key("config.preset"))
        self.assertFalse(props.is_key("config.seed"))
        self.assertEqual(props.get("config.seed", 7), 7)
        self.assertTrue(props.remove("config.preset"))
        self.assertFalse(props.remove("config.preset"))
        with raises(ValueError):
            props.set("", 1)

    def test_validate(self):
        props = PropertyManager({"config": {"preset": "symmetric", "colour": "red"}})
        props.validate(("config",))
        with raises(ConfigurationException):
            props.validate(("preset",), section="config")

    def test_save_and_load(self):
        path = os.path.join(temp_home(), "nested", "config.yml")
        PropertyManager({"runs": [{"id": "a"}]}).save(path)
        loaded = PropertyManager.from_file(path)
        self.assertEqual(loaded.get("runs"), [{"id": "a"}])
        self.assertTrue(loaded.is_key("meta.updated"))

    def test_json_documents(self):
        path = os.path.join(temp_home(), "manifest.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"config": {"command": "irf", "seed": 4}}, handle)
        self.assertEqual(PropertyManager.from_file(path).get("config.seed"), 4)
        with raises(FileNotFoundError):
            PropertyManager.from_file(path + ".missing")


class TestUtils(unittest.TestCase):
    def test_to_builtin(self):
        value = to_builtin({"a": np.float64(1.5), 2: (np.arange(2), np.int64(3)), "b": math.inf})
        self.assertEqual(value, {"a": 1.5, "2": [[0, 1], 3], "b": "inf"})

    def test_json_str_is_sorted(self):
        self.assertEqual(json_str({"b": 1, "a": np.float32(0.5)}), '{"a": 0.5, "b": 1}')

    def test_timer(self):
        timer = Timer()
        self.assertEqual(timer.elapsed, 0.0)
        with raises(ValueError):
            timer.stop()
        with Timer() as timer:
            pass
        self.assertGreaterEqual(timer.interval, 0.0)
        self.assertEqual(timer.elapsed, timer.interval)
        self.assertIsNotNone(timer.end_time)
