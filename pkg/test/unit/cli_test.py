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

import io
import json
import os
import unittest
from contextlib import redirect_stdout

import pandas as pd
from pytest import raises

from sectoral.cli import RunConfig, build_parser, main
from sectoral.exceptions import ConfigurationException

from .fixtures import temp_home


def run_cli(*argv):
    """Runs the command line with fresh output and store directories; returns exit code, stdout and out dir."""
    out = temp_home()
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main([*argv, "--out", out, "--home", temp_home()])
    return code, buffer.getvalue(), out


def read_manifest(out):
    with open(os.path.join(out, "manifest.json"), encoding="utf-8") as handle:
        return json.load(handle)


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig.from_args(build_parser().parse_args(["steady"]))
        self.assertEqual(config.preset, "symmetric")
        self.assertEqual(config.order, 1)
        self.assertEqual(config.params, ["lambda_mob", "theta_c", "theta_d"])

    def test_coefficients(self):
        args = build_parser().parse_args(["solve", "--coef", "tau=0.3", "--coef", "alpha_pi=2"])
        self.assertEqual(RunConfig.from_args(args).coefs, {"tau": 0.3, "alpha_pi": 2.0})
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["solve", "--coef", "tau"]))
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["solve", "--coef", "kappa=1"]))
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["solve", "--coef", "tau=high"]))

    def test_invalid_arguments(self):
        with raises(ConfigurationException):
            build_parser().parse_args(["solve", "--order", "5"])
        with raises(ConfigurationException):
            build_parser().parse_args([])
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["steady", "--lambda", "2", "--mu", "0.5"]))
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["steady", "--lambda", "-1"]))
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["steady", "--wr", "-5"]))

    def test_config_file(self):
        path = os.path.join(temp_home(), "run.yml")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("preset: stylized-durable\nseed: 5\ncoefs:\n  tau: 0.25\n")
        config = RunConfig.from_args(build_parser().parse_args(["irf", "--config", path, "--seed", "7"]))
        self.assertEqual(config.preset, "stylized-durable")
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.coefs, {"tau": 0.25})
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("preset: symmetric\ncolour: red\n")
        with raises(ConfigurationException):
            RunConfig.from_args(build_parser().parse_args(["irf", "--config", path]))


class TestCommands(unittest.TestCase):
    def test_presets(self):
        code, stdout, out = run_cli("presets")
        self.assertEqual(code, 0)
        self.assertIn("table1-panel-i", stdout.split())
        frame = pd.read_csv(os.path.join(out, "presets.csv"))
        self.assertIn("tableG5-implementable", set(frame["name"]))
        manifest = read_manifest(out)
        self.assertEqual(manifest["exit_code"], 0)
        self.assertEqual(manifest["files"], ["presets.csv"])
        self.assertEqual(manifest["config"]["command"], "presets")

    def test_steady(self):
        code, _, out = run_cli("steady", "--preset", "symmetric")
        self.assertEqual(code, 0)
        frame = pd.read_csv(os.path.join(out, "steady.csv")).set_index("variable")
        self.assertAlmostEqual(frame.loc["R", "level"], 1.0 / 0.99, places=9)
        with open(os.path.join(out, "steady.json"), encoding="utf-8") as handle:
            report = json.load(handle)
        self.assertAlmostEqual(report["chi_c"], 0.5)

    def test_solve_reports_indeterminacy(self):
        code, _, out = run_cli("solve", "--coef", "rho_r=0", "--coef", "alpha_pi=0.5", "--coef", "alpha_y=0")
        self.assertEqual(code, 0)
        with open(os.path.join(out, "solution.json"), encoding="utf-8") as handle:
            self.assertEqual(json.load(handle)["verdict"], "indeterminate")

    def test_irf(self):
        code, _, out = run_cli("irf", "--shocks", "A", "--horizon", "5")
        self.assertEqual(code, 0)
        frame = pd.read_csv(os.path.join(out, "irf_A.csv"))
        self.assertEqual(list(frame.columns), ["t", "variable", "value"])
        self.assertEqual(len(frame), 5 * 22)

    def test_same_seed_writes_identical_files(self):
        def run(seed):
            code, _, out = run_cli("simulate", "--order", "2", "--periods", "30", "--seed", str(seed))
            self.assertEqual(code, 0)
            with open(os.path.join(out, "simulation.csv"), "rb") as handle:
                return handle.read()

        first = run(5)
        self.assertEqual(first, run(5))
        self.assertNotEqual(first, run(6))

    def test_manifest_reload(self):
        code, _, out = run_cli("solve", "--lambda", "2", "--seed", "3")
        self.assertEqual(code, 0)
        manifest = os.path.join(out, "manifest.json")
        code, _, again = run_cli("solve", "--config", manifest)
        self.assertEqual(code, 0)
        config = read_manifest(again)["config"]
        self.assertEqual(config["lambda_mob"], "2")
        self.assertEqual(config["seed"], 3)
        self.assertEqual(config["out"], again)
        code, stdout, _ = run_cli("steady", "--config", manifest)
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(stdout)["code"], "CONFIG_ERROR")


class TestErrors(unittest.TestCase):
    def test_estimate_without_data(self):
        code, stdout, _ = run_cli("estimate")
        self.assertEqual(code, 2)
        report = json.loads(stdout)
        self.assertEqual(report["code"], "DATA_REQUIRED")
        self.assertEqual(report["type"], "DataRequired")

    def test_unknown_preset(self):
        code, stdout, _ = run_cli("steady", "--preset", "table9-panel-x")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(stdout)["code"], "PRESET_NOT_FOUND")

    def test_bad_option(self):
        code, stdout, _ = run_cli("irf", "--horizon", "many")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(stdout)["code"], "CONFIG_ERROR")

    def test_table_needs_a_name(self):
        code, stdout, _ = run_cli("table")
        self.assertEqual(code, 2)
        self.assertIn("--name", json.loads(stdout)["message"])

    def test_check_rejects_the_fully_fledged_economy(self):
        code, stdout, _ = run_cli("check", "--preset", "fully-fledged")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(stdout)["code"], "CONFIG_ERROR")
