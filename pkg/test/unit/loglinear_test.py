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

import math
import unittest

from pytest import raises

from sectoral.diagnostics import delta_one_reduction, loglinear_check, loglinear_residuals, solve_economy
from sectoral.exceptions import ConfigurationException
from sectoral.loglinear import (
    LoglinCoefficients,
    durables_from_user_cost,
    loglinear_diagnostics,
    relative_price_recursion,
    relative_wage_gap,
    user_cost_hat,
    usercost_loglin,
)
from sectoral.model import VariantKind

from .fixtures import stylized_system, symmetric_params


class TestCoefficients(unittest.TestCase):
    def test_printed_weights(self):
        coefs = LoglinCoefficients.from_params(symmetric_params(), "printed")
        self.assertAlmostEqual(coefs.varpi1, -1.0 / 11.0)
        self.assertAlmostEqual(coefs.varpi2, 12.0 / 11.0)

    def test_consistent_weights(self):
        coefs = LoglinCoefficients.from_params(symmetric_params())
        self.assertAlmostEqual(coefs.varpi1, 1.0 / 13.0)
        self.assertAlmostEqual(coefs.varpi2, 12.0 / 13.0)
        self.assertAlmostEqual(coefs.varpi1 + coefs.varpi2, 1.0)

    def test_full_depreciation(self):
        coefs = LoglinCoefficients.from_params(symmetric_params())
        self.assertEqual(coefs.usercost_weight, 1.0)
        self.assertEqual(coefs.durability_weight, 0.0)
        self.assertEqual(usercost_loglin(coefs, 0.3, 5.0), 0.3)

    def test_durable_weights(self):
        coefs = LoglinCoefficients.from_calibration(6.0, 60.0, 0.025, 0.99)
        self.assertAlmostEqual(coefs.usercost_weight, 1.0 - 0.975 * 0.99)
        self.assertAlmostEqual(coefs.durability_weight, 0.975 * 0.99)

    def test_rejections(self):
        with raises(ConfigurationException):
            LoglinCoefficients.from_params(symmetric_params(theta_d=30.0))
        with raises(ConfigurationException):
            LoglinCoefficients.from_params(symmetric_params(), "textbook")
        with raises(ConfigurationException):
            LoglinCoefficients.from_calibration(1.0, 60.0, 1.0, 0.99)
        with raises(ConfigurationException):
            relative_wage_gap(-1.0, 0.1)

    def test_report(self):
        report = loglinear_diagnostics(LoglinCoefficients.from_params(symmetric_params(), "printed"))
        self.assertEqual(report["convention"], "printed")
        self.assertEqual(set(report), {"convention", "varpi1", "varpi2", "usercost_weight", "durability_weight"})


class TestRelations(unittest.TestCase):
    def test_relative_wage(self):
        self.assertAlmostEqual(relative_wage_gap(2.0, 0.1), 0.2)
        self.assertEqual(relative_wage_gap(0.0, 0.5), 0.0)

    def test_relative_price_recursion(self):
        coefs = LoglinCoefficients.from_params(symmetric_params())
        value = relative_price_recursion(coefs, 1.0, 0.2, 0.1, 0.05, 0.3, 0.99)
        expected = (0.2 - 0.1) / 13.0 + 12.0 / 13.0 * (0.99 * 0.05 + 0.3)
        self.assertAlmostEqual(value, expected)

    def test_user_cost_sign_conventions(self):
        consistent = LoglinCoefficients.from_calibration(6.0, 60.0, 0.5, 0.9)
        printed = LoglinCoefficients.from_calibration(6.0, 60.0, 0.5, 0.9, "printed")
        self.assertAlmostEqual(usercost_loglin(consistent, 0.1, 0.2), 0.1 * 0.55 - 0.45 * 0.2)
        self.assertAlmostEqual(usercost_loglin(printed, 0.1, 0.2), 0.1 * 0.55 + 0.45 * 0.2)
        q = usercost_loglin(consistent, 0.1, 0.2)
        self.assertAlmostEqual(user_cost_hat(consistent, q, 0.2), 0.1)
        self.assertAlmostEqual(durables_from_user_cost(0.4, 0.1), 0.3)


class TestOracles(unittest.TestCase):
    def test_symmetric_economy(self):
        first = solve_economy(stylized_system()).first
        gaps = loglinear_residuals(first, periods=300)
        self.assertEqual(set(gaps), {"relative_wage", "relative_price", "user_cost"})
        for value in gaps.values():
            self.assertLess(value, 1e-7)

    def test_printed_convention_misses(self):
        first = solve_economy(stylized_system()).first
        consistent = loglinear_residuals(first, periods=300)
        printed = loglinear_residuals(first, periods=300, convention="printed")
        self.assertGreater(printed["relative_price"], 1e3 * max(consistent["relative_price"], 1e-12))

    def test_durable_economy(self):
        first = solve_economy(stylized_system(VariantKind.STYLIZED_DURABLE, delta=0.025)).first
        gaps = loglinear_residuals(first, periods=300)
        self.assertIn("user_cost_hat", gaps)
        self.assertIn("durables", gaps)
        for value in gaps.values():
            self.assertLess(value, 1e-7)

    def test_asymmetric_pricing_skips_the_recursion(self):
        first = solve_economy(stylized_system(theta_d=0.0)).first
        gaps = loglinear_residuals(first, periods=100)
        self.assertTrue(math.isnan(gaps["relative_price"]))
        self.assertLess(gaps["relative_wage"], 1e-7)

    def test_full_depreciation_reduction(self):
        gaps = delta_one_reduction(symmetric_params(), horizon=12)
        self.assertLess(gaps["steady_gap"], 1e-10)
        self.assertLess(gaps["irf_gap"], 1e-6)

    def test_check_report(self):
        report = loglinear_check(stylized_system(), periods=100)
        self.assertEqual(set(report), {"consistent", "printed", "reduction", "tolerance", "passed"})
        self.assertIsInstance(report["passed"], bool)
