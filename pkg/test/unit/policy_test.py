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

import numpy as np
import pandas as pd
import pytest
from pytest import raises

from sectoral.diagnostics import solve_economy
from sectoral.exceptions import ConfigurationException, PresetNotFound
from sectoral.model import build_model
from sectoral.perturbation import Determinacy, standard_deviations
from sectoral.policy import (
    ExperimentPreset,
    PolicyEvaluation,
    PolicyProblem,
    compare_reference,
    consumption_equivalent,
    consumption_equivalent_implicit,
    evaluate_rule,
    get_preset,
    lambda_label,
    load_presets,
    monotone_violations,
    optimize_rule,
    parse_lambda,
    preset_names,
    relative_loss,
    sobol_starts,
    table_presets,
    tau_lambda_curve,
)
from sectoral.policy.optimize import _Search, tie_break_key
from sectoral.policy.tables import calibrate_wr
from sectoral.rules import PolicyRuleSpec, RuleFamily, estimated_rule

from .fixtures import SLOW

RULE_FIELDS = ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "tau")


def reference_rule(preset, row):
    """The rule a preset reports in one of its reference rows."""
    return PolicyRuleSpec(family=preset.family, **{name: float(row[name]) for name in RULE_FIELDS})


def relative_price_volatility(preset):
    """Standard deviation of the relative price under each reported rule, keyed by labor-mobility label."""
    out = {}
    for row in preset.reference:
        lambda_mob = parse_lambda(row["lambda"])
        system = build_model(preset.variant(reference_rule(preset, row)), preset.parameters(lambda_mob))
        out[lambda_label(lambda_mob)] = standard_deviations(solve_economy(system).first, ["Q"])["Q"]
    return out


class TestConsumptionEquivalent(unittest.TestCase):
    def test_closed_form(self):
        omega = consumption_equivalent(-0.1, 0.0, 0.99)
        self.assertAlmostEqual(omega, 1.0 - math.exp(-0.001), places=15)
        self.assertAlmostEqual(omega, 9.995e-4, places=7)
        self.assertEqual(consumption_equivalent(3.0, 3.0, 0.99), 0.0)
        self.assertLess(consumption_equivalent(1.0, 0.0, 0.99), 0.0)

    def test_implicit_root_agrees(self):
        for gap in (-5.0, -0.1, -1e-6, 2.0):
            closed = consumption_equivalent(gap, 0.0, 0.99)
            implicit = consumption_equivalent_implicit(gap, 0.0, 0.99)
            self.assertAlmostEqual(closed, implicit, delta=1e-12 * max(1.0, abs(closed)))
        self.assertEqual(consumption_equivalent_implicit(1.5, 1.5, 0.99), 0.0)


class TestPolicyEvaluation(unittest.TestCase):
    def test_infeasible(self):
        evaluation = PolicyEvaluation(PolicyRuleSpec(), 1.0, 0.0, Determinacy.INDETERMINATE)
        self.assertFalse(evaluation.feasible)
        self.assertEqual(evaluation.objective, -math.inf)
        self.assertIsNone(evaluation.zlb_ok)

    def test_feasible_row(self):
        rule = PolicyRuleSpec(rho_r=0.5, alpha_pi=1.0)
        evaluation = PolicyEvaluation(rule, math.inf, 10.0, Determinacy.DETERMINATE, -120.0, -119.0, 0.01)
        self.assertTrue(evaluation.feasible)
        self.assertEqual(evaluation.objective, -120.0)
        self.assertTrue(evaluation.taylor_principle)
        self.assertTrue(evaluation.with_pr_zlb(0.005).zlb_ok)
        self.assertFalse(evaluation.with_pr_zlb(0.02).zlb_ok)
        row = evaluation.to_row()
        self.assertEqual(row["lambda"], "inf")
        self.assertEqual(row["family"], RuleFamily.SMETS_WOUTERS.value)
        self.assertEqual(row["w_r"], 10.0)
        self.assertEqual(row["verdict"], "determinate")
        self.assertAlmostEqual(row["gamma_pi"], 2.0)

    def test_price_level_rule(self):
        evaluation = PolicyEvaluation(PolicyRuleSpec(rho_r=1.0), 1.0, 0.0, Determinacy.DETERMINATE, -1.0, -1.0, 0.0)
        self.assertIsNone(evaluation.taylor_principle)
        self.assertIsNone(evaluation.to_row()["gamma_pi"])

    def test_negative_penalty_rejected(self):
        with raises(ConfigurationException):
            PolicyProblem(get_preset("symmetric"), 1.0, zlb_weight=-1.0)
        with raises(ConfigurationException):
            PolicyProblem(get_preset("symmetric"), 1.0, benchmark_weight=-1.0)

    def test_benchmark_weight_is_fixed_per_panel(self):
        problem = PolicyProblem(get_preset("symmetric"), 1.0, zlb_weight=40.0)
        self.assertEqual(problem.benchmark_weight, get_preset("symmetric").benchmark_wr)
        other = problem.with_zlb_weight(80.0)
        self.assertEqual(other.zlb_weight, 80.0)
        self.assertEqual(other.benchmark_weight, problem.benchmark_weight)


class TestPresets(unittest.TestCase):
    def test_registry(self):
        presets = load_presets()
        self.assertIn("table1-panel-i", presets)
        self.assertEqual(get_preset("symmetric").name, "table1-panel-i")
        self.assertEqual(get_preset("stylized-durable").name, "table1-panel-v")
        self.assertIn("symmetric", preset_names(aliases=True))
        self.assertNotIn("symmetric", preset_names())
        with raises(PresetNotFound):
            get_preset("table9-panel-x")

    def test_tables(self):
        self.assertEqual(len(table_presets("table1")), 5)
        self.assertEqual(len(table_presets("tableC.1")), 3)
        self.assertEqual(len(table_presets("tableC1")), 3)
        with raises(PresetNotFound):
            table_presets("table9")

    def test_lambda_helpers(self):
        self.assertEqual(parse_lambda("inf"), math.inf)
        self.assertEqual(parse_lambda(0.5), 0.5)
        self.assertEqual(lambda_label(math.inf), "inf")
        self.assertEqual(lambda_label(0.1), "0.1")

    def test_preset_parameters(self):
        preset = get_preset("stylized-het-price")
        params = preset.parameters(2.0)
        self.assertEqual(params.theta_d, 0.0)
        self.assertAlmostEqual(params.mu, 0.5)
        self.assertEqual(preset.parameters(math.inf).mu, 0.0)
        self.assertEqual(preset.describe()["lambdas"], ["inf", "1", "0.1"])

    def test_tau_only_panel(self):
        preset = get_preset("table5-estimated")
        self.assertEqual(preset.free_coefficients(), ("tau",))

    def test_from_dict_rejections(self):
        base = {"name": "custom", "kind": "stylized-nondurable"}
        self.assertEqual(ExperimentPreset.from_dict(base).mode, "optimize")
        with raises(ConfigurationException):
            ExperimentPreset.from_dict({**base, "colour": "blue"})
        with raises(ConfigurationException):
            ExperimentPreset.from_dict({**base, "mode": "grid"})
        with raises(ConfigurationException):
            ExperimentPreset.from_dict({**base, "params": {"kappa": 1.0}})
        with raises(ConfigurationException):
            ExperimentPreset.from_dict({**base, "kind": "three-sector"})
        with raises(ConfigurationException):
            ExperimentPreset.from_dict({**base, "benchmark_wr": -5})
        self.assertEqual(ExperimentPreset.from_dict({**base, "benchmark_wr": 20}).benchmark_wr, 20.0)


class TestTables(unittest.TestCase):
    def test_relative_loss(self):
        self.assertAlmostEqual(relative_loss(0.02, 0.03), 50.0)
        self.assertTrue(math.isnan(relative_loss(0.0, 0.03)))
        self.assertTrue(math.isnan(relative_loss(0.02, math.nan)))

    def test_monotone_violations(self):
        self.assertEqual(monotone_violations([0.9, 0.7, 0.5]), [])
        self.assertEqual(monotone_violations([0.5, 0.51, 0.6, 0.3]), [2])

    def test_sobol_starts(self):
        bounds = np.array([[0.0, 1.0], [0.0, 5.0], [1.0, 2.0]])
        starts = sobol_starts(bounds, m=4, seed=3)
        self.assertEqual(starts.shape, (16, 3))
        self.assertTrue(np.all(starts >= bounds[:, 0]))
        self.assertTrue(np.all(starts <= bounds[:, 1]))
        np.testing.assert_array_equal(starts, sobol_starts(bounds, m=4, seed=3))

    def test_compare_reference(self):
        preset = get_preset("symmetric")
        frame = pd.DataFrame([{"lambda": "inf", "row": "", "tau": 0.4, "omega100": 0.0003}])
        merged = compare_reference(frame, preset)
        self.assertEqual(len(merged), 1)
        self.assertAlmostEqual(merged.loc[0, "ref_tau"], 0.5)
        self.assertAlmostEqual(merged.loc[0, "tau_gap"], -0.1)
        self.assertAlmostEqual(merged.loc[0, "omega100_gap"], 0.0001)


class TestTieBreak(unittest.TestCase):
    def test_key_is_lexicographic_in_absolute_values(self):
        small_pi = PolicyRuleSpec(alpha_pi=0.1, alpha_y=3.0)
        large_pi = PolicyRuleSpec(alpha_pi=0.2, alpha_y=0.0)
        self.assertLess(tie_break_key(small_pi), tie_break_key(large_pi))
        self.assertEqual(tie_break_key(PolicyRuleSpec(alpha_pi=0.5, alpha_y=-0.3)), (0.5, 0.3, 0.0, 0.0))

    def test_best_prefers_smaller_leading_coefficient_among_ties(self):
        search = _Search(PolicyProblem(get_preset("symmetric"), 1.0), PolicyRuleSpec(), ("alpha_pi", "alpha_y"))
        rules = [PolicyRuleSpec(alpha_pi=0.2, alpha_y=0.0), PolicyRuleSpec(alpha_pi=0.1, alpha_y=3.0),
                 PolicyRuleSpec(alpha_pi=0.05, alpha_y=0.0)]
        welfare = [-1.0, -1.0, -2.0]
        for i, (rule, value) in enumerate(zip(rules, welfare)):
            evaluation = PolicyEvaluation(rule, 1.0, 0.0, Determinacy.DETERMINATE, value, value, 0.0)
            search._memo[(float(i),)] = evaluation  # pylint: disable=protected-access
        self.assertEqual(search.best().rule, rules[1])


class TestRelativePriceVolatility(unittest.TestCase):
    def test_volatility_rises_as_mobility_falls(self):
        sd = relative_price_volatility(get_preset("stylized-durable"))
        self.assertLess(sd["inf"], sd["1"])
        self.assertLess(sd["1"], sd["0.1"])


@pytest.mark.slow
@unittest.skipUnless(SLOW, "rule evaluation solves planner problems")
class TestRuleSearch(unittest.TestCase):
    def test_default_rule_loses_to_the_planner(self):
        evaluation = evaluate_rule(get_preset("symmetric"), PolicyRuleSpec(), 1.0, zlb=False)
        self.assertTrue(evaluation.feasible)
        self.assertGreaterEqual(evaluation.omega100, -1e-6)

    def test_omega_does_not_depend_on_the_penalty_weight(self):
        rule = PolicyRuleSpec(rho_r=0.8, alpha_pi=1.5, alpha_y=0.1, tau=0.5)
        free = evaluate_rule(get_preset("symmetric"), rule, math.inf, zlb_weight=0.0, zlb=False)
        penalized = evaluate_rule(get_preset("symmetric"), rule, math.inf, zlb_weight=40.0, zlb=False)
        self.assertAlmostEqual(free.welfare_no_penalty, penalized.welfare_no_penalty, places=8)
        self.assertAlmostEqual(free.omega100, penalized.omega100, places=8)
        self.assertLess(penalized.welfare, free.welfare)

    def test_optimized_rule_beats_its_start(self):
        problem = PolicyProblem(get_preset("symmetric"), 1.0)
        start = problem.evaluate(PolicyRuleSpec())
        best = optimize_rule(problem, sobol_m=2, refined=1, max_evaluations=60, zlb=False)
        self.assertTrue(best.feasible)
        self.assertGreaterEqual(best.objective, start.objective - 1e-10)

    def test_fixed_rule_penalty_calibration(self):
        problem = PolicyProblem(get_preset("symmetric"), 1.0, zlb_periods=2000)
        calibration = calibrate_wr(problem, rule=PolicyRuleSpec(), grid=(80.0, 0.0))
        self.assertIn(calibration.weight, (0.0, 80.0))
        self.assertEqual(calibration.trail[0]["w_r"], 0.0)
        if calibration.satisfied:
            self.assertLess(calibration.evaluation.pr_zlb, 0.01)
        else:
            self.assertEqual(len(calibration.trail), 2)
        if len(calibration.trail) == 2:
            self.assertAlmostEqual(calibration.trail[0]["omega100"], calibration.trail[1]["omega100"], places=8)

    def test_tau_curve_layout(self):
        frame = tau_lambda_curve(get_preset("symmetric"), ["inf", 1], zlb_weight=0.0, zlb_periods=2000,
                                 sobol_m=1, refined=1, max_evaluations=30)
        self.assertEqual(list(frame["lambda"]), ["1", "inf"])
        self.assertTrue(((frame["tau"] >= 0.0) & (frame["tau"] <= 1.0)).all())
        self.assertIn("monotone_violation", frame.columns)


@pytest.mark.slow
@unittest.skipUnless(SLOW, "optimizes rules over full labor-mobility grids")
class TestPublishedResults(unittest.TestCase):
    def test_symmetric_economy_weights_sectors_equally(self):
        frame = tau_lambda_curve(get_preset("symmetric"), ["inf", 1, 0.1], zlb_weight=0.0, zlb_periods=2000,
                                 sobol_m=3, refined=2, max_evaluations=200)
        for tau in frame["tau"]:
            self.assertAlmostEqual(tau, 0.5, delta=0.02)

    def test_tau_falls_with_mobility_under_price_heterogeneity(self):
        preset = get_preset("stylized-het-price")
        frame = tau_lambda_curve(preset, ["inf", 1, 0.1], zlb_weight=0.0, zlb_periods=2000,
                                 sobol_m=3, refined=2, max_evaluations=200)
        tau = frame.set_index("lambda")["tau"]
        self.assertGreater(tau["0.1"] - tau["1"], 0.02)
        self.assertGreater(tau["1"] - tau["inf"], 0.02)
        for row in preset.reference:
            self.assertAlmostEqual(tau[lambda_label(parse_lambda(row["lambda"]))], row["tau"], delta=0.1)

    def test_estimated_rule_welfare_cost(self):
        preset = get_preset("table5-estimated")
        evaluation = evaluate_rule(preset, estimated_rule(), 1.225, zlb=False)
        self.assertAlmostEqual(evaluation.omega100, 0.6419, delta=0.25 * 0.6419)

    def test_relative_price_volatility_ratios(self):
        sd = relative_price_volatility(get_preset("stylized-durable"))
        self.assertAlmostEqual(sd["0.1"] / sd["1"], 1.3, delta=0.3)
        self.assertAlmostEqual(sd["0.1"] / sd["inf"], 1.8, delta=0.3)
