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
from pytest import raises

from sectoral.diagnostics import solve_economy
from sectoral.exceptions import ConfigurationException
from sectoral.model import (
    ModelVariant,
    VariantFlags,
    VariantKind,
    build_model,
    calibrate_nu,
    detect_states,
    flex_name,
    flexible_counterpart,
    fully_fledged_calibration,
    mobility_to_mu,
    solve_steady_state,
    stylized_calibration,
)
from sectoral.model.equations import STYLIZED_NAMES
from sectoral.perturbation import impulse_response
from sectoral.rules import PolicyRuleSpec, RuleFamily

from .fixtures import stylized_system, symmetric_params


class TestParameters(unittest.TestCase):
    def test_mobility_conversion(self):
        self.assertEqual(mobility_to_mu("inf"), 0.0)
        self.assertEqual(mobility_to_mu(math.inf), 0.0)
        self.assertAlmostEqual(mobility_to_mu(0.1), 10.0)
        with raises(ConfigurationException):
            mobility_to_mu(-1.0)

    def test_replace_accepts_lambda(self):
        params = symmetric_params().replace(lambda_mob=4.0)
        self.assertAlmostEqual(params.mu, 0.25)
        self.assertAlmostEqual(params.lambda_mob, 4.0)
        self.assertEqual(symmetric_params(mu=0.0).lambda_mob, math.inf)

    def test_validation(self):
        with raises(ConfigurationException):
            stylized_calibration(beta=1.0)
        with raises(ConfigurationException):
            stylized_calibration(delta=0.0)
        with raises(ConfigurationException):
            stylized_calibration(mu=-0.5)
        with raises(ConfigurationException):
            symmetric_params().with_shocks(rho={"A": 1.0}).validate()

    def test_scale_sigma(self):
        params = symmetric_params().scale_sigma(2.0)
        self.assertAlmostEqual(params.sigma_of("A"), 0.02)
        self.assertEqual(params.rho_of("A"), 0.9)


class TestModelSystem(unittest.TestCase):
    def test_square_system(self):
        system = stylized_system()
        self.assertTrue(system.is_square)
        self.assertEqual(system.economy_names, STYLIZED_NAMES)
        self.assertEqual(system.shocks, ("B", "A", "AC", "AD", "R"))

    def test_policy_free_system_is_one_equation_short(self):
        system = stylized_system(rule=False)
        self.assertFalse(system.has_rule)
        self.assertEqual(system.n_variables - system.n_equations, 1)

    def test_flags_need_the_fully_fledged_economy(self):
        variant = ModelVariant(VariantKind.STYLIZED_NONDURABLE, VariantFlags.of(drop_habit=True), PolicyRuleSpec())
        with raises(ConfigurationException):
            build_model(variant, symmetric_params())

    def test_unknown_excluded_shock(self):
        variant = ModelVariant(VariantKind.STYLIZED_NONDURABLE, VariantFlags.of(excluded_shocks=["G"]),
                               PolicyRuleSpec())
        with raises(ConfigurationException):
            build_model(variant, symmetric_params())

    def test_wage_growth_differential_rejected_at_perfect_mobility(self):
        rule = PolicyRuleSpec(family=RuleFamily.WAGE_GROWTH_DIFFERENTIAL)
        with raises(ConfigurationException):
            stylized_system(rule=rule, mu=0.0)

    def test_states_are_fixed_at_construction(self):
        system = stylized_system()
        registry = system.registry
        states, expectational = detect_states(system)
        self.assertIs(system.registry, registry)
        self.assertEqual(states, system.states)
        self.assertEqual(expectational, system.expectational_count)
        self.assertIn("Q", states)
        self.assertEqual(registry["Q"].role, "state")
        self.assertEqual(registry["C"].role, "jump")
        self.assertEqual(registry["eA"].role, "exogenous")


class TestSteadyState(unittest.TestCase):
    def test_symmetric_steady_state(self):
        steady = solve_steady_state(stylized_system())
        self.assertAlmostEqual(steady["R"], 1.0 / 0.99, places=10)
        self.assertAlmostEqual(round(steady["R"], 6), 1.010101)
        self.assertAlmostEqual(steady["N"], 0.33, places=10)
        self.assertAlmostEqual(steady["NC"], steady["ND"], places=10)
        self.assertAlmostEqual(steady.derived["chi_c"], 0.5, places=10)
        self.assertAlmostEqual(steady["wC"], steady["wD"], places=10)
        self.assertLess(steady.residual, 1e-10)

    def test_full_depreciation_steady_states_agree(self):
        nondurable = solve_steady_state(stylized_system())
        durable = solve_steady_state(stylized_system(VariantKind.STYLIZED_DURABLE, delta=1.0))
        for name in STYLIZED_NAMES:
            self.assertAlmostEqual(nondurable[name], durable[name], delta=1e-10)

    def test_report_headlines(self):
        report = solve_steady_state(stylized_system()).report()
        for key in ("r_bar", "chi_c", "nu", "markup_c", "markup_d", "R", "residual"):
            self.assertIn(key, report)
        self.assertAlmostEqual(report["markup_c"], 1.2)

    def test_calibrate_nu(self):
        system = stylized_system()
        self.assertAlmostEqual(calibrate_nu(system, 0.33), system.params.nu, places=8)
        nu = calibrate_nu(system, 0.25)
        steady = solve_steady_state(build_model(system.variant, system.params.replace(nu=nu, target_n=0.25)))
        self.assertAlmostEqual(steady["N"], 0.25, delta=1e-10)
        for target in (1.5, 0.0):
            with raises(ConfigurationException):
                calibrate_nu(system, target)


class TestFlexibleCounterpart(unittest.TestCase):
    def test_steady_state_is_duplicated(self):
        single = solve_steady_state(stylized_system())
        stacked = solve_steady_state(flexible_counterpart(stylized_system()))
        for name in STYLIZED_NAMES:
            self.assertAlmostEqual(stacked[name], single[name], delta=1e-10)
            self.assertAlmostEqual(stacked[flex_name(name)], single[name], delta=1e-10)

    def test_flexible_sticky_economy_tracks_its_counterpart(self):
        stacked = flexible_counterpart(stylized_system(theta_c=0.0, theta_d=0.0))
        first = solve_economy(stacked).first
        for shock in ("A", "AD", "B"):
            irf = impulse_response(first, shock, horizon=12, variables=["Y", flex_name("Y")])
            np.testing.assert_allclose(irf["Y"], irf[flex_name("Y")], atol=1e-8)

    def test_markup_shocks_do_not_reach_the_counterpart(self):
        variant = ModelVariant(VariantKind.FULLY_FLEDGED, rule=PolicyRuleSpec())
        system = flexible_counterpart(build_model(variant, fully_fledged_calibration()))
        markups = system.registry.indices(["eC", "eD", "ewC", "ewD"])
        step = 1e-20
        bump = np.zeros((system.n_variables, markups.size))
        bump[markups, np.arange(markups.size)] = step
        point = system.guess[:, None]
        loads = []
        for slot in range(3):
            args = [point, point, point]
            args[slot] = point + 1j * bump
            loads.append(np.imag(system.residual(*args)) / step)
        flexible, economy = system.rows("flexible"), system.rows("economy")
        for jac in loads:
            self.assertTrue(np.all(jac[flexible] == 0.0))
        self.assertTrue(np.any(loads[1][economy] != 0.0))
