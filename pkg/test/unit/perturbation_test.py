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

import unittest

import numpy as np
import pandas as pd
from pytest import raises

from sectoral.diagnostics import immobile_wage_gap, solve_economy
from sectoral.exceptions import ConfigurationException, SolutionException
from sectoral.model import Block, ModelVariant, ResidualSystem, Variable, VariantKind, build_model, solve_steady_state
from sectoral.perturbation import (
    Determinacy,
    ImpulseResponse,
    impulse_response,
    irf_distance,
    linearize,
    pr_zlb,
    simulate,
    solve_first_order,
    solve_generalized_sylvester,
    standard_deviations,
    welfare_mean,
)
from sectoral.rules import PolicyRuleSpec

from .fixtures import stylized_system, symmetric_params


class TestFirstOrder(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.solved = solve_economy(stylized_system())
        cls.first = cls.solved.first

    def test_default_rule_is_determinate(self):
        self.assertEqual(self.first.verdict, Determinacy.DETERMINATE)
        self.assertLess(self.first.spectral_radius, 1.0)
        self.assertLess(self.first.residual, 1e-6)
        self.assertIn("eA", self.first.states)

    def test_passive_rule_is_indeterminate(self):
        rule = PolicyRuleSpec(rho_r=0.0, alpha_pi=0.5, alpha_y=0.0)
        system = stylized_system(rule=rule)
        first = solve_first_order(linearize(system, solve_steady_state(system)))
        self.assertEqual(first.verdict, Determinacy.INDETERMINATE)
        self.assertFalse(first.is_determinate)
        with raises(SolutionException):
            solve_economy(system)
        with raises(SolutionException):
            impulse_response(first, "A")

    def test_productivity_response_follows_its_process(self):
        irf = impulse_response(self.first, "A", horizon=12, variables=["eA", "Y", "R"])
        expected = 100.0 * 0.01 * 0.9 ** np.arange(12)
        np.testing.assert_allclose(irf["eA"], expected, atol=1e-10)
        self.assertEqual(irf.variables, ("eA", "Y", "R"))
        self.assertEqual(len(irf.to_long()), 36)

    def test_unknown_shock_and_variable(self):
        with raises(ConfigurationException):
            impulse_response(self.first, "G")
        irf = impulse_response(self.first, "B", horizon=4, variables=["Y"])
        with raises(ConfigurationException):
            irf["C"]  # pylint: disable=pointless-statement

    def test_irf_distance(self):
        a = impulse_response(self.first, "B", horizon=10)
        self.assertTrue(np.all(irf_distance(a, a, "Y") == 0.0))
        with raises(ConfigurationException):
            irf_distance(a, impulse_response(self.first, "B", horizon=5), "Y")

    def test_irf_distance_is_in_percent(self):
        def irf(values):
            return ImpulseResponse("A", 1.0, len(values), pd.DataFrame({"Y": values}))

        flat = irf([0.0, 0.0, 0.0])
        np.testing.assert_allclose(irf_distance(irf([100.0, 0.0, 0.0]), flat, "Y"), [100.0, 100.0, 100.0])
        np.testing.assert_allclose(irf_distance(irf([3.0, 4.0, 0.0]), flat, "Y"), [3.0, 5.0, 5.0])
        distance = irf_distance(impulse_response(self.first, "A", horizon=10), irf(np.zeros(10)), "Y")
        self.assertTrue(np.all(np.diff(distance) >= 0.0))

    def test_wage_ratio_responds_to_the_hours_gap_by_one_over_lambda(self):
        for lambda_mob in (1.0, 4.0):
            system = stylized_system(mu=1.0 / lambda_mob)
            lin = linearize(system, solve_steady_state(system))
            row = lin.row("wage_ratio")
            col = system.registry.index
            self.assertAlmostEqual(lin.f_now[row, col("wC")], 1.0, places=8)
            self.assertAlmostEqual(lin.f_now[row, col("wD")], -1.0, places=8)
            self.assertAlmostEqual(lin.f_now[row, col("NC")], -1.0 / lambda_mob, places=8)
            self.assertAlmostEqual(lin.f_now[row, col("ND")], 1.0 / lambda_mob, places=8)

    def test_simulation_is_reproducible(self):
        one = simulate(self.first, 50, seed=7, variables=["Y", "PiC"])
        two = simulate(self.first, 50, seed=7, variables=["Y", "PiC"])
        self.assertEqual(one.shape, (50, 2))
        self.assertTrue(one.equals(two))
        self.assertFalse(one.equals(simulate(self.first, 50, seed=8, variables=["Y", "PiC"])))

    def test_unconditional_standard_deviation_of_a_shock(self):
        sd = standard_deviations(self.first, ["eA"])
        self.assertAlmostEqual(sd["eA"], 100.0 * 0.01 / np.sqrt(1.0 - 0.81), places=8)

    def test_perfect_mobility_equalizes_wages(self):
        first = solve_economy(stylized_system(mu=0.0)).first
        self.assertLess(immobile_wage_gap(first, periods=200), 1e-8)
        self.assertGreater(immobile_wage_gap(self.first, periods=200), 1e-6)


class TestSecondOrder(unittest.TestCase):
    def test_generalized_sylvester(self):
        rng = np.random.default_rng(0)
        n, m = 4, 3
        a = rng.standard_normal((n, n)) + 4.0 * np.eye(n)
        b = rng.standard_normal((n, n))
        c = 0.5 * rng.standard_normal((m, m))
        d = rng.standard_normal((n, m * m))
        x = solve_generalized_sylvester(a, b, c, d)
        np.testing.assert_allclose(a @ x + b @ x @ np.kron(c, c), d, atol=1e-10)
        self.assertEqual(solve_generalized_sylvester(a, b, np.zeros((0, 0)), d[:, :0]).shape, (n, 0))

    def test_exogenous_process_stays_linear(self):
        solved = solve_economy(stylized_system(), order=2)
        self.assertEqual(solved.order, 2)
        irf = impulse_response(solved.solution, "A", horizon=8, variables=["eA"], draws=20, burn_in=20)
        self.assertEqual(irf.order, 2)
        np.testing.assert_allclose(irf["eA"], 0.9 ** np.arange(8), atol=1e-6)

    def test_order_must_be_one_or_two(self):
        with raises(ConfigurationException):
            solve_economy(stylized_system(), order=3)

    def test_zero_shocks_reduce_to_first_order(self):
        variant = ModelVariant(VariantKind.STYLIZED_NONDURABLE, rule=PolicyRuleSpec())
        solved = solve_economy(build_model(variant, symmetric_params().scale_sigma(0.0)), order=2)
        sol = solved.solution
        np.testing.assert_allclose(sol.g_ss, 0.0, atol=1e-10)
        np.testing.assert_allclose(sol.g_uu, 0.0, atol=1e-10)
        np.testing.assert_allclose(sol.g_ku, 0.0, atol=1e-10)
        second = simulate(sol, 30, seed=3, variables=["Y", "R", "Q"])
        first = simulate(solved.first, 30, seed=3, variables=["Y", "R", "Q"])
        np.testing.assert_allclose(second.to_numpy(), first.to_numpy(), atol=1e-12)

        steady, p = solved.steady, solved.first.system.params
        utility = np.log(steady["X"]) - p.nu * steady["N"] ** (1.0 + p.phi_frisch) / (1.0 + p.phi_frisch)
        welfare = welfare_mean(sol)
        self.assertAlmostEqual(welfare.without_penalty, utility / (1.0 - p.beta), places=8)
        self.assertAlmostEqual(welfare.with_penalty, welfare.without_penalty, places=10)
        self.assertEqual(pr_zlb(sol, n_periods=10_000), 0.0)

    def test_zlb_frequency_is_stable_across_seeds(self):
        variant = ModelVariant(VariantKind.STYLIZED_NONDURABLE, rule=PolicyRuleSpec())
        sol = solve_economy(build_model(variant, symmetric_params().scale_sigma(0.5)), order=2).solution
        one = pr_zlb(sol, n_periods=200_000, seed=1)
        two = pr_zlb(sol, n_periods=200_000, seed=2)
        self.assertTrue(0.0 <= one <= 1.0)
        self.assertLessEqual(abs(one - two), 0.002)
        self.assertEqual(pr_zlb(sol, n_periods=20_000, seed=1), pr_zlb(sol, n_periods=20_000, seed=1))


def _ar1_forward_model():
    """``x_t = 0.9 x_{t-1} + 0.01 e_t`` and ``y_t = 0.5 x_t + 0.2 E_t y_{t+1}``, in levels."""
    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        return {
            "process": cur.x - 0.9 * lag.x - 0.01 * innov.e,
            "forward": cur.y - 0.5 * cur.x - 0.2 * lead.y,
        }

    variables = [Variable("x", "jump", "level"), Variable("y", "jump", "level")]
    return ResidualSystem.custom(variables, [Block("linear", evaluate)], ["e"], [0.0, 0.0])


class TestLinearModel(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.system = _ar1_forward_model()
        cls.solved = solve_economy(cls.system, order=2)

    def test_states_and_first_derivatives(self):
        self.assertEqual(self.system.states, ("x",))
        self.assertEqual(self.system.expectational_count, 1)
        lin = linearize(self.system, self.solved.steady)
        self.assertAlmostEqual(lin.f_prev[lin.row("process"), 0], -0.9, places=8)
        self.assertAlmostEqual(lin.f_next[lin.row("forward"), 1], -0.2, places=8)
        np.testing.assert_allclose(self.solved.first.h_x, [[0.9]], atol=1e-10)
        self.assertAlmostEqual(self.solved.first.g_x[1, 0], 0.9 * 0.5 / (1.0 - 0.2 * 0.9), places=8)

    def test_second_order_terms_vanish(self):
        sol = self.solved.solution
        for tensor in (sol.g_kk, sol.g_ku, sol.g_uu, sol.g_ss):
            np.testing.assert_allclose(tensor, 0.0, atol=1e-8)
