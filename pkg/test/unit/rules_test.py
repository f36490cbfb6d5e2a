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

from pytest import raises

from sectoral.exceptions import ConfigurationException
from sectoral.rules import BOUNDS, PolicyRuleSpec, RuleFamily, estimated_rule


class TestRules(unittest.TestCase):
    def test_parse_family(self):
        self.assertEqual(RuleFamily.parse("smets_wouters"), RuleFamily.SMETS_WOUTERS)
        self.assertEqual(RuleFamily.parse("Wage-Inflation"), RuleFamily.WAGE_INFLATION)
        self.assertEqual(RuleFamily.parse(RuleFamily.IMPLEMENTABLE), RuleFamily.IMPLEMENTABLE)
        with raises(ConfigurationException):
            RuleFamily.parse("taylor-1993")

    def test_active_coefficients(self):
        self.assertNotIn("alpha_w", PolicyRuleSpec().active)
        self.assertNotIn("alpha_dy", PolicyRuleSpec(family=RuleFamily.IMPLEMENTABLE).active)
        self.assertIn("alpha_w", PolicyRuleSpec(family=RuleFamily.REAL_WAGE_GROWTH).active)
        self.assertFalse(PolicyRuleSpec(family=RuleFamily.IMPLEMENTABLE).uses_flexible_output)

    def test_gamma_pi(self):
        rule = PolicyRuleSpec(rho_r=0.5, alpha_pi=0.75)
        self.assertAlmostEqual(rule.gamma_pi, 1.5)
        self.assertEqual(PolicyRuleSpec(rho_r=1.0).gamma_pi, float("inf"))

    def test_vector_round_trip(self):
        rule = PolicyRuleSpec()
        moved = rule.with_vector([0.5, 2.0, 0.1, 0.2, 0.3])
        self.assertEqual(moved.vector().tolist(), [0.5, 2.0, 0.1, 0.2, 0.3])
        self.assertEqual(moved.family, rule.family)
        with raises(ConfigurationException):
            rule.with_vector([0.5, 2.0])

    def test_bounds_and_clip(self):
        rule = PolicyRuleSpec(alpha_pi=7.0, tau=-0.2)
        with raises(ConfigurationException):
            rule.validate()
        clipped = rule.clip()
        self.assertEqual(clipped.alpha_pi, BOUNDS["alpha_pi"][1])
        self.assertEqual(clipped.tau, 0.0)
        clipped.validate()

    def test_wage_growth_differential_needs_imperfect_mobility(self):
        rule = PolicyRuleSpec(family=RuleFamily.WAGE_GROWTH_DIFFERENTIAL)
        rule.validate(mu=1.0)
        with raises(ConfigurationException):
            rule.validate(mu=0.0)

    def test_dict_round_trip(self):
        rule = PolicyRuleSpec(family=RuleFamily.WAGE_INFLATION, alpha_w=0.4)
        self.assertEqual(PolicyRuleSpec.from_dict(rule.to_dict()), rule)
        with raises(ConfigurationException):
            PolicyRuleSpec.from_dict({"alpha_x": 1.0})

    def test_estimated_rule_from_long_run_responses(self):
        rule = estimated_rule()
        self.assertAlmostEqual(rule.rho_r, 0.6334)
        self.assertAlmostEqual(rule.alpha_pi, (1.0 - 0.6334) * 1.4761)
        self.assertAlmostEqual(rule.gamma_pi, 1.4761)
        self.assertAlmostEqual(rule.tau, 0.2264)
