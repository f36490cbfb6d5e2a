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

from dataclasses import dataclass
from typing import Mapping

from .exceptions import ConfigurationException
from .model.parameters import ParameterSet

CONVENTIONS = ("printed", "consistent")


@dataclass(frozen=True)
class LoglinCoefficients:
    """
    Coefficients of the closed-form log-linear relations for the relative price and the user cost of durables.

    Under the ``printed`` convention the relative-price weights are ``(1-eps)/(theta+1-eps)`` and
    ``theta/(theta+1-eps)`` and the expected-return term of the user-cost relation enters with a plus sign.
    Under ``consistent`` the weights are ``(eps-1)/(theta+eps-1)`` and ``theta/(theta+eps-1)``, and the
    expected-return term enters with a minus sign; these match the equilibrium conditions solved numerically.
    """

    varpi1: float
    varpi2: float
    usercost_weight: float
    durability_weight: float
    convention: str = "consistent"

    @classmethod
    def from_calibration(cls, eps: float, theta: float, delta: float, beta: float,
                         convention: str = "consistent", pi_bar: float = 1.0) -> "LoglinCoefficients":
        """
        :param eps: goods elasticity of substitution, equal across sectors
        :param theta: Rotemberg price-adjustment cost, equal across sectors
        :param pi_bar: gross steady-state inflation; the adjustment cost enters the slope as ``theta * pi_bar**2``
        :raises ConfigurationException: for an unknown convention or parameters outside their domain
        """
        if convention not in CONVENTIONS:
            raise ConfigurationException(f"Unknown convention {convention}; use one of {', '.join(CONVENTIONS)}")
        if not 0.0 < delta <= 1.0 or not 0.0 < beta < 1.0:
            raise ConfigurationException("delta must lie in (0, 1] and beta in (0, 1)")
        if theta < 0.0 or eps <= 1.0:
            raise ConfigurationException("theta must be non-negative and eps above one")
        theta = theta * pi_bar ** 2
        if convention == "printed":
            denominator = theta + 1.0 - eps
            varpi1 = (1.0 - eps) / denominator
        else:
            denominator = theta + eps - 1.0
            varpi1 = (eps - 1.0) / denominator
        return cls(
            varpi1=varpi1,
            varpi2=theta / denominator,
            usercost_weight=1.0 - (1.0 - delta) * beta,
            durability_weight=(1.0 - delta) * beta,
            convention=convention,
        )

    @classmethod
    def from_params(cls, params: ParameterSet, convention: str = "consistent") -> "LoglinCoefficients":
        """
        Coefficients of a calibration with equal sectoral stickiness and elasticities.

        :raises ConfigurationException: when the sectors differ in ``theta``, ``eps`` or steady inflation
        """
        if (params.theta_c != params.theta_d or params.eps_c != params.eps_d
                or params.pi_c_bar != params.pi_d_bar):
            raise ConfigurationException("Closed-form relative-price dynamics need symmetric sectoral pricing")
        return cls.from_calibration(params.eps_c, params.theta_c, params.delta, params.beta, convention,
                                    params.pi_c_bar)

    @property
    def _sign(self) -> float:
        return 1.0 if self.convention == "printed" else -1.0


def relative_wage_gap(mu: float, hours_gap: float) -> float:
    """
    Log gap of sector-C over sector-D real wages implied by a log gap of sector-C over sector-D hours.

    :param mu: inverse labor mobility ``1/lambda``
    :raises ConfigurationException: for negative ``mu``
    """
    if mu < 0.0:
        raise ConfigurationException("mu must be non-negative")
    return mu * hours_gap


def relative_price_recursion(coefs: LoglinCoefficients, mu: float, hours_gap: float, productivity_gap: float,
                             expected_inflation_gap: float, q_lag: float, beta: float) -> float:
    """
    Relative price of durables in log deviations.

    :param hours_gap: ``N_D - N_C`` in log deviations
    :param productivity_gap: ``e_AD - e_AC`` in log deviations
    :param expected_inflation_gap: ``E[Pi_D' - Pi_C']`` in log deviations
    :param q_lag: last period's relative price
    """
    return (coefs.varpi1 * mu * hours_gap
            - coefs.varpi1 * productivity_gap
            + coefs.varpi2 * beta * expected_inflation_gap
            + coefs.varpi2 * q_lag)


def usercost_loglin(coefs: LoglinCoefficients, consumption_gap: float, expected_return: float) -> float:
    """
    Relative price from the durable-demand condition.

    :param consumption_gap: ``C - D`` in log deviations
    :param expected_return: ``E[Rr - Q']``, the expected real rate net of the relative price next period
    """
    return consumption_gap * coefs.usercost_weight + coefs._sign * coefs.durability_weight * expected_return


def user_cost_hat(coefs: LoglinCoefficients, q_hat: float, expected_return: float) -> float:
    """User cost of durables in log deviations given the relative price and ``E[Rr - Q']``."""
    return (q_hat - coefs._sign * coefs.durability_weight * expected_return) / coefs.usercost_weight


def durables_from_user_cost(c_hat: float, theta_hat: float) -> float:
    """Durable stock implied by the marginal-rate condition: ``C - Theta``."""
    return c_hat - theta_hat


def loglinear_diagnostics(coefs: LoglinCoefficients) -> Mapping[str, float]:
    """Coefficient dump for reports."""
    return {
        "convention": coefs.convention,
        "varpi1": coefs.varpi1,
        "varpi2": coefs.varpi2,
        "usercost_weight": coefs.usercost_weight,
        "durability_weight": coefs.durability_weight,
    }
