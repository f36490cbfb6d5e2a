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

from typing import Dict, Tuple

import numpy as np

from .parameters import ParameterSet
from .registry import Variable

# Every residual below is written so that it evaluates on complex arrays; derivatives are taken by complex steps.

STYLIZED_NAMES = (
    "X", "C", "D", "UC", "UD", "Q", "UN", "wC", "wD", "N", "Lam", "R", "Rr",
    "PiC", "PiD", "YC", "NC", "YD", "ND", "MCC", "MCD", "Y",
)
DURABLE_EXTRA_NAMES = ("I_D", "Theta")
FULLY_FLEDGED_NAMES = (
    "X", "C", "Z", "S", "D", "I_D", "UC", "UD", "Q", "psi", "wC", "wD", "N", "NC", "ND",
    "UNC", "UND", "muC", "muD", "PiwC", "PiwD", "Lam", "R", "Rr", "PiC", "PiD",
    "YC", "YD", "MCC", "MCD", "Y", "Theta",
)
LEVEL_NAMES = frozenset({"UN", "UNC", "UND"})


def economy_variables(names: Tuple[str, ...], suffix: str = "", block: str = "economy") -> Tuple[Variable, ...]:
    """Declares economy variables; marginal disutilities are negative and stay in levels."""
    return tuple(
        Variable(name + suffix, "jump", "level" if name in LEVEL_NAMES else "log", block) for name in names
    )


def rotemberg(eps, theta, pi_bar, mc, pi_now, pi_next, discount, markup=1.0):
    """Rotemberg price-setting residual with an optional multiplicative markup shock on the elasticity."""
    return (
        markup * eps * mc
        - (markup * eps - 1.0)
        - theta * (pi_now - pi_bar) * pi_now
        + theta * discount * (pi_next - pi_bar) * pi_next
    )


def labor_index(chi, mu, n_c, n_d):
    """CES hours aggregator; linear at ``mu = 0``."""
    return (chi ** (-mu) * n_c ** (1.0 + mu) + (1.0 - chi) ** (-mu) * n_d ** (1.0 + mu)) ** (1.0 / (1.0 + mu))


def wage_index(mu, w_c, w_d):
    """Aggregate real wage index with exponent ``1 + mu``."""
    return (w_c ** (1.0 + mu) + w_d ** (1.0 + mu)) ** (1.0 / (1.0 + mu))


def period_utility(p: ParameterSet, cur):
    """``log X - nu N^(1+phi)/(1+phi)``."""
    return np.log(cur.X) - p.nu * cur.N ** (1.0 + p.phi_frisch) / (1.0 + p.phi_frisch)


def stylized_equations(p: ParameterSet, lag, cur, lead, durable: bool) -> Dict[str, np.ndarray]:
    """
    Equilibrium conditions of the stylized economies, in the order of their Lagrange multipliers.
    """
    a, mu, chi = p.alpha, p.mu, p.chi_c
    res = {}
    res["aggregator"] = cur.X - cur.C ** (1.0 - a) * cur.D ** a
    res["marginal_utility_c"] = cur.UC - (1.0 - a) / cur.C
    res["marginal_utility_d"] = cur.UD - a / cur.D
    if durable:
        res["relative_demand"] = cur.C / cur.D - (1.0 - a) / a * (cur.Q - (1.0 - p.delta) * cur.Lam * lead.Q)
    else:
        res["relative_demand"] = cur.C / cur.D - (1.0 - a) / a * cur.Q
    res["wage_c"] = cur.wC + cur.UN / cur.UC
    res["marginal_disutility"] = cur.UN + p.nu * chi ** (-mu) * cur.NC ** mu * cur.N ** (p.phi_frisch - mu)
    res["wage_ratio"] = cur.wC / cur.wD - (chi / (1.0 - chi)) ** (-mu) * (cur.NC / cur.ND) ** mu
    res["discount"] = cur.Lam - p.beta * lead.UC / cur.UC * lead.eB / cur.eB
    res["euler"] = 1.0 - cur.Lam * cur.R / lead.PiC
    res["relative_inflation"] = cur.PiD - cur.PiC * cur.Q / lag.Q
    res["real_rate"] = cur.Rr - cur.R / lead.PiC
    res["production_c"] = cur.YC - cur.eA * cur.eAC * cur.NC
    res["production_d"] = cur.YD - cur.eA * cur.eAD * cur.ND
    res["pricing_c"] = rotemberg(p.eps_c, p.theta_c, p.pi_c_bar, cur.MCC, cur.PiC, lead.PiC,
                                 cur.Lam * lead.YC / cur.YC)
    res["pricing_d"] = rotemberg(p.eps_d, p.theta_d, p.pi_d_bar, cur.MCD, cur.PiD, lead.PiD,
                                 cur.Lam * lead.Q / cur.Q * lead.YD / cur.YD)
    res["marginal_cost_c"] = cur.MCC - cur.wC / (cur.eA * cur.eAC)
    res["marginal_cost_d"] = cur.MCD - cur.wD / (cur.eA * cur.eAD * cur.Q)
    res["clearing_c"] = cur.YC - cur.C - p.theta_c / 2.0 * (cur.PiC - p.pi_c_bar) ** 2 * cur.YC
    res["clearing_d"] = (
        cur.YD - (cur.I_D if durable else cur.D) - p.theta_d / 2.0 * (cur.PiD - p.pi_d_bar) ** 2 * cur.YD
    )
    res["output"] = cur.Y - cur.YC - cur.Q * cur.YD
    res["labor_aggregate"] = cur.N - labor_index(chi, mu, cur.NC, cur.ND)
    if durable:
        res["durables_stock"] = cur.D - (1.0 - p.delta) * lag.D - cur.I_D
        res["user_cost"] = cur.Theta - (cur.Q - (1.0 - p.delta) * cur.Lam * lead.Q)
    return res


def fully_fledged_equations(p: ParameterSet, lag, cur, lead) -> Dict[str, np.ndarray]:
    """
    Equilibrium conditions of the fully-fledged economy: habits, sticky sectoral wages, durables with investment
    adjustment costs, government spending and markup shocks.
    """
    a, mu, chi, phi = p.alpha, p.mu, p.chi_c, p.phi_frisch
    res = {}
    res["aggregator"] = cur.X - cur.C ** (1.0 - a) * cur.D ** a
    res["habit"] = cur.C - (cur.Z - p.zeta * lag.S)
    res["habit_stock"] = cur.S - p.rho_c * lag.S - (1.0 - p.rho_c) * cur.Z
    res["marginal_utility_c"] = cur.UC - (1.0 - a) / cur.C
    res["marginal_utility_d"] = cur.UD - a / cur.D
    res["disutility_c"] = cur.UNC + p.nu * chi ** (-mu) * cur.NC ** mu * cur.N ** (phi - mu)
    res["disutility_d"] = cur.UND + p.nu * (1.0 - chi) ** (-mu) * cur.ND ** mu * cur.N ** (phi - mu)
    res["wage_markup_c"] = cur.muC + cur.UC * cur.wC / cur.UNC
    res["wage_markup_d"] = cur.muD + cur.UC * cur.wD / cur.UND
    for sector, theta_w in (("C", p.theta_wc), ("D", p.theta_wd)):
        shock = getattr(cur, "ew" + sector)
        pi_w, pi_w_next = getattr(cur, "Piw" + sector), getattr(lead, "Piw" + sector)
        wage_bill_growth = (getattr(lead, "w" + sector) * getattr(lead, "N" + sector)
                            / (getattr(cur, "w" + sector) * getattr(cur, "N" + sector)))
        res["wage_setting_" + sector.lower()] = (
            (1.0 - shock * p.eta)
            + shock * p.eta / getattr(cur, "mu" + sector)
            - theta_w * (pi_w - p.pi_c_bar) * pi_w
            + theta_w * cur.Lam * (pi_w_next - p.pi_c_bar) * pi_w_next * wage_bill_growth
        )
        res["wage_inflation_" + sector.lower()] = (
            pi_w - getattr(cur, "w" + sector) / getattr(lag, "w" + sector) * cur.PiC
        )
    res["discount"] = cur.Lam - p.beta * lead.UC / cur.UC * lead.eB / cur.eB
    res["euler"] = 1.0 - cur.Lam * cur.R / lead.PiC
    res["real_rate"] = cur.Rr - cur.R / lead.PiC
    res["relative_price"] = (
        cur.Q * cur.psi - cur.UD / cur.UC - (1.0 - p.delta) * cur.Lam * lead.Q * lead.psi
    )
    growth = cur.I_D / lag.I_D
    growth_next = lead.I_D / cur.I_D
    adjustment = p.phi_iac / 2.0 * (growth - 1.0) ** 2
    res["investment"] = (
        1.0
        - cur.psi * cur.eI * (1.0 - adjustment - p.phi_iac * (growth - 1.0) * growth)
        - cur.Lam * lead.psi * lead.Q / cur.Q * lead.eI * p.phi_iac * (growth_next - 1.0) * growth_next ** 2
    )
    res["durables_stock"] = cur.D - (1.0 - p.delta) * lag.D - cur.eI * cur.I_D * (1.0 - adjustment)
    res["relative_inflation"] = cur.PiD - cur.PiC * cur.Q / lag.Q
    res["production_c"] = cur.YC - cur.eA * cur.NC
    res["production_d"] = cur.YD - cur.eA * cur.ND
    res["pricing_c"] = rotemberg(p.eps_c, p.theta_c, p.pi_c_bar, cur.MCC, cur.PiC, lead.PiC,
                                 cur.Lam * lead.YC / cur.YC, markup=cur.eC)
    res["marginal_cost_c"] = cur.MCC - cur.wC / cur.eA
    res["pricing_d"] = rotemberg(p.eps_d, p.theta_d, p.pi_d_bar, cur.MCD, cur.PiD, lead.PiD,
                                 cur.Lam * lead.Q / cur.Q * lead.YD / cur.YD, markup=cur.eD)
    res["marginal_cost_d"] = cur.MCD - cur.wD / (cur.eA * cur.Q)
    res["clearing_c"] = (
        cur.YC - cur.C - p.g_bar * cur.eG
        - p.theta_c / 2.0 * (cur.PiC - p.pi_c_bar) ** 2 * cur.YC
        - p.theta_wc / 2.0 * (cur.PiwC - p.pi_c_bar) ** 2 * cur.wC * cur.NC
    )
    res["clearing_d"] = (
        cur.YD - cur.I_D
        - p.theta_d / 2.0 * (cur.PiD - p.pi_d_bar) ** 2 * cur.YD
        - p.theta_wd / 2.0 * (cur.PiwD - p.pi_c_bar) ** 2 * cur.wD * cur.ND
    )
    res["output"] = cur.Y - cur.YC - cur.Q * cur.YD
    res["labor_aggregate"] = cur.N - labor_index(chi, mu, cur.NC, cur.ND)
    res["user_cost"] = cur.Theta - (cur.Q * cur.psi - (1.0 - p.delta) * cur.Lam * lead.Q * lead.psi)
    return res
