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
"""
First-order conditions of the stylized nondurable planner, derived by hand.
"""

from sectoral.ramsey import multiplier_name


def _at(rs, values):
    names = rs.registry.names
    return {name: values[pos] for pos, name in enumerate(names)}


def stylized_planner_conditions(rs, lag, now, lead):
    """
    Derivative of the planner's Lagrangian with respect to every economy variable of period ``t``.

    ``lag``, ``now`` and ``lead`` are level vectors aligned with ``rs.registry``. Period ``t - 1`` conditions
    contribute through their leads (multipliers divided by ``beta``), period ``t + 1`` conditions through their lags
    (multipliers times ``beta``).
    """
    # pylint: disable=too-many-locals
    p = rs.base.params
    a, mu, chi, nu, phi, beta = p.alpha, p.mu, p.chi_c, p.nu, p.phi_frisch, p.beta
    th_c, th_d, pc_bar, pd_bar = p.theta_c, p.theta_d, p.pi_c_bar, p.pi_d_bar
    w_r = rs.zlb_weight
    l, c, n = _at(rs, lag), _at(rs, now), _at(rs, lead)

    def lm(values, equation):
        return values[multiplier_name(equation)]

    def g_c(pi):
        return (pi - pc_bar) * pi

    def g_d(pi):
        return (pi - pd_bar) * pi

    k = (chi / (1.0 - chi)) ** (-mu)
    s = chi ** (-mu) * c["NC"] ** (1.0 + mu) + (1.0 - chi) ** (-mu) * c["ND"] ** (1.0 + mu)
    a_c, a_d = c["eA"] * c["eAC"], c["eA"] * c["eAD"]
    foc = {}
    foc["X"] = c["eB"] / c["X"] + lm(c, "aggregator")
    foc["C"] = (
        -lm(c, "aggregator") * (1.0 - a) * c["C"] ** (-a) * c["D"] ** a
        + lm(c, "marginal_utility_c") * (1.0 - a) / c["C"] ** 2
        + lm(c, "relative_demand") / c["D"]
        - lm(c, "clearing_c")
    )
    foc["D"] = (
        -lm(c, "aggregator") * a * c["C"] ** (1.0 - a) * c["D"] ** (a - 1.0)
        + lm(c, "marginal_utility_d") * a / c["D"] ** 2
        - lm(c, "relative_demand") * c["C"] / c["D"] ** 2
        - lm(c, "clearing_d")
    )
    foc["UC"] = (
        lm(c, "marginal_utility_c")
        - lm(c, "wage_c") * c["UN"] / c["UC"] ** 2
        + lm(c, "discount") * beta * n["UC"] * n["eB"] / (c["UC"] ** 2 * c["eB"])
        - lm(l, "discount") * c["eB"] / (l["UC"] * l["eB"])
    )
    foc["UD"] = lm(c, "marginal_utility_d")
    foc["Q"] = (
        -lm(c, "relative_demand") * (1.0 - a) / a
        - lm(c, "relative_inflation") * c["PiC"] / l["Q"]
        - lm(c, "pricing_d") * th_d * c["Lam"] * n["Q"] / c["Q"] ** 2 * n["YD"] / c["YD"] * g_d(n["PiD"])
        + lm(c, "marginal_cost_d") * c["wD"] / (a_d * c["Q"] ** 2)
        - lm(c, "output") * c["YD"]
        + lm(l, "pricing_d") * th_d * l["Lam"] / l["Q"] * c["YD"] / l["YD"] * g_d(c["PiD"]) / beta
        + beta * lm(n, "relative_inflation") * n["PiC"] * n["Q"] / c["Q"] ** 2
    )
    foc["UN"] = lm(c, "wage_c") / c["UC"] + lm(c, "marginal_disutility")
    foc["wC"] = lm(c, "wage_c") + lm(c, "wage_ratio") / c["wD"] - lm(c, "marginal_cost_c") / a_c
    foc["wD"] = -lm(c, "wage_ratio") * c["wC"] / c["wD"] ** 2 - lm(c, "marginal_cost_d") / (a_d * c["Q"])
    foc["N"] = (
        -c["eB"] * nu * c["N"] ** phi
        + lm(c, "marginal_disutility") * nu * chi ** (-mu) * c["NC"] ** mu * (phi - mu) * c["N"] ** (phi - mu - 1.0)
        + lm(c, "labor_aggregate")
    )
    foc["Lam"] = (
        lm(c, "discount")
        - lm(c, "euler") * c["R"] / n["PiC"]
        + lm(c, "pricing_c") * th_c * n["YC"] / c["YC"] * g_c(n["PiC"])
        + lm(c, "pricing_d") * th_d * n["Q"] / c["Q"] * n["YD"] / c["YD"] * g_d(n["PiD"])
    )
    foc["R"] = (
        -2.0 * w_r * (c["R"] - p.r_bar)
        - lm(c, "euler") * c["Lam"] / n["PiC"]
        - lm(c, "real_rate") / n["PiC"]
    )
    foc["Rr"] = lm(c, "real_rate")
    foc["PiC"] = (
        -lm(c, "relative_inflation") * c["Q"] / l["Q"]
        - lm(c, "pricing_c") * th_c * (2.0 * c["PiC"] - pc_bar)
        - lm(c, "clearing_c") * th_c * (c["PiC"] - pc_bar) * c["YC"]
        + (lm(l, "euler") * l["Lam"] * l["R"] / c["PiC"] ** 2
           + lm(l, "real_rate") * l["R"] / c["PiC"] ** 2
           + lm(l, "pricing_c") * th_c * l["Lam"] * c["YC"] / l["YC"] * (2.0 * c["PiC"] - pc_bar)) / beta
    )
    foc["PiD"] = (
        lm(c, "relative_inflation")
        - lm(c, "pricing_d") * th_d * (2.0 * c["PiD"] - pd_bar)
        - lm(c, "clearing_d") * th_d * (c["PiD"] - pd_bar) * c["YD"]
        + lm(l, "pricing_d") * th_d * l["Lam"] * c["Q"] / l["Q"] * c["YD"] / l["YD"]
        * (2.0 * c["PiD"] - pd_bar) / beta
    )
    foc["YC"] = (
        lm(c, "production_c")
        - lm(c, "pricing_c") * th_c * c["Lam"] * n["YC"] / c["YC"] ** 2 * g_c(n["PiC"])
        + lm(c, "clearing_c") * (1.0 - th_c / 2.0 * (c["PiC"] - pc_bar) ** 2)
        - lm(c, "output")
        + lm(l, "pricing_c") * th_c * l["Lam"] / l["YC"] * g_c(c["PiC"]) / beta
    )
    foc["NC"] = (
        lm(c, "marginal_disutility") * nu * chi ** (-mu) * mu * c["NC"] ** (mu - 1.0) * c["N"] ** (phi - mu)
        - lm(c, "wage_ratio") * k * mu * c["NC"] ** (mu - 1.0) * c["ND"] ** (-mu)
        - lm(c, "production_c") * a_c
        - lm(c, "labor_aggregate") * s ** (-mu / (1.0 + mu)) * chi ** (-mu) * c["NC"] ** mu
    )
    foc["YD"] = (
        lm(c, "production_d")
        - lm(c, "pricing_d") * th_d * c["Lam"] * n["Q"] / c["Q"] * n["YD"] / c["YD"] ** 2 * g_d(n["PiD"])
        + lm(c, "clearing_d") * (1.0 - th_d / 2.0 * (c["PiD"] - pd_bar) ** 2)
        - lm(c, "output") * c["Q"]
        + lm(l, "pricing_d") * th_d * l["Lam"] * c["Q"] / l["Q"] / l["YD"] * g_d(c["PiD"]) / beta
    )
    foc["ND"] = (
        lm(c, "wage_ratio") * k * mu * c["NC"] ** mu * c["ND"] ** (-mu - 1.0)
        - lm(c, "production_d") * a_d
        - lm(c, "labor_aggregate") * s ** (-mu / (1.0 + mu)) * (1.0 - chi) ** (-mu) * c["ND"] ** mu
    )
    foc["MCC"] = lm(c, "pricing_c") * p.eps_c + lm(c, "marginal_cost_c")
    foc["MCD"] = lm(c, "pricing_d") * p.eps_d + lm(c, "marginal_cost_d")
    foc["Y"] = lm(c, "output")
    return foc
