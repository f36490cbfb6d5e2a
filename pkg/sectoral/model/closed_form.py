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

from ..exceptions import SteadyStateException
from .parameters import ParameterSet
from .variant import VariantKind


def closed_form_steady_state(kind: VariantKind, p: ParameterSet) -> Tuple[Dict[str, float], Dict[str, float]]:
    """
    Closed-form deterministic steady state at gross inflation ``pi_c_bar`` in both sectors.

    Hours are aggregated consistently (``chi_c = N^C/N``), so relative wages equal one and ``Q`` equals the ratio of
    marginal costs. When ``p.nu`` is ``None`` it is calibrated so that total hours equal ``p.target_n``.

    :return: levels of the economy variables and derived scalars (``chi_c``, ``nu``, ``g_bar``, ``r_bar``,
        markups, output shares)
    """
    a, beta, phi, delta = p.alpha, p.beta, p.phi_frisch, p.delta
    pi = p.pi_c_bar
    mc_c = (p.eps_c - 1.0) / p.eps_c
    mc_d = (p.eps_d - 1.0) / p.eps_d
    q = mc_c / mc_d
    w_c = mc_c
    w_d = mc_d * q
    fully_fledged = kind == VariantKind.FULLY_FLEDGED
    wage_markup = p.eta / (p.eta - 1.0) if fully_fledged else 1.0
    user_cost = 1.0 - (1.0 - delta) * beta if kind.durable else 1.0

    # quantities per unit of C
    d_per_c = a / ((1.0 - a) * q * user_cost)
    i_per_c = delta * d_per_c if kind.durable else 0.0
    yd_per_c = i_per_c if kind.durable else d_per_c
    if fully_fledged:
        y_per_c = (1.0 + q * yd_per_c) / (1.0 - p.g_y)
        yc_per_c = y_per_c - q * yd_per_c
    else:
        yc_per_c = 1.0
        y_per_c = 1.0 + q * yd_per_c
    n_per_c = yc_per_c + yd_per_c

    if p.nu is None:
        c = p.target_n / n_per_c
        nu = w_c * (1.0 - a) / (wage_markup * c * p.target_n ** phi)
    else:
        nu = p.nu
        c = (w_c * (1.0 - a) / (wage_markup * nu * n_per_c ** phi)) ** (1.0 / (1.0 + phi))
    if not np.isfinite(c) or c <= 0:
        raise SteadyStateException(f"Closed-form consumption is not positive: {c}")

    d = d_per_c * c
    n_c, n_d = yc_per_c * c, yd_per_c * c
    n = n_c + n_d
    y = y_per_c * c
    g_bar = p.g_y * y if fully_fledged else 0.0
    u_n = -nu * n ** phi
    levels = {
        "X": c ** (1.0 - a) * d ** a,
        "C": c,
        "D": d,
        "UC": (1.0 - a) / c,
        "UD": a / d,
        "Q": q,
        "wC": w_c,
        "wD": w_d,
        "N": n,
        "NC": n_c,
        "ND": n_d,
        "Lam": beta,
        "R": pi / beta,
        "Rr": 1.0 / beta,
        "PiC": pi,
        "PiD": pi,
        "YC": n_c,
        "YD": n_d,
        "MCC": mc_c,
        "MCD": mc_d,
        "Y": y,
    }
    if kind.durable:
        levels["I_D"] = i_per_c * c
        levels["Theta"] = q * user_cost
    if fully_fledged:
        levels.update(
            Z=c / (1.0 - p.zeta),
            S=c / (1.0 - p.zeta),
            psi=1.0,
            UNC=u_n,
            UND=u_n,
            muC=wage_markup,
            muD=wage_markup,
            PiwC=pi,
            PiwD=pi,
        )
    else:
        levels["UN"] = u_n
    derived = {
        "chi_c": n_c / n,
        "nu": nu,
        "g_bar": g_bar,
        "r_bar": pi / beta,
        "markup_c": 1.0 / mc_c,
        "markup_d": 1.0 / mc_d,
        "share_d": q * n_d / y,
        "hours": n,
    }
    return levels, derived


def period_utility_level(levels: Dict[str, float], p: ParameterSet) -> float:
    """Steady-state period utility."""
    return float(np.log(levels["X"]) - p.nu * levels["N"] ** (1.0 + p.phi_frisch) / (1.0 + p.phi_frisch))
