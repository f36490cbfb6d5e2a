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

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np
from scipy import optimize

from ..exceptions import RamseyException
from ..model.closed_form import period_utility_level
from ..model.steady import SteadyState, newton_levels
from ..model.variant import VariantKind
from ..utils import get_logger, json_str, log_message
from .system import RamseySystem, economy_jacobians, utility_gradient

log = get_logger(__name__)

RAMSEY_TOL = 1e-9
CONDITION_LIMIT = 1e12
HOMOTOPY_STEPS = 5


@dataclass(frozen=True)
class RamseySteadyState:
    """
    Steady state of the planner problem: levels of every variable (multipliers and auxiliaries included).
    """

    steady: SteadyState
    multipliers: Mapping[str, float]
    linear_residual: float
    zlb_weight: float
    history: tuple = field(default_factory=tuple)

    @property
    def system(self) -> RamseySystem:
        """The planner system."""
        return self.steady.system

    @property
    def pi_c(self) -> float:
        """Gross steady-state inflation of sector-C prices."""
        return self.steady["PiC"]

    @property
    def annual_inflation(self) -> float:
        """Annualized net inflation in percent."""
        return 100.0 * (self.pi_c ** 4 - 1.0)

    @property
    def residual(self) -> float:
        """Largest absolute steady residual."""
        return self.steady.residual

    def report(self) -> Dict[str, object]:
        """Levels, multipliers and headline numbers."""
        base = self.system.base
        levels = {name: self.steady[name] for name in base.economy_names}
        return {
            "zlb_weight": self.zlb_weight,
            "pi_c": self.pi_c,
            "annual_inflation": self.annual_inflation,
            "residual": self.residual,
            "linear_residual": self.linear_residual,
            "levels": levels,
            "multipliers": dict(self.multipliers),
            "homotopy": list(self.history),
        }

    def to_json(self) -> str:
        """Report as a JSON string."""
        return json_str(self.report())


def _no_nominal_rigidity(rs: RamseySystem, zlb_weight: float) -> bool:
    p = rs.params
    sticky = [p.theta_c, p.theta_d]
    if rs.kind == VariantKind.FULLY_FLEDGED:
        sticky += [p.theta_wc, p.theta_wd]
    return zlb_weight == 0.0 and not any(sticky)


class _PlannerSteady:
    # pylint: disable=too-many-instance-attributes
    """Nested steady-state search: outer over ``(C, PiC)``, inner over the remaining economy levels."""

    def __init__(self, rs: RamseySystem):
        base = rs.base
        self.rs = rs
        self.base = base
        registry = base.registry
        economy = base.economy_names
        self.levels = np.array(base.guess, copy=True)
        self.pos_c, self.pos_pi = registry.index("C"), registry.index("PiC")
        self.inner = np.array([registry.index(n) for n in economy if n not in ("C", "PiC")], dtype=int)
        self.inner_log = registry.log_mask[self.inner]
        rows = base.rows("economy")
        names = base.equation_names
        self.labor_row = names.index("labor_aggregate")
        self.inner_rows = np.array([r for r in rows if r != self.labor_row], dtype=int)
        self.r_column = economy.index("R")
        self.x_inner = self._to_x(self.levels[self.inner])

    def _to_x(self, values):
        return np.where(self.inner_log, np.log(np.abs(values)), values)

    def _from_x(self, x):
        return np.where(self.inner_log, np.exp(x), x)

    def fill(self, c: float, pi_c: float, x_inner: np.ndarray) -> np.ndarray:
        levels = np.array(self.levels, copy=True)
        levels[self.pos_c] = c
        levels[self.pos_pi] = pi_c
        levels[self.inner] = self._from_x(x_inner)
        return levels

    def solve_inner(self, c: float, pi_c: float) -> np.ndarray:
        def fun(x):
            return self.base.steady_residual(self.fill(c, pi_c, x))[self.inner_rows]

        sol = optimize.root(fun, self.x_inner, method="hybr", options={"xtol": 1e-13})
        if not np.all(np.isfinite(sol.x)):
            raise RamseyException(f"Inner steady-state search diverged at C={c:.6g}, PiC={pi_c:.6g}")
        err = float(np.max(np.abs(fun(sol.x))))
        if err > 1e-8:
            sol = optimize.root(fun, sol.x, method="lm")
            err = float(np.max(np.abs(fun(sol.x))))
        if err < 1e-6:
            self.x_inner = sol.x
        return self.fill(c, pi_c, sol.x)

    def multipliers(self, levels: np.ndarray, zlb_weight: float):
        """
        Multipliers solving the planner conditions other than the one for ``R``, which is returned as a residual.
        """
        j_prev, j_now, j_next = economy_jacobians(self.base, levels, levels, levels)
        beta = self.base.beta
        stacked = j_now + j_next / beta + beta * j_prev
        grad = utility_gradient(self.base, levels, zlb_weight)
        keep = np.array([j for j in range(stacked.shape[1]) if j != self.r_column], dtype=int)
        square = stacked[:, keep].T
        if np.linalg.cond(square) > CONDITION_LIMIT:
            raise RamseyException("Singular multiplier system")
        lam = np.linalg.solve(square, -grad[keep])
        linear_residual = float(np.max(np.abs(square @ lam + grad[keep])))
        r_condition = float(grad[self.r_column] + stacked[:, self.r_column] @ lam)
        return lam, r_condition, linear_residual

    def outer(self, zlb_weight: float, start: np.ndarray, fix_inflation: bool) -> np.ndarray:
        pi_bar = self.rs.params.pi_c_bar

        def unpack(z):
            return (np.exp(z[0]), pi_bar) if fix_inflation else (np.exp(z[0]), np.exp(z[1]))

        def fun(z):
            levels = self.solve_inner(*unpack(z))
            labor = self.base.steady_residual(levels)[self.labor_row]
            if fix_inflation:
                return np.array([labor])
            _, r_condition, _ = self.multipliers(levels, zlb_weight)
            return np.array([labor, r_condition])

        z0 = np.log(start[:1] if fix_inflation else start)
        sol = optimize.root(fun, z0, method="hybr", options={"xtol": 1e-13})
        err = float(np.max(np.abs(fun(sol.x))))
        if err > RAMSEY_TOL:
            raise RamseyException(f"Planner steady state did not converge (residual {err:.3g})")
        c, pi_c = unpack(sol.x)
        return np.array([c, pi_c])


def solve_ramsey_steady(rs: RamseySystem, start: Optional[Mapping[str, float]] = None, tol: float = RAMSEY_TOL,
                        homotopy_steps: Optional[int] = None) -> RamseySteadyState:
    """
    Steady state of the planner problem.

    A two-dimensional root search over sector-C consumption and inflation; for each candidate the other economy
    levels solve the equilibrium conditions except hours aggregation, and the multipliers solve the (linear)
    planner conditions except the one for the nominal rate. The two outer residuals are hours aggregation and the
    planner condition for the nominal rate. Without nominal rigidities and penalty, inflation is set to its target.
    The fully-fledged economy is reached by continuation in ``w_r`` from zero. The stacked steady state is finally
    polished with Newton steps when needed.

    :param start: optional ``{"C": .., "PiC": ..}`` starting point
    :raises RamseyException: on outer nonconvergence, a singular multiplier system or a residual above ``tol``
    """
    search = _PlannerSteady(rs)
    base = rs.base
    point = np.array([
        (start or {}).get("C", base.guess[search.pos_c]),
        (start or {}).get("PiC", rs.params.pi_c_bar),
    ])
    steps = homotopy_steps if homotopy_steps is not None else (
        HOMOTOPY_STEPS if rs.kind == VariantKind.FULLY_FLEDGED and rs.zlb_weight > 0 else 1)
    weights = np.linspace(0.0, rs.zlb_weight, steps + 1)[1:] if steps > 1 else np.array([rs.zlb_weight])
    history = []
    for weight in weights:
        fixed = _no_nominal_rigidity(rs, float(weight))
        point = search.outer(float(weight), point, fixed)
        history.append((float(weight), float(point[1])))
        log_message("Planner steady state at w_r=%g: C=%.8f PiC=%.10f", log, weight, point[0], point[1])

    levels = search.solve_inner(*point)
    lam, _, linear_residual = search.multipliers(levels, rs.zlb_weight)
    values = _stack(rs, levels, lam)
    err = float(np.max(np.abs(rs.steady_residual(values))))
    if err > tol:
        log_message("Polishing planner steady state (residual %.3g)", log, err)
        values, err = newton_levels(rs, values, tol)
    if err > tol:
        raise RamseyException(f"Planner steady residual {err:.3g} above {tol:g}")
    steady = SteadyState(rs, values, dict(base.derived, pi_c=float(values[base.registry.index("PiC")])), err)
    multipliers = dict(zip(rs.conditions, map(float, rs.multiplier_values(values))))
    out = RamseySteadyState(steady, multipliers, linear_residual, rs.zlb_weight, tuple(history))
    log_message("Planner steady state: annual inflation %.5f%%, residual %.2e", log, out.annual_inflation, err)
    return out


def _stack(rs: RamseySystem, levels: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Levels of the full planner registry from economy levels and multipliers."""
    base = rs.base
    p = base.params
    levels = np.array(levels, copy=True)
    registry = base.registry
    by_name = dict(zip(registry.names, levels))
    utility = period_utility_level(by_name, p)
    penalty = (by_name["R"] - p.r_bar) ** 2 / (1.0 - p.beta)
    welfare = utility / (1.0 - p.beta)
    for name, value in (("W", welfare), ("Pen", penalty), ("WP", welfare - rs.zlb_weight * penalty)):
        levels[registry.index(name)] = value
    aux_lag = levels[registry.indices(rs.lagged)] if rs.lagged else np.zeros(0)
    aux_lead = levels[registry.indices(rs.led)] if rs.led else np.zeros(0)
    return np.concatenate([levels, lam, aux_lag, aux_lead])
