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

from ..exceptions import ConfigurationException, SteadyStateException
from ..utils import get_logger, log_message
from .closed_form import closed_form_steady_state
from .system import build_model

log = get_logger(__name__)

STEADY_TOL = 1e-10


@dataclass(frozen=True)
class SteadyState:
    """
    Deterministic steady state of a system: levels aligned with its registry plus derived scalars.
    """

    system: object
    values: np.ndarray
    derived: Mapping[str, float] = field(default_factory=dict)
    residual: float = 0.0

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.system.registry.index(name)])

    def __contains__(self, name: str) -> bool:
        return name in self.system.registry

    @property
    def names(self):
        """Variable names in registry order."""
        return self.system.registry.names

    @property
    def transformed(self) -> np.ndarray:
        """Logs of log variables, levels otherwise."""
        return self.system.registry.to_transformed(self.values)

    def as_dict(self) -> Dict[str, float]:
        """Name to level mapping."""
        return dict(zip(self.names, map(float, self.values)))

    def report(self) -> Dict[str, float]:
        """Derived scalars and headline levels."""
        out = dict(self.derived)
        for name in ("R", "N", "NC", "ND", "Q", "Y", "C", "D", "W"):
            if name in self:
                out[name] = self[name]
        out["residual"] = self.residual
        return out


def _closing_rows(system):
    """Steady conditions that close a policy-free system (nominal rate at its target)."""
    if system.is_square:
        return None
    if system.n_equations == system.n_variables - 1 and "R" in system.registry and system.params is not None:
        position = system.registry.index("R")
        r_bar = system.params.r_bar
        return lambda levels: np.array([np.log(levels[position] / r_bar)])
    raise ConfigurationException(
        f"Cannot solve a steady state with {system.n_equations} equations for {system.n_variables} variables"
    )


def newton_levels(system, guess: np.ndarray, tol: float):
    """Root of the steady residuals (plus closing rows) in transformed space; hybr first, lm as fallback."""
    registry = system.registry
    closing = _closing_rows(system)

    def fun(x):
        levels = registry.to_levels(x)
        res = system.steady_residual(levels)
        if closing is not None:
            res = np.concatenate([res, closing(levels)])
        return res

    x0 = registry.to_transformed(guess)
    best = None
    for method in ("hybr", "lm"):
        sol = optimize.root(fun, x0, method=method, options={"xtol": 1e-14} if method == "hybr" else {})
        err = float(np.max(np.abs(fun(sol.x)))) if np.all(np.isfinite(sol.x)) else np.inf
        if best is None or err < best[1]:
            best = (sol.x, err)
        if err <= tol:
            break
    x, err = best
    return registry.to_levels(x), err


def solve_steady_state(system, guess: Optional[np.ndarray] = None, tol: float = STEADY_TOL,
                       max_chi_iterations: int = 20) -> SteadyState:
    """
    Solves the time-invariant residuals by Newton iteration in log-levels, starting from ``guess``
    (the closed-form steady state by default).

    For model variants the sector-C hours share ``chi_c`` is iterated to a fixed point: whenever the solved share
    differs from the one the system was built with, the system is rebuilt and solved again. The returned
    steady state references the system it belongs to.

    :raises SteadyStateException: on a non-positive guess for a log variable or when the residual stays above
        ``tol``
    """
    guess = system.guess if guess is None else np.asarray(guess, dtype=float)
    mask = system.registry.log_mask
    if np.any(guess[mask] <= 0.0):
        bad = [n for n, m, g in zip(system.registry.names, mask, guess) if m and g <= 0.0]
        raise SteadyStateException(f"Non-positive level in the guess for {', '.join(bad)}")

    for iteration in range(max_chi_iterations):
        levels, err = newton_levels(system, guess, tol)
        if err > tol:
            raise SteadyStateException(f"Steady state did not converge: max residual {err:.3e}")
        if system.params is None or "NC" not in system.registry:
            break
        chi = levels[system.registry.index("NC")] / levels[system.registry.index("N")]
        if abs(chi - system.params.chi_c) <= 1e-12:
            break
        log_message("Rebuilding with chi_c=%.12f (iteration %d)", log, chi, iteration + 1)
        rebuilt = system.with_params(system.params.replace(chi_c=float(chi)))
        guess = np.array([levels[system.registry.index(n)] if n in system.registry else g
                          for n, g in zip(rebuilt.registry.names, rebuilt.guess)])
        system = rebuilt
    else:
        raise SteadyStateException("chi_c fixed point did not converge")

    derived = dict(system.derived)
    if "NC" in system.registry:
        derived["chi_c"] = levels[system.registry.index("NC")] / levels[system.registry.index("N")]
        derived["hours"] = levels[system.registry.index("N")]
    if "R" in system.registry:
        derived["r_bar"] = levels[system.registry.index("R")]
    log_message("Steady state solved, max residual %.2e", log, err)
    return SteadyState(system, levels, derived, err)


def calibrate_nu(system, target_n: float) -> float:
    """
    Finds the labor-disutility scale ``nu`` for which steady-state hours equal ``target_n``.

    The root is bracketed on the closed-form hours condition and verified by a full steady-state solve.

    :raises ConfigurationException: when ``target_n`` is outside (0, 1) or the system is not a model variant
    :raises SteadyStateException: when the root finder fails or the verification misses the target
    """
    if not 0.0 < target_n < 1.0:
        raise ConfigurationException(f"Target hours must lie in (0, 1), got {target_n}")
    if system.variant is None:
        raise ConfigurationException("Only model variants can be calibrated")

    base = system.variant.effective_params(system.params)

    def gap(log_nu):
        levels, _ = closed_form_steady_state(system.kind, base.replace(nu=float(np.exp(log_nu))))
        return levels["N"] - target_n

    try:
        log_nu = optimize.brentq(gap, -30.0, 30.0, xtol=1e-14, rtol=1e-14, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise SteadyStateException(f"Could not calibrate nu: {exc}") from exc
    nu = float(np.exp(log_nu))
    rebuilt = build_model(system.variant, system.params.replace(nu=nu, target_n=target_n))
    steady = solve_steady_state(rebuilt)
    if abs(steady["N"] - target_n) > 1e-10:
        raise SteadyStateException(f"Calibrated nu={nu} gives N={steady['N']}, target {target_n}")
    log_message("Calibrated nu=%.10f for N=%.4f", log, nu, target_n)
    return nu
