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

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import ConfigurationException, DerivativeException
from ..utils import get_logger, log_message

log = get_logger(__name__)

CENTRAL_STEP = 1e-5
COMPLEX_STEP = 1e-20
SECOND_STEP = 1e-4
RICHARDSON_TOL = 1e-6
CHUNK = 2048


@dataclass(frozen=True)
class LinearizedSystem:
    # pylint: disable=too-many-instance-attributes
    """
    First derivatives of a system at a steady state, with respect to transformed variables
    (log-levels for log variables, levels otherwise) and innovations.
    """

    system: object
    steady: object
    f_prev: np.ndarray
    f_now: np.ndarray
    f_next: np.ndarray
    f_u: np.ndarray
    method: str = "central"
    richardson_gap: float = 0.0

    @property
    def n(self) -> int:
        """Variables."""
        return self.f_now.shape[1]

    @property
    def n_shocks(self) -> int:
        """Innovations."""
        return self.f_u.shape[1]

    @property
    def jacobian(self) -> np.ndarray:
        """``[f_prev, f_now, f_next, f_u]`` side by side."""
        return np.hstack([self.f_prev, self.f_now, self.f_next, self.f_u])

    @property
    def log_mask(self) -> np.ndarray:
        """Which columns are log-levels."""
        return self.system.registry.log_mask

    def row(self, equation: str) -> int:
        """Position of ``equation``."""
        try:
            return self.system.equation_names.index(equation)
        except ValueError as exc:
            raise ConfigurationException(f"Unknown equation {equation}") from exc


def stacked_point(steady) -> np.ndarray:
    """``[x̄, x̄, x̄, 0]``: the steady state as a point of the stacked argument."""
    x_bar = steady.transformed
    return np.concatenate([x_bar, x_bar, x_bar, np.zeros(steady.system.n_shocks)])


def stacked_residual(system, z: np.ndarray) -> np.ndarray:
    """Evaluates residuals at stacked points ``z`` of shape ``(3n + n_shocks, ...)``."""
    n = system.n_variables
    return system.residual_transformed(z[:n], z[n:2 * n], z[2 * n:3 * n], z[3 * n:])


def _steps(steady, base: float) -> np.ndarray:
    """Absolute steps: ``base`` in log-levels and for innovations, relative to the level otherwise."""
    levels = np.abs(steady.values)
    mask = steady.system.registry.log_mask
    per_var = np.where(mask, base, base * np.maximum(1.0, levels))
    return np.concatenate([per_var, per_var, per_var, np.full(steady.system.n_shocks, base)])


def _central(system, z0: np.ndarray, steps: np.ndarray) -> np.ndarray:
    bump = np.diag(steps)
    up = stacked_residual(system, z0[:, None] + bump)
    down = stacked_residual(system, z0[:, None] - bump)
    return (up - down) / (2.0 * steps)


def linearize(system, steady, method: str = "central", step: float = CENTRAL_STEP,
              richardson: bool = True) -> LinearizedSystem:
    """
    Jacobians of the residuals at ``steady`` by central finite differences in log-levels (Richardson-extrapolated
    from steps ``h`` and ``h/2``) or, with ``method="complex"``, by complex steps.

    :raises DerivativeException: when a residual is not finite at a differentiation point
    :raises ConfigurationException: for an unknown method or complex steps on a system that does not support them
    """
    z0 = stacked_point(steady)
    gap = 0.0
    if method == "complex":
        if not system.complex_safe:
            raise ConfigurationException("This system does not support complex-step derivatives")
        jac = np.imag(stacked_residual(system, z0[:, None] + 1j * COMPLEX_STEP * np.eye(z0.size))) / COMPLEX_STEP
    elif method == "central":
        steps = _steps(steady, step)
        jac = _central(system, z0, steps)
        if richardson:
            half = _central(system, z0, steps / 2.0)
            scale = np.maximum(1.0, np.abs(jac).max(axis=1, keepdims=True))
            gap = float(np.max(np.abs(half - jac) / scale)) if jac.size else 0.0
            jac = (4.0 * half - jac) / 3.0
            if gap > RICHARDSON_TOL:
                log_message("Jacobian changes by %.2e when halving the step", log, gap, level=logging.WARNING)
    else:
        raise ConfigurationException(f"Unknown differentiation method {method}")
    if not np.all(np.isfinite(jac)):
        raise DerivativeException("Non-finite residual while differentiating")
    n = system.n_variables
    return LinearizedSystem(
        system, steady, jac[:, :n], jac[:, n:2 * n], jac[:, 2 * n:3 * n], jac[:, 3 * n:], method, gap
    )


def second_directional(system, steady, directions: np.ndarray, pairs: Sequence[Tuple[int, int]],
                       step: float = SECOND_STEP, chunk: int = CHUNK) -> np.ndarray:
    """
    Second directional derivatives ``D²f[d_i, d_j]`` of the stacked residual at ``steady`` for every ``(i, j)`` in
    ``pairs``, where ``d_i`` are the columns of ``directions`` (shape ``(3n + n_shocks, p)``).

    Complex-safe systems use a complex step along ``d_i`` over a central difference along ``d_j``; other systems
    use the real four-point stencil. Directions are normalized before stepping and zero directions yield zeros.

    :return: array of shape ``(n_equations, len(pairs))``
    """
    z0 = stacked_point(steady)
    norms = np.max(np.abs(directions), axis=0) if directions.size else np.zeros(0)
    unit = np.divide(directions, norms, out=np.zeros_like(directions), where=norms > 0)
    pairs = [(i, j) for i, j in pairs]
    out = np.zeros((system.n_equations, len(pairs)))
    live = [k for k, (i, j) in enumerate(pairs) if norms[i] > 0 and norms[j] > 0]
    per_pair = 2 if system.complex_safe else 4
    size = max(1, chunk // per_pair)
    for start in range(0, len(live), size):
        batch = live[start:start + size]
        a = unit[:, [pairs[k][0] for k in batch]]
        b = unit[:, [pairs[k][1] for k in batch]]
        if system.complex_safe:
            shifted = z0[:, None] + 1j * COMPLEX_STEP * a
            up = stacked_residual(system, shifted + step * b)
            down = stacked_residual(system, shifted - step * b)
            value = np.imag(up - down) / (2.0 * step * COMPLEX_STEP)
        else:
            pp = stacked_residual(system, z0[:, None] + step * (a + b))
            pm = stacked_residual(system, z0[:, None] + step * (a - b))
            mp = stacked_residual(system, z0[:, None] - step * (a - b))
            mm = stacked_residual(system, z0[:, None] - step * (a + b))
            value = (pp - pm - mp + mm) / (4.0 * step * step)
        scale = np.array([norms[pairs[k][0]] * norms[pairs[k][1]] for k in batch])
        out[:, batch] = value * scale
    if not np.all(np.isfinite(out)):
        raise DerivativeException("Non-finite residual while taking second derivatives")
    return out
