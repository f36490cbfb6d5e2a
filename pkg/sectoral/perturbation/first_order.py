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
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from ..exceptions import ConfigurationException, SolutionException
from ..utils import get_logger, log_message
from .derivatives import LinearizedSystem

log = get_logger(__name__)

UNIT_ROOT_TOL = 1e-6
RESIDUAL_TOL = 1e-8


class Determinacy(str, Enum):
    """
    Blanchard-Kahn verdict of a linear rational-expectations system.
    """

    DETERMINATE = "determinate"
    INDETERMINATE = "indeterminate"
    EXPLOSIVE = "explosive"


@dataclass(frozen=True)
class FirstOrderSolution:
    # pylint: disable=too-many-instance-attributes
    """
    Linear decision rule ``x_t = g_x k_t + g_u u_t`` in deviations of transformed variables from the steady state,
    where ``k_t`` stacks the previous-period values of the predetermined variables, so ``k_{t+1} = S x_t``.

    ``g_x`` and ``g_u`` are ``None`` unless the verdict is determinate.
    """

    lin: LinearizedSystem
    state_index: np.ndarray
    eigenvalues: np.ndarray
    n_stable: int
    verdict: Determinacy
    reason: str = ""
    g_x: Optional[np.ndarray] = None
    g_u: Optional[np.ndarray] = None
    residual: float = np.nan

    @property
    def system(self):
        """The solved system."""
        return self.lin.system

    @property
    def steady(self):
        """The steady state the solution is expanded around."""
        return self.lin.steady

    @property
    def states(self) -> Tuple[str, ...]:
        """Names of the predetermined variables, in state order."""
        names = self.system.registry.names
        return tuple(names[i] for i in self.state_index)

    @property
    def is_determinate(self) -> bool:
        """Whether a unique stable solution exists."""
        return self.verdict == Determinacy.DETERMINATE

    @property
    def h_x(self) -> np.ndarray:
        """State transition ``k_{t+1} = h_x k_t + h_u u_t``."""
        self._require()
        return self.g_x[self.state_index]

    @property
    def h_u(self) -> np.ndarray:
        """Innovation loading of the state transition."""
        self._require()
        return self.g_u[self.state_index]

    @property
    def controls(self) -> np.ndarray:
        """Rows of ``g_x`` for the non-predetermined variables."""
        self._require()
        keep = np.setdiff1d(np.arange(self.g_x.shape[0]), self.state_index)
        return self.g_x[keep]

    @property
    def spectral_radius(self) -> float:
        """Largest modulus of the state transition's eigenvalues (0 without states)."""
        if self.state_index.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.h_x))))

    def index(self, name: str) -> int:
        """Registry position of ``name``."""
        return self.system.registry.index(name)

    def _require(self):
        if not self.is_determinate:
            raise SolutionException(f"No unique stable solution: {self.verdict.value} ({self.reason})")


def selection_matrix(n: int, state_index: np.ndarray) -> np.ndarray:
    """``S`` with ``S x = k``: picks the predetermined variables out of a full vector."""
    select = np.zeros((state_index.size, n))
    select[np.arange(state_index.size), state_index] = 1.0
    return select


def solve_first_order(lin: LinearizedSystem, tol: float = UNIT_ROOT_TOL) -> FirstOrderSolution:
    """
    Solves the linearized system by an ordered generalized Schur decomposition.

    The system ``f_prev k_t + f_now x_t + f_next E_t x_{t+1} + f_u u_t = 0`` is stacked with ``k_{t+1} = S x_t``;
    generalized eigenvalues with modulus at most ``1 + tol`` are ordered first and counted as stable. A unique
    stable solution needs exactly one stable root per predetermined variable. Indeterminate and explosive systems
    are reported through the verdict rather than raised.

    :raises ConfigurationException: for non-square systems
    """
    system = lin.system
    n = lin.n
    if lin.f_now.shape[0] != n:
        raise ConfigurationException(f"Cannot solve a system with {lin.f_now.shape[0]} equations for {n} variables")
    registry = system.registry
    state_index = np.array([registry.index(name) for name in system.states], dtype=int)
    n_x = state_index.size
    select = selection_matrix(n, state_index)
    f_p = lin.f_prev[:, state_index]

    lead = np.block([[np.zeros((n, n_x)), lin.f_next], [np.eye(n_x), np.zeros((n_x, n))]])
    current = np.block([[-f_p, -lin.f_now], [np.zeros((n_x, n_x)), select]])

    def stable(alpha, beta):
        return np.abs(alpha) <= (1.0 + tol) * np.abs(beta)

    _, _, alpha, beta, _, z_mat = linalg.ordqz(current, lead, sort=stable, output="complex")
    with np.errstate(divide="ignore", invalid="ignore"):
        moduli = np.where(np.abs(beta) < 1e-14 * max(1.0, np.abs(alpha).max()), np.inf, np.abs(alpha / beta))
    singular = np.sum((np.abs(alpha) < 1e-12) & (np.abs(beta) < 1e-12))
    n_stable = int(np.sum(stable(alpha, beta)))

    def verdict(kind, reason):
        log_message("%r: %s (%s)", log, system, kind.value, reason, level=logging.DEBUG)
        return FirstOrderSolution(lin, state_index, np.sort(moduli), n_stable, kind, reason)

    if singular:
        return verdict(Determinacy.INDETERMINATE, "singular pencil")
    if n_stable > n_x:
        return verdict(Determinacy.INDETERMINATE, f"{n_stable} stable roots for {n_x} predetermined variables")
    if n_stable < n_x:
        return verdict(Determinacy.EXPLOSIVE, f"{n_stable} stable roots for {n_x} predetermined variables")

    z11 = z_mat[:n_x, :n_x]
    z21 = z_mat[n_x:, :n_x]
    if n_x and np.linalg.cond(z11) > 1e12:
        return verdict(Determinacy.EXPLOSIVE, "rank condition fails")
    g_x = np.linalg.solve(z11.T, z21.T).T if n_x else np.zeros((n, 0), dtype=complex)
    if np.max(np.abs(g_x.imag), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(g_x.real), initial=0.0)):
        return verdict(Determinacy.EXPLOSIVE, "complex decision rule")
    g_x = g_x.real

    impact = lin.f_now + lin.f_next @ g_x @ select
    try:
        g_u = -np.linalg.solve(impact, lin.f_u)
    except np.linalg.LinAlgError as exc:
        raise SolutionException("Singular impact matrix") from exc

    residual = f_p + lin.f_now @ g_x + lin.f_next @ g_x @ select @ g_x
    err = float(np.max(np.abs(residual), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(lin.f_now))))
    if err > RESIDUAL_TOL * scale:
        log_message("First-order residual %.2e above tolerance for %r", log, err, system, level=logging.WARNING)
    return FirstOrderSolution(
        lin, state_index, np.sort(moduli), n_stable, Determinacy.DETERMINATE, "", g_x, g_u, err
    )
