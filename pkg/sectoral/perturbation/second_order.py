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

import numpy as np
from scipy import linalg

from ..exceptions import SolutionException
from ..utils import get_logger, log_message
from .derivatives import second_directional
from .first_order import FirstOrderSolution, selection_matrix

log = get_logger(__name__)


@dataclass(frozen=True)
class SecondOrderSolution:
    """
    Quadratic decision rule around the deterministic steady state,

    ``x_t = g_x k + g_u u + ½ g_kk[k, k] + g_ku[k, u] + ½ g_uu[u, u] + ½ g_ss``,

    simulated with pruning: the quadratic terms are fed only by the first-order state.
    """

    first: FirstOrderSolution
    g_kk: np.ndarray
    g_ku: np.ndarray
    g_uu: np.ndarray
    g_ss: np.ndarray

    @property
    def system(self):
        """The solved system."""
        return self.first.system

    @property
    def steady(self):
        """The expansion point."""
        return self.first.steady

    @property
    def states(self):
        """Predetermined variables."""
        return self.first.states

    @property
    def is_determinate(self) -> bool:
        """Always true; second-order solutions exist only for determinate systems."""
        return True


def solve_generalized_sylvester(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """
    Solves ``A X + B X (C ⊗ C) = D`` for ``X`` of shape ``(n, m*m)``.

    ``C`` is brought to complex Schur form so that ``C ⊗ C`` is upper triangular and the columns of the rotated
    unknown follow by forward substitution, one ``n × n`` solve each.

    :raises SolutionException: when one of the shifted systems is singular
    """
    m = c.shape[0]
    if m == 0:
        return np.zeros((a.shape[0], 0))
    t_mat, u_mat = linalg.schur(c, output="complex")
    tt = np.kron(t_mat, t_mat)
    uu = np.kron(u_mat, u_mat)
    rhs = d @ uu
    y = np.zeros_like(rhs)
    for col in range(m * m):
        forcing = rhs[:, col] - b @ (y[:, :col] @ tt[:col, col])
        try:
            y[:, col] = np.linalg.solve(a + tt[col, col] * b, forcing)
        except np.linalg.LinAlgError as exc:
            raise SolutionException("Singular system in the second-order state solve") from exc
    x = y @ uu.conj().T
    return x.real


def solve_second_order(first: FirstOrderSolution) -> SecondOrderSolution:
    """
    Second-order perturbation of a determinate first-order solution.

    Second derivatives of the residuals are taken along the directions the decision rule induces on
    ``(x_{t-1}, x_t, x_{t+1}, u_t)``; the state-state block solves a generalized Sylvester equation and the other
    blocks follow from the impact matrix ``f_now + f_next g_x S``.

    :raises SolutionException: for indeterminate or explosive first-order solutions and singular solves
    """
    if not first.is_determinate:
        raise SolutionException(f"Second order needs a determinate solution, got {first.verdict.value}")
    lin = first.lin
    system, steady = first.system, first.steady
    n, n_u = lin.n, lin.n_shocks
    g_x, g_u = first.g_x, first.g_u
    n_x = first.state_index.size
    select = selection_matrix(n, first.state_index)
    h_x, s_gu = first.h_x, select @ g_u

    # directions of (x_prev, x_now, x_next, u)
    v_k = np.vstack([select.T, g_x, g_x @ h_x, np.zeros((n_u, n_x))])
    v_u = np.vstack([np.zeros((n, n_u)), g_u, g_x @ s_gu, np.eye(n_u)])
    w_u = np.vstack([np.zeros((2 * n, n_u)), g_u, np.zeros((n_u, n_u))])
    directions = np.hstack([v_k, v_u, w_u])
    p = n_x + n_u
    pairs = [(i, j) for i in range(p) for j in range(i, p)] + [(p + j, p + j) for j in range(n_u)]
    values = second_directional(system, steady, directions, pairs)

    m = lin.f_now.shape[0]
    full = np.zeros((m, p, p))
    for col, (i, j) in enumerate(pairs[:len(pairs) - n_u]):
        full[:, i, j] = values[:, col]
        full[:, j, i] = values[:, col]
    k_kk = full[:, :n_x, :n_x]
    k_ku = full[:, :n_x, n_x:]
    k_uu = full[:, n_x:, n_x:]
    k_ss = values[:, len(pairs) - n_u:].sum(axis=1)

    impact = lin.f_now + lin.f_next @ g_x @ select
    f_next = lin.f_next
    g_kk = solve_generalized_sylvester(impact, f_next, h_x, -k_kk.reshape(m, n_x * n_x)).reshape(n, n_x, n_x)
    g_kk = 0.5 * (g_kk + g_kk.transpose(0, 2, 1))

    try:
        lu = linalg.lu_factor(impact)
    except (ValueError, linalg.LinAlgError) as exc:
        raise SolutionException("Singular impact matrix") from exc
    next_ku = np.einsum("iab,ac,bd->icd", g_kk, h_x, s_gu)
    g_ku = -linalg.lu_solve(lu, (k_ku + np.einsum("ij,jcd->icd", f_next, next_ku)).reshape(m, -1))
    g_ku = g_ku.reshape(n, n_x, n_u)
    next_uu = np.einsum("iab,ac,bd->icd", g_kk, s_gu, s_gu)
    g_uu = -linalg.lu_solve(lu, (k_uu + np.einsum("ij,jcd->icd", f_next, next_uu)).reshape(m, -1))
    g_uu = g_uu.reshape(n, n_u, n_u)
    g_uu = 0.5 * (g_uu + g_uu.transpose(0, 2, 1))

    trace_uu = np.einsum("ijj->i", g_uu)
    try:
        g_ss = -np.linalg.solve(impact + f_next, k_ss + f_next @ trace_uu)
    except np.linalg.LinAlgError as exc:
        raise SolutionException("Singular system for the uncertainty correction") from exc
    log_message("Second-order solution for %r with %d states", log, system, n_x)
    return SecondOrderSolution(first, g_kk, g_ku, g_uu, g_ss)
