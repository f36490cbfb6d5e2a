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
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import linalg

from ..exceptions import ConfigurationException, SolutionException
from ..utils import get_logger, log_message
from .first_order import FirstOrderSolution
from .second_order import SecondOrderSolution

log = get_logger(__name__)

Solution = Union[FirstOrderSolution, SecondOrderSolution]

PERCENT = 100.0
ZLB_PERIODS = 200_000
ZLB_CHAINS = 50


@dataclass(frozen=True)
class ImpulseResponse:
    """
    Responses to a one-time innovation, in percent deviations from the steady state (100 × deviation of the log
    for log variables, 100 × deviation of the level otherwise). Rows are periods ``0 … horizon-1``.
    """

    shock: str
    size: float
    horizon: int
    values: pd.DataFrame
    order: int = 1

    def __getitem__(self, variable: str) -> np.ndarray:
        if variable not in self.values.columns:
            raise ConfigurationException(f"Variable {variable} is not part of the impulse response")
        return self.values[variable].to_numpy()

    @property
    def variables(self):
        """Variables in column order."""
        return tuple(self.values.columns)

    def to_long(self) -> pd.DataFrame:
        """Long format with columns ``t, variable, value``."""
        frame = self.values.copy()
        frame.index.name = "t"
        long = frame.reset_index().melt(id_vars="t", var_name="variable", value_name="value")
        return long.sort_values(["variable", "t"], kind="mergesort").reset_index(drop=True)


@dataclass(frozen=True)
class WelfareMean:
    """
    Expected discounted utility with and without the interest-rate penalty.
    """

    with_penalty: float
    without_penalty: float
    conditional: bool = True


def _first(sol: Solution) -> FirstOrderSolution:
    first = sol.first if isinstance(sol, SecondOrderSolution) else sol
    if not first.is_determinate:
        raise SolutionException(f"No unique stable solution: {first.verdict.value} ({first.reason})")
    return first


def _shock_position(first: FirstOrderSolution, shock: str) -> int:
    try:
        return first.system.shocks.index(shock)
    except ValueError as exc:
        raise ConfigurationException(
            f"Unknown shock {shock}; available: {', '.join(first.system.shocks)}"
        ) from exc


def _quadratic(g_kk, g_ku, g_uu, g_ss, k, u):
    return (0.5 * np.einsum("ijk,jb,kb->ib", g_kk, k, k)
            + np.einsum("ijk,jb,kb->ib", g_ku, k, u)
            + 0.5 * np.einsum("ijk,jb,kb->ib", g_uu, u, u)
            + 0.5 * g_ss[:, None])


def pruned_paths(sol: Solution, shocks: np.ndarray, rows: Optional[Sequence[int]] = None,
                 k_first: np.ndarray = None, k_second: np.ndarray = None):
    """
    Simulates deviations of transformed variables under the pruned decision rule.

    :param shocks: innovations of shape ``(T, n_shocks, B)`` for ``B`` parallel paths
    :param rows: registry positions to record (all by default)
    :param k_first: initial first-order state ``(n_states, B)``, zero by default
    :param k_second: initial second-order state, zero by default
    :return: ``(paths, k_first, k_second)`` with paths of shape ``(T, len(rows), B)`` and the terminal states
    """
    first = _first(sol)
    steps, _, batch = shocks.shape
    rows = np.arange(first.g_x.shape[0]) if rows is None else np.asarray(rows, dtype=int)
    n_x = first.state_index.size
    h_x, h_u = first.h_x, first.h_u
    g_x, g_u = first.g_x[rows], first.g_u[rows]
    second = isinstance(sol, SecondOrderSolution)
    if second:
        row_terms = (sol.g_kk[rows], sol.g_ku[rows], sol.g_uu[rows], sol.g_ss[rows])
        idx = first.state_index
        state_terms = (sol.g_kk[idx], sol.g_ku[idx], sol.g_uu[idx], sol.g_ss[idx])
    k_f = np.zeros((n_x, batch)) if k_first is None else np.array(k_first, dtype=float).reshape(n_x, batch)
    k_s = np.zeros((n_x, batch)) if k_second is None else np.array(k_second, dtype=float).reshape(n_x, batch)
    out = np.empty((steps, rows.size, batch))
    for t in range(steps):
        u = shocks[t]
        path = g_x @ k_f + g_u @ u
        if second:
            path = path + g_x @ k_s + _quadratic(*row_terms, k_f, u)
            k_s = h_x @ k_s + _quadratic(*state_terms, k_f, u)
        k_f = h_x @ k_f + h_u @ u
        out[t] = path
    return out, k_f, k_s


def _frame(first: FirstOrderSolution, paths: np.ndarray, rows: np.ndarray) -> pd.DataFrame:
    names = first.system.registry.names
    return pd.DataFrame(PERCENT * paths, columns=[names[r] for r in rows])


def impulse_response(sol: Solution, shock: str, size: float = 1.0, horizon: int = 40,
                     variables: Sequence[str] = None, draws: int = 200, burn_in: int = 200,
                     seed: int = 0) -> ImpulseResponse:
    """
    Responses to an innovation of ``size`` standard deviations in ``shock``.

    First-order responses are deterministic. Second-order responses are taken at the stochastic baseline: ``draws``
    pruned paths are run ``burn_in`` periods from the steady state, then continued with and without the impulse
    under identical future innovations; the response is the average difference.

    :raises ConfigurationException: for unknown shocks or variables
    """
    first = _first(sol)
    position = _shock_position(first, shock)
    registry = first.system.registry
    rows = np.arange(len(registry)) if variables is None else registry.indices(variables)
    n_u = first.system.n_shocks
    if isinstance(sol, SecondOrderSolution):
        rng = np.random.default_rng(seed)
        warm = rng.standard_normal((burn_in, n_u, draws))
        _, k_f, k_s = pruned_paths(sol, warm, rows[:0])
        future = rng.standard_normal((horizon, n_u, draws))
        impulse = future.copy()
        impulse[0, position] += size
        both = np.concatenate([impulse, future], axis=2)
        paths, _, _ = pruned_paths(sol, both, rows, np.hstack([k_f, k_f]), np.hstack([k_s, k_s]))
        response = (paths[:, :, :draws] - paths[:, :, draws:]).mean(axis=2)
        order = 2
    else:
        shocks = np.zeros((horizon, n_u, 1))
        shocks[0, position, 0] = size
        response = pruned_paths(sol, shocks, rows)[0][:, :, 0]
        order = 1
    return ImpulseResponse(shock, float(size), horizon, _frame(first, response, rows), order)


def irf_distance(a: ImpulseResponse, b: ImpulseResponse, variable: str) -> np.ndarray:
    """
    Root cumulated squared difference ``100 √(Σ_{s≤t} (a_s − b_s)²)`` of one variable's responses.

    ``a_s`` and ``b_s`` are log deviations (level deviations for level variables), so the result is in percent and
    equals the root cumulated squared difference of the stored percent responses.

    :raises ConfigurationException: for mismatched horizons
    """
    if a.horizon != b.horizon:
        raise ConfigurationException(f"Mismatched horizons {a.horizon} and {b.horizon}")
    diff = (a[variable] - b[variable]) / PERCENT
    return PERCENT * np.sqrt(np.cumsum(diff ** 2))


def simulate(sol: Solution, periods: int, seed: int = 0, burn_in: int = 0,
             variables: Sequence[str] = None) -> pd.DataFrame:
    """
    Simulated paths in percent deviations from the steady state, starting at the steady state.
    Second-order solutions are simulated with pruning.
    """
    first = _first(sol)
    registry = first.system.registry
    rows = np.arange(len(registry)) if variables is None else registry.indices(variables)
    rng = np.random.default_rng(seed)
    shocks = rng.standard_normal((burn_in + periods, first.system.n_shocks, 1))
    paths = pruned_paths(sol, shocks, rows)[0][burn_in:, :, 0]
    return _frame(first, paths, rows)


def state_covariance(first: FirstOrderSolution) -> np.ndarray:
    """
    Unconditional covariance of the first-order state.

    :raises SolutionException: when the state transition has a unit or explosive root
    """
    first = _first(first)
    if first.state_index.size == 0:
        return np.zeros((0, 0))
    if first.spectral_radius >= 1.0 - 1e-10:
        raise SolutionException("Unconditional moments need a stationary state transition")
    h_u = first.h_u
    return linalg.solve_discrete_lyapunov(first.h_x, h_u @ h_u.T)


def moments(sol: Solution, variables: Sequence[str] = None) -> pd.DataFrame:
    """
    First-order unconditional standard deviations (percent) and covariances.

    :return: covariance matrix in percent squared, as a frame indexed and labelled by variable; the standard
        deviations are its square-rooted diagonal
    """
    first = _first(sol)
    registry = first.system.registry
    rows = np.arange(len(registry)) if variables is None else registry.indices(variables)
    sigma_k = state_covariance(first)
    g_x, g_u = first.g_x[rows], first.g_u[rows]
    cov = g_x @ sigma_k @ g_x.T + g_u @ g_u.T
    names = [registry.names[r] for r in rows]
    return pd.DataFrame(PERCENT ** 2 * cov, index=names, columns=names)


def standard_deviations(sol: Solution, variables: Sequence[str] = None) -> pd.Series:
    """Unconditional first-order standard deviations in percent."""
    cov = moments(sol, variables)
    return pd.Series(np.sqrt(np.clip(np.diag(cov.to_numpy()), 0.0, None)), index=cov.index)


def _initial_deviation(sol: SecondOrderSolution, initial) -> np.ndarray:
    first = sol.first
    dev = np.zeros(first.state_index.size)
    if initial is None:
        return dev
    registry = first.system.registry
    for pos, idx in enumerate(first.state_index):
        name = registry.names[idx]
        if name in initial:
            level = initial[name]
            own = first.steady.values[idx]
            dev[pos] = np.log(level / own) if registry[name].transform == "log" else level - own
    return dev


def expected_levels(sol: SecondOrderSolution, rows: Sequence[int], conditional: bool = True,
                    initial=None) -> np.ndarray:
    """
    Second-order expectation of transformed variables at ``rows``, as levels of the transformation.

    Conditional expectations are taken given the initial state (the steady state of ``sol`` or the matching
    entries of ``initial``, a steady state of another system); unconditional ones use the ergodic mean of the
    pruned solution.
    """
    first = sol.first
    rows = np.asarray(rows, dtype=int)
    x_bar = first.steady.transformed[rows]
    if conditional:
        dk = _initial_deviation(sol, initial)
        dev = (first.g_x[rows] @ dk + 0.5 * np.einsum("ijk,j,k->i", sol.g_kk[rows], dk, dk)
               + 0.5 * sol.g_ss[rows])
        return x_bar + dev
    sigma_k = state_covariance(first)
    idx = first.state_index
    n_x = idx.size
    forcing = (0.5 * np.einsum("ijk,jk->i", sol.g_kk[idx], sigma_k)
               + 0.5 * np.einsum("ijj->i", sol.g_uu[idx]) + 0.5 * sol.g_ss[idx])
    mean_k = np.linalg.solve(np.eye(n_x) - first.h_x, forcing) if n_x else np.zeros(0)
    dev = (first.g_x[rows] @ mean_k + 0.5 * np.einsum("ijk,jk->i", sol.g_kk[rows], sigma_k)
           + 0.5 * np.einsum("ijj->i", sol.g_uu[rows]) + 0.5 * sol.g_ss[rows])
    return x_bar + dev


def welfare_mean(sol: SecondOrderSolution, variable: str = "W", penalized: str = "WP", conditional: bool = True,
                 initial=None) -> WelfareMean:
    """
    Expected lifetime utility from the second-order solution.

    :param variable: registered penalty-free welfare recursion
    :param penalized: registered recursion including the interest-rate penalty
    :param conditional: conditional on the initial state (default) or the unconditional mean
    :param initial: steady state (of another system, e.g. the Ramsey benchmark) supplying the initial state
    :raises SolutionException: for first-order or non-determinate solutions
    """
    if not isinstance(sol, SecondOrderSolution):
        raise SolutionException("Welfare needs a second-order solution")
    registry = sol.system.registry
    values = expected_levels(sol, registry.indices([penalized, variable]), conditional, initial)
    return WelfareMean(float(values[0]), float(values[1]), conditional)


def pr_zlb(sol: Solution, n_periods: int = ZLB_PERIODS, seed: int = 0, burn_in: int = 1000,
           variable: str = "R", chains: int = ZLB_CHAINS) -> float:
    """
    Share of simulated periods with a gross nominal rate below one.

    The periods are split over ``chains`` independent paths, each with its own burn-in.
    """
    first = _first(sol)
    registry = first.system.registry
    row = registry.index(variable)
    chains = max(1, min(int(chains), int(n_periods)))
    length = -(-int(n_periods) // chains)
    rng = np.random.default_rng(seed)
    shocks = rng.standard_normal((burn_in + length, first.system.n_shocks, chains))
    path = pruned_paths(sol, shocks, [row])[0][burn_in:, 0, :]
    level = first.steady.values[row]
    gross = level * np.exp(path) if registry[variable].transform == "log" else level + path
    share = float(np.mean(gross < 1.0))
    log_message("Pr(ZLB)=%.5f over %d periods in %d chains", log, share, length * chains, chains)
    return share
