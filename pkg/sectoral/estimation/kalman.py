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

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_discrete_lyapunov

from ..exceptions import SolutionException

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class StateSpace:
    """
    Linear Gaussian state space

    ``z_t = T z_{t-1} + R u_t``, ``u_t ~ N(0, I)`` and ``y_t = c + Z z_t + e_t``, ``e_t ~ N(0, H)``.

    ``P0`` is the covariance of the initial state (the mean is zero).
    """

    T: np.ndarray
    R: np.ndarray
    Z: np.ndarray
    c: np.ndarray
    H: np.ndarray
    P0: np.ndarray
    observables: Tuple[str, ...] = ()

    @property
    def n_states(self) -> int:
        return self.T.shape[0]

    @property
    def n_observables(self) -> int:
        return self.Z.shape[0]

    def reorder(self, observables) -> "StateSpace":
        """Same model with the observation rows permuted to ``observables``."""
        pos = [self.observables.index(name) for name in observables]
        return StateSpace(self.T, self.R, self.Z[pos], self.c[pos], self.H[np.ix_(pos, pos)], self.P0,
                          tuple(observables))


def stationary_covariance(T: np.ndarray, R: np.ndarray) -> np.ndarray:
    """
    Unconditional state covariance from the discrete Lyapunov equation.

    :raises SolutionException: when ``T`` has an eigenvalue on or outside the unit circle
    """
    if T.size and np.max(np.abs(np.linalg.eigvals(T))) >= 1.0 - 1e-10:
        raise SolutionException("The state transition is not stationary")
    cov = solve_discrete_lyapunov(T, R @ R.T)
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class FilterResult:
    """
    Predicted and filtered moments of every period and the log-likelihood.
    """

    loglik: float
    predicted_mean: np.ndarray
    predicted_cov: np.ndarray
    filtered_mean: np.ndarray
    filtered_cov: np.ndarray


def kalman_filter(ss: StateSpace, data: np.ndarray, keep: bool = True) -> FilterResult:
    """
    Runs the Kalman filter over the rows of ``data`` (``T x n_observables``).

    The log-likelihood is ``-inf`` as soon as an innovation covariance is not positive definite.

    :param keep: store the per-period moments (needed by the smoother)
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.size == 0:
        data = data.reshape(0, ss.n_observables)
    steps = data.shape[0]
    n = ss.n_states
    rqr = ss.R @ ss.R.T
    mean, cov = np.zeros(n), ss.P0.copy()
    shape = (steps,) if keep else (0,)
    pred_m, pred_p = np.empty(shape + (n,)), np.empty(shape + (n, n))
    filt_m, filt_p = np.empty(shape + (n,)), np.empty(shape + (n, n))
    loglik = 0.0
    for t in range(steps):
        if t > 0:
            mean = ss.T @ mean
            cov = ss.T @ cov @ ss.T.T + rqr
        if keep:
            pred_m[t], pred_p[t] = mean, cov
        innovation = data[t] - ss.c - ss.Z @ mean
        zp = ss.Z @ cov
        f_cov = zp @ ss.Z.T + ss.H
        f_cov = 0.5 * (f_cov + f_cov.T)
        try:
            factor = cho_factor(f_cov, lower=True, check_finite=True)
        except (LinAlgError, ValueError):
            loglik = -math.inf
            break
        log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
        solved = cho_solve(factor, innovation)
        loglik -= 0.5 * (innovation.size * LOG_2PI + log_det + innovation @ solved)
        gain = cho_solve(factor, zp).T
        mean = mean + gain @ innovation
        cov = cov - gain @ zp
        cov = 0.5 * (cov + cov.T)
        if keep:
            filt_m[t], filt_p[t] = mean, cov
    return FilterResult(float(loglik), pred_m, pred_p, filt_m, filt_p)


def kalman_loglik(ss: StateSpace, data: np.ndarray) -> float:
    """Exact Gaussian log-likelihood of ``data``; ``0`` for an empty sample."""
    return kalman_filter(ss, data, keep=False).loglik


def kalman_smoother(ss: StateSpace, data: np.ndarray, result: Optional[FilterResult] = None):
    """
    Rauch-Tung-Striebel smoother.

    The first predicted moments are the initial state itself, so the transition is applied only between periods.
    Predicted covariances are pseudo-inverted, which covers states without innovation variance.

    :return: smoothed means ``(T, n)`` and covariances ``(T, n, n)``
    """
    result = result or kalman_filter(ss, data)
    if not math.isfinite(result.loglik):
        raise SolutionException("Cannot smooth: the filter hit a singular innovation covariance")
    mean, cov = result.filtered_mean.copy(), result.filtered_cov.copy()
    for t in range(mean.shape[0] - 2, -1, -1):
        pred_next = result.predicted_cov[t + 1]
        gain = result.filtered_cov[t] @ ss.T.T @ np.linalg.pinv(pred_next, hermitian=True)
        mean[t] = result.filtered_mean[t] + gain @ (mean[t + 1] - result.predicted_mean[t + 1])
        cov[t] = result.filtered_cov[t] + gain @ (cov[t + 1] - pred_next) @ gain.T
    return mean, cov
