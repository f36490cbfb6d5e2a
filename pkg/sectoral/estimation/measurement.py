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
from typing import Mapping, Optional, Tuple

import numpy as np

from ..exceptions import ConfigurationException, SolutionException
from ..model.parameters import ParameterSet
from ..perturbation import FirstOrderSolution
from .kalman import StateSpace, stationary_covariance

PERCENT = 100.0
OBSERVABLES = ("dY", "dI_D", "dC", "dW_C", "dW_D", "N_C", "N_D", "Pi_C", "Pi_D", "R")
MODEL_VARIABLES = {
    "dY": "Y", "dI_D": "I_D", "dC": "C", "dW_C": "wC", "dW_D": "wD",
    "N_C": "NC", "N_D": "ND", "Pi_C": "PiC", "Pi_D": "PiD", "R": "R",
}
GROWTH = frozenset({"dY", "dI_D", "dC", "dW_C", "dW_D"})
CONSTANTS = {"Pi_C": "pibar_c_obs", "Pi_D": "pibar_d_obs", "R": "rbar_obs"}
MEASUREMENT_ERROR = 0.01


@dataclass(frozen=True)
class MeasurementMap:
    """
    Links observables (percent, quarterly) to model variables: growth rates are the common trend plus first
    differences, hours carry no constant, inflation and the policy rate add their sample means.

    ``measurement_error`` is the standard deviation (percentage points) of independent observation noise, which
    keeps the innovation covariance of ten observables driven by nine shocks positive definite.
    """

    observables: Tuple[str, ...] = OBSERVABLES
    variables: Mapping[str, str] = field(default_factory=lambda: dict(MODEL_VARIABLES))
    growth: frozenset = GROWTH
    measurement_error: float = MEASUREMENT_ERROR

    def __post_init__(self):
        unknown = [name for name in self.observables if name not in self.variables]
        if unknown:
            raise ConfigurationException(f"No model variable for observables {', '.join(unknown)}")
        if self.measurement_error < 0.0:
            raise ConfigurationException("Measurement error must be non-negative")

    def constants(self, params: ParameterSet) -> np.ndarray:
        """Observation constants: the trend on growth rows, zero on hours, sample means on rates."""
        out = []
        for name in self.observables:
            if name in self.growth:
                out.append(params.gamma_trend)
            elif name in CONSTANTS:
                out.append(getattr(params, CONSTANTS[name]))
            else:
                out.append(0.0)
        return np.array(out, dtype=float)

    def reordered(self, observables) -> "MeasurementMap":
        return MeasurementMap(tuple(observables), self.variables, self.growth, self.measurement_error)


def build_state_space(params: ParameterSet, fo: FirstOrderSolution,
                      mm: Optional[MeasurementMap] = None) -> StateSpace:
    """
    Stacks the predetermined states with the current and lagged values of the measured variables,
    ``z_t = [k_{t+1}, x_t, x_{t-1}]``, so growth rows read ``x_t - x_{t-1}``.

    :raises SolutionException: for a non-determinate first-order solution
    """
    mm = mm or MeasurementMap()
    if not fo.is_determinate:
        raise SolutionException(f"Cannot build a state space from a {fo.verdict.value} solution")
    names = tuple(dict.fromkeys(mm.variables[o] for o in mm.observables))
    rows = [fo.index(name) for name in names]
    n_k, n_m, n_u = fo.state_index.size, len(names), fo.g_u.shape[1]
    g_k, g_u = fo.g_x[rows], fo.g_u[rows]

    n = n_k + 2 * n_m
    trans = np.zeros((n, n))
    trans[:n_k, :n_k] = fo.h_x
    trans[n_k:n_k + n_m, :n_k] = g_k
    trans[n_k + n_m:, n_k:n_k + n_m] = np.eye(n_m)
    load = np.zeros((n, n_u))
    load[:n_k] = fo.h_u
    load[n_k:n_k + n_m] = g_u

    obs = np.zeros((len(mm.observables), n))
    for i, name in enumerate(mm.observables):
        pos = names.index(mm.variables[name])
        obs[i, n_k + pos] = PERCENT
        if name in mm.growth:
            obs[i, n_k + n_m + pos] = -PERCENT
    noise = mm.measurement_error ** 2 * np.eye(len(mm.observables))
    return StateSpace(trans, load, obs, mm.constants(params), noise, stationary_covariance(trans, load),
                      tuple(mm.observables))
