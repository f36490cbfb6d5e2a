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
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConfigurationException, NumericalException
from ..model import ModelVariant, VariantKind, build_model, solve_steady_state
from ..model.parameters import ParameterSet, fully_fledged_calibration
from ..perturbation import FirstOrderSolution, linearize, solve_first_order
from ..rules import PolicyRuleSpec, estimated_rule
from ..utils import get_logger, log_message
from .kalman import StateSpace, kalman_loglik
from .measurement import MeasurementMap, build_state_space
from .priors import POSTERIOR_MEANS, PriorSpec, log_prior, select_priors

log = get_logger(__name__)

RULE_NAMES = ("rho_pi", "rho_y", "rho_dy", "rho_r", "tau")
SHOCK_PREFIXES = ("rho.", "sigma.", "ma.")


@dataclass(frozen=True)
class EstimationModel:
    """
    Maps a vector of estimated parameters onto the fully-fledged economy with its estimated rule.

    Names are structural parameter fields (``lambda_mob`` is converted to ``mu``), the rule's long-run responses
    ``rho_pi``, ``rho_y``, ``rho_dy`` with ``rho_r`` and ``tau``, and shock entries ``rho.X``, ``sigma.X``,
    ``ma.X``. Parameters outside ``names`` keep the values of ``base`` and ``base_rule``.
    """

    names: Tuple[str, ...]
    base: ParameterSet = field(default_factory=fully_fledged_calibration)
    base_rule: PolicyRuleSpec = field(default_factory=estimated_rule)
    measurement: MeasurementMap = field(default_factory=MeasurementMap)
    kind: VariantKind = VariantKind.FULLY_FLEDGED

    def __post_init__(self):
        fields = set(ParameterSet.__dataclass_fields__) | {"lambda_mob"}
        bad = [n for n in self.names
               if n not in fields and n not in RULE_NAMES and not n.startswith(SHOCK_PREFIXES)]
        if bad:
            raise ConfigurationException(f"Cannot estimate {', '.join(bad)}")

    def values(self, vector: Sequence[float]) -> Dict[str, float]:
        if len(vector) != len(self.names):
            raise ConfigurationException(f"Expected {len(self.names)} values, got {len(vector)}")
        return {name: float(v) for name, v in zip(self.names, vector)}

    def rule(self, values: Mapping[str, float]) -> PolicyRuleSpec:
        """Estimated rule at ``values``, long-run responses converted to rule coefficients."""
        base = self.base_rule
        scale = 1.0 - base.rho_r
        longrun = {
            "rho_pi": base.alpha_pi / scale if scale else 0.0,
            "rho_y": base.alpha_y / scale if scale else 0.0,
            "rho_dy": base.alpha_dy / scale if scale else 0.0,
            "rho_r": base.rho_r,
            "tau": base.tau,
        }
        longrun.update({k: v for k, v in values.items() if k in RULE_NAMES})
        return PolicyRuleSpec.from_taylor(longrun["rho_pi"], longrun["rho_y"], longrun["rho_dy"],
                                          longrun["rho_r"], longrun["tau"], family=base.family)

    def parameters(self, values: Mapping[str, float]) -> ParameterSet:
        """Calibration at ``values``."""
        structural = {k: v for k, v in values.items() if k not in RULE_NAMES and not k.startswith(SHOCK_PREFIXES)}
        shocks = {prefix[:-1]: {} for prefix in SHOCK_PREFIXES}
        for key, value in values.items():
            if key.startswith(SHOCK_PREFIXES):
                kind, shock = key.split(".", 1)
                shocks[kind][shock] = value
        return self.base.replace(**structural).with_shocks(**shocks).validate()

    def solve(self, vector: Sequence[float]) -> Tuple[ParameterSet, FirstOrderSolution]:
        """First-order solution of the economy at ``vector``."""
        values = self.values(vector)
        params = self.parameters(values)
        system = build_model(ModelVariant(self.kind, rule=self.rule(values)), params)
        steady = solve_steady_state(system)
        return params, solve_first_order(linearize(system, steady))

    def state_space(self, vector: Sequence[float]) -> StateSpace:
        """
        :raises SolutionException: when the solution at ``vector`` is not determinate
        """
        params, first = self.solve(vector)
        return build_state_space(params, first, self.measurement)

    def point(self, source: Mapping[str, float] = None) -> np.ndarray:
        """Vector of ``source`` values (the posterior means by default)."""
        source = source or POSTERIOR_MEANS
        return np.array([source[name] for name in self.names], dtype=float)


class LogPosterior:
    """
    Callable log posterior: prior log densities plus the Kalman log-likelihood.

    Out-of-support vectors and numerically broken candidates (non-determinate, failed steady state,
    singular innovation covariance) evaluate to ``-inf``.
    """

    def __init__(self, model: EstimationModel, data: Optional[np.ndarray], priors: Sequence[PriorSpec] = None):
        self.model = model
        self.priors = select_priors(model.names, priors)
        self.data = None if data is None else np.asarray(data, dtype=float)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.model.names

    def log_prior(self, vector) -> float:
        return log_prior(self.priors, vector)

    def log_likelihood(self, vector) -> float:
        if self.data is None or self.data.shape[0] == 0:
            return 0.0
        try:
            return kalman_loglik(self.model.state_space(vector), self.data)
        except (NumericalException, ConfigurationException) as exc:
            log_message("Likelihood failed at %s: %s", log, np.round(vector, 4).tolist(), exc, level=logging.DEBUG)
            return -math.inf

    def __call__(self, vector) -> float:
        prior = self.log_prior(vector)
        if not math.isfinite(prior):
            return -math.inf
        return prior + self.log_likelihood(vector)


def log_posterior(vector: Sequence[float], priors: Sequence[PriorSpec], data: Optional[np.ndarray],
                  model: EstimationModel) -> float:
    """Log posterior of ``vector``; ``-inf`` outside the prior support."""
    return LogPosterior(model, data, priors)(vector)
