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
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import gammaln

from ..exceptions import ConfigurationException

KINDS = ("beta", "gamma", "inv_gamma", "normal")


@dataclass(frozen=True)
class PriorSpec:
    """
    Prior of one estimated parameter given by its mean and standard deviation (degrees of freedom for the
    inverse gamma).

    The inverse gamma is the distribution of a standard deviation ``s`` with ``s**2`` inverse-gamma with shape
    ``dof/2``; its scale is set so that ``E[s]`` equals the mean.
    """

    name: str
    kind: str
    mean: float
    std: float
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationException(f"Unknown prior kind {self.kind} for {self.name}")
        if self.std <= 0.0:
            raise ConfigurationException(f"Prior of {self.name} needs a positive std or dof")
        if self.kind == "beta" and not 0.0 < self.mean < 1.0:
            raise ConfigurationException(f"Beta prior of {self.name} needs a mean in (0, 1)")
        if self.kind in ("gamma", "inv_gamma") and self.mean <= 0.0:
            raise ConfigurationException(f"Prior of {self.name} needs a positive mean")
        if self.kind == "beta" and self.std ** 2 >= self.mean * (1.0 - self.mean):
            raise ConfigurationException(f"Beta prior of {self.name} is too dispersed")

    @property
    def support(self) -> Tuple[float, float]:
        """Open support interval, intersected with the user bounds."""
        natural = {
            "beta": (0.0, 1.0),
            "gamma": (0.0, math.inf),
            "inv_gamma": (0.0, math.inf),
            "normal": (-math.inf, math.inf),
        }[self.kind]
        return max(natural[0], self.lower), min(natural[1], self.upper)

    def _beta_shapes(self):
        common = self.mean * (1.0 - self.mean) / self.std ** 2 - 1.0
        return self.mean * common, (1.0 - self.mean) * common

    def _inv_gamma_scale(self):
        dof = self.std
        return (self.mean * math.exp(gammaln(dof / 2.0) - gammaln((dof - 1.0) / 2.0))) ** 2

    def distribution(self):
        """Frozen scipy distribution of the parameter (of its square for the inverse gamma)."""
        if self.kind == "beta":
            return stats.beta(*self._beta_shapes())
        if self.kind == "gamma":
            return stats.gamma(self.mean ** 2 / self.std ** 2, scale=self.std ** 2 / self.mean)
        if self.kind == "inv_gamma":
            return stats.invgamma(self.std / 2.0, scale=self._inv_gamma_scale())
        return stats.norm(self.mean, self.std)

    def logpdf(self, value: float) -> float:
        """Log density, ``-inf`` outside the open support."""
        low, high = self.support
        if not low < value < high:
            return -math.inf
        if self.kind == "inv_gamma":
            return float(self.distribution().logpdf(value ** 2) + math.log(2.0 * value))
        return float(self.distribution().logpdf(value))

    def sample(self, rng: np.random.Generator, size=None):
        draws = self.distribution().rvs(size=size, random_state=rng)
        return np.sqrt(draws) if self.kind == "inv_gamma" else draws

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "kind": self.kind, "mean": self.mean, "std": self.std,
                "lower": self.lower, "upper": self.upper}


def _beta(name, mean, std):
    return PriorSpec(name, "beta", mean, std)


def _gamma(name, mean, std):
    return PriorSpec(name, "gamma", mean, std)


def _normal(name, mean, std, lower=-math.inf):
    return PriorSpec(name, "normal", mean, std, lower=lower)


def _shock_priors(shock: str, arma: bool = False):
    out = [_beta(f"rho.{shock}", 0.5, 0.2)]
    if arma:
        out.append(_beta(f"ma.{shock}", 0.5, 0.2))
    out.append(PriorSpec(f"sigma.{shock}", "inv_gamma", 0.10, 2.0))
    return out


def default_priors() -> Tuple[PriorSpec, ...]:
    """
    Priors of the fully-fledged model: structural and rule parameters, measurement constants and shock processes.
    Labor mobility, the inverse Frisch elasticity and the adjustment cost are truncated at zero.
    """
    priors = [
        _normal("lambda_mob", 1.0, 0.1, lower=0.0),
        _normal("phi_frisch", 0.5, 0.1, lower=0.0),
        _beta("zeta", 0.7, 0.1),
        _beta("rho_c", 0.7, 0.1),
        _gamma("theta_c", 15.0, 5.0),
        _gamma("theta_d", 15.0, 5.0),
        _gamma("theta_wc", 100.0, 10.0),
        _gamma("theta_wd", 100.0, 10.0),
        _normal("phi_iac", 1.5, 0.5, lower=0.0),
        _beta("tau", 0.2, 0.1),
        _normal("rho_pi", 1.5, 0.2),
        _gamma("rho_y", 0.1, 0.05),
        _gamma("rho_dy", 0.1, 0.05),
        _beta("rho_r", 0.8, 0.1),
        _normal("gamma_trend", 0.49, 0.1),
        _gamma("pibar_c_obs", 1.05, 0.1),
        _gamma("pibar_d_obs", 0.55, 0.1),
        _gamma("rbar_obs", 1.65, 0.1),
    ]
    for shock in ("A", "R", "I", "B"):
        priors += _shock_priors(shock)
    for shock in ("C", "D", "wC", "wD"):
        priors += _shock_priors(shock, arma=True)
    priors += _shock_priors("G")
    return tuple(priors)


POSTERIOR_MEANS: Mapping[str, float] = {
    "lambda_mob": 1.2250, "phi_frisch": 0.2320, "zeta": 0.6919, "rho_c": 0.4384, "theta_c": 20.424,
    "theta_d": 29.194, "theta_wc": 122.04, "theta_wd": 132.45, "phi_iac": 2.3028, "tau": 0.2264,
    "rho_pi": 1.4761, "rho_y": 0.0225, "rho_dy": 0.3525, "rho_r": 0.6334, "gamma_trend": 0.2120,
    "pibar_c_obs": 1.0908, "pibar_d_obs": 0.5327, "rbar_obs": 1.6241,
    "rho.A": 0.9713, "sigma.A": 0.0047, "rho.R": 0.1273, "sigma.R": 0.0031, "rho.I": 0.2787, "sigma.I": 0.0597,
    "rho.B": 0.7133, "sigma.B": 0.0124, "rho.C": 0.9859, "ma.C": 0.3046, "sigma.C": 0.0141,
    "rho.D": 0.9762, "ma.D": 0.1840, "sigma.D": 0.0455, "rho.wC": 0.9962, "ma.wC": 0.2170, "sigma.wC": 0.0165,
    "rho.wD": 0.9746, "ma.wD": 0.1909, "sigma.wD": 0.0444, "rho.G": 0.9201, "sigma.G": 0.0347,
}


def select_priors(names: Iterable[str], priors: Sequence[PriorSpec] = None) -> Tuple[PriorSpec, ...]:
    """
    Priors of ``names`` in the given order.

    :raises ConfigurationException: for a name without a prior
    """
    by_name = {p.name: p for p in (priors or default_priors())}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise ConfigurationException(f"No prior for {', '.join(missing)}")
    return tuple(by_name[n] for n in names)


def log_prior(priors: Sequence[PriorSpec], values: Sequence[float]) -> float:
    """Sum of prior log densities; ``-inf`` as soon as one value leaves its support."""
    total = 0.0
    for prior, value in zip(priors, values):
        term = prior.logpdf(float(value))
        if not math.isfinite(term):
            return -math.inf
        total += term
    return total
