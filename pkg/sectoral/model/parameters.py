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

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from ..exceptions import ConfigurationException

SHOCKS = ("B", "A", "AC", "AD", "I", "G", "C", "D", "wC", "wD", "R")
ARMA_SHOCKS = ("C", "D", "wC", "wD")


def _stylized_rho() -> Dict[str, float]:
    return {k: 0.9 for k in SHOCKS}


def _stylized_sigma() -> Dict[str, float]:
    return {k: 0.01 for k in SHOCKS}


@dataclass(frozen=True)
class ParameterSet:
    # pylint: disable=too-many-instance-attributes
    """
    Structural, policy-independent and shock parameters of every model variant.

    Labor mobility is stored as ``mu = 1/lambda`` so perfect mobility is exactly ``mu = 0``.
    ``nu``, ``chi_c`` and ``g_bar`` are derived at build time when left as ``None``: ``nu`` is calibrated
    to ``target_n``, ``chi_c`` is the steady-state hours share of sector C and ``g_bar = g_y * Y``.
    """

    beta: float = 0.99
    alpha: float = 0.5
    phi_frisch: float = 0.5
    nu: Optional[float] = None
    target_n: float = 0.33
    mu: float = 1.0
    chi_c: Optional[float] = None
    eps_c: float = 6.0
    eps_d: float = 6.0
    theta_c: float = 60.0
    theta_d: float = 60.0
    delta: float = 1.0
    zeta: float = 0.0
    rho_c: float = 0.0
    phi_iac: float = 0.0
    eta: float = 21.0
    theta_wc: float = 0.0
    theta_wd: float = 0.0
    g_y: float = 0.0
    g_bar: Optional[float] = None
    pi_c_bar: float = 1.0
    pi_d_bar: float = 1.0
    rho: Mapping[str, float] = field(default_factory=_stylized_rho)
    sigma: Mapping[str, float] = field(default_factory=_stylized_sigma)
    ma: Mapping[str, float] = field(default_factory=lambda: {k: 0.0 for k in ARMA_SHOCKS})
    gamma_trend: float = 0.2120
    pibar_c_obs: float = 1.0908
    pibar_d_obs: float = 0.5327
    rbar_obs: float = 1.6241

    @property
    def lambda_mob(self) -> float:
        """Intratemporal elasticity of hours across sectors; ``inf`` at perfect mobility."""
        return math.inf if self.mu == 0 else 1.0 / self.mu

    @property
    def r_bar(self) -> float:
        """Steady-state gross nominal rate."""
        return self.pi_c_bar / self.beta

    def rho_of(self, shock: str) -> float:
        """Persistence of ``shock``."""
        return float(self.rho.get(shock, 0.0))

    def sigma_of(self, shock: str) -> float:
        """Innovation standard deviation of ``shock``."""
        return float(self.sigma.get(shock, 0.0))

    def ma_of(self, shock: str) -> float:
        """MA(1) coefficient of an ARMA markup shock."""
        return float(self.ma.get(shock, 0.0))

    def replace(self, **changes) -> "ParameterSet":
        """
        Returns a copy with ``changes`` applied. ``lambda_mob`` is accepted and converted to ``mu``.

        :rtype: ParameterSet
        """
        if "lambda_mob" in changes:
            changes["mu"] = mobility_to_mu(changes.pop("lambda_mob"))
        return dataclasses.replace(self, **changes)

    def with_shocks(self, rho: Mapping[str, float] = None, sigma: Mapping[str, float] = None,
                    ma: Mapping[str, float] = None) -> "ParameterSet":
        """Returns a copy with shock-process entries updated."""
        return dataclasses.replace(
            self,
            rho={**self.rho, **(rho or {})},
            sigma={**self.sigma, **(sigma or {})},
            ma={**self.ma, **(ma or {})},
        )

    def scale_sigma(self, factor: float) -> "ParameterSet":
        """Returns a copy with every innovation standard deviation multiplied by ``factor``."""
        return dataclasses.replace(self, sigma={k: v * factor for k, v in self.sigma.items()})

    def validate(self) -> "ParameterSet":
        """
        Checks the parameter invariants.

        :raises ConfigurationException: on the first violated invariant
        :return: self
        """
        checks = [
            (0.0 < self.beta < 1.0, "beta must lie in (0, 1)"),
            (0.0 < self.delta <= 1.0, "delta must lie in (0, 1]"),
            (0.0 < self.alpha < 1.0, "alpha must lie in (0, 1)"),
            (self.mu >= 0.0, "mu must be non-negative"),
            (self.phi_frisch >= 0.0, "phi_frisch must be non-negative"),
            (self.eps_c > 1.0 and self.eps_d > 1.0, "goods elasticities must exceed 1"),
            (self.eta > 1.0, "eta must exceed 1"),
            (min(self.theta_c, self.theta_d, self.theta_wc, self.theta_wd) >= 0.0,
             "adjustment-cost parameters must be non-negative"),
            (0.0 <= self.zeta < 1.0 and 0.0 <= self.rho_c < 1.0, "habit parameters must lie in [0, 1)"),
            (self.phi_iac >= 0.0, "phi_iac must be non-negative"),
            (0.0 <= self.g_y < 1.0, "g_y must lie in [0, 1)"),
            (0.0 < self.target_n < 1.0, "target_n must lie in (0, 1)"),
            (self.nu is None or self.nu > 0.0, "nu must be positive"),
            (self.chi_c is None or 0.0 < self.chi_c < 1.0, "chi_c must lie in (0, 1)"),
            (all(v >= 0.0 for v in self.sigma.values()), "shock standard deviations must be non-negative"),
            (all(abs(v) < 1.0 for v in self.rho.values()), "shock persistence must satisfy |rho| < 1"),
            (all(abs(v) < 1.0 for v in self.ma.values()), "MA coefficients must satisfy |theta| < 1"),
            (set(self.rho) <= set(SHOCKS) and set(self.sigma) <= set(SHOCKS), "unknown shock name"),
        ]
        for passed, message in checks:
            if not passed:
                raise ConfigurationException(message)
        return self


def mobility_to_mu(lambda_mob) -> float:
    """
    Converts a labor-mobility elasticity (``inf`` or the string ``"inf"`` for perfect mobility) into ``mu``.

    :raises ConfigurationException: for non-positive elasticities
    """
    if isinstance(lambda_mob, str):
        lambda_mob = math.inf if lambda_mob.strip().lower() in ("inf", "infinity", "∞") else float(lambda_mob)
    if lambda_mob is None or math.isinf(lambda_mob):
        return 0.0
    if lambda_mob <= 0:
        raise ConfigurationException(f"labor mobility must be positive, got {lambda_mob}")
    return 1.0 / float(lambda_mob)


def stylized_calibration(**overrides) -> ParameterSet:
    """
    Symmetric stylized calibration: beta 0.99, alpha 0.5, inverse Frisch 0.5, hours 0.33, eps 6, theta 60,
    nondurables (delta = 1), lambda = 1 and all shocks AR(1) with persistence 0.9 and std 0.01.
    """
    return ParameterSet().replace(**overrides).validate()


FULLY_FLEDGED_RHO = {
    "A": 0.9713, "R": 0.1273, "I": 0.2787, "B": 0.7133, "C": 0.9859,
    "D": 0.9762, "wC": 0.9962, "wD": 0.9746, "G": 0.9201, "AC": 0.0, "AD": 0.0,
}
FULLY_FLEDGED_SIGMA = {
    "A": 0.0047, "R": 0.0031, "I": 0.0597, "B": 0.0124, "C": 0.0141,
    "D": 0.0455, "wC": 0.0165, "wD": 0.0444, "G": 0.0347, "AC": 0.0, "AD": 0.0,
}
FULLY_FLEDGED_MA = {"C": 0.3046, "D": 0.1840, "wC": 0.2170, "wD": 0.1909}


def fully_fledged_calibration(**overrides) -> ParameterSet:
    """
    Calibrated and estimated values of the fully-fledged model (posterior means).
    """
    base = ParameterSet(
        beta=0.99,
        alpha=0.2,
        phi_frisch=0.2320,
        target_n=0.33,
        mu=1.0 / 1.2250,
        eps_c=6.0,
        eps_d=6.0,
        theta_c=20.424,
        theta_d=29.194,
        delta=0.01,
        zeta=0.6919,
        rho_c=0.4384,
        phi_iac=2.3028,
        eta=21.0,
        theta_wc=122.04,
        theta_wd=132.45,
        g_y=0.2,
        rho=dict(FULLY_FLEDGED_RHO),
        sigma=dict(FULLY_FLEDGED_SIGMA),
        ma=dict(FULLY_FLEDGED_MA),
    )
    return base.replace(**overrides).validate()
