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

from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from .exceptions import ConfigurationException


class RuleFamily(str, Enum):
    """
    Interest-rate rule families.
    """

    SMETS_WOUTERS = "smets-wouters"
    IMPLEMENTABLE = "implementable"
    WAGE_INFLATION = "wage-inflation"
    REAL_WAGE_GROWTH = "real-wage-growth"
    WAGE_GROWTH_DIFFERENTIAL = "wage-growth-differential"

    @classmethod
    def parse(cls, value) -> "RuleFamily":
        """Accepts enum members, values and member names (any case, ``_`` or ``-``)."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if key in (member.value, member.name.lower().replace("_", "-")):
                return member
        raise ConfigurationException(f"Unknown rule family {value}")


BOUNDS: Dict[str, Tuple[float, float]] = {
    "rho_r": (0.0, 1.0),
    "alpha_pi": (0.0, 5.0),
    "alpha_y": (0.0, 5.0),
    "alpha_dy": (0.0, 5.0),
    "alpha_w": (0.0, 5.0),
    "tau": (0.0, 1.0),
}

ACTIVE: Dict[RuleFamily, Tuple[str, ...]] = {
    RuleFamily.SMETS_WOUTERS: ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "tau"),
    RuleFamily.IMPLEMENTABLE: ("rho_r", "alpha_pi", "alpha_y", "tau"),
    RuleFamily.WAGE_INFLATION: ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "alpha_w", "tau"),
    RuleFamily.REAL_WAGE_GROWTH: ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "alpha_w", "tau"),
    RuleFamily.WAGE_GROWTH_DIFFERENTIAL: ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "alpha_w", "tau"),
}


@dataclass(frozen=True)
class PolicyRuleSpec:
    """
    A simple interest-rate rule in log deviations,

    ``log(R/R̄) = rho_r log(R₋₁/R̄) + alpha_pi log(Π̃/Π̃̄) + alpha_y gap + alpha_dy Δgap + alpha_w wage term + log e^R``

    where ``Π̃ = (Π^C)^(1-tau) (Π^D)^tau``. The output gap is measured against the flexible-price economy except
    for the implementable family, which uses the deviation of output from steady state.
    """

    family: RuleFamily = RuleFamily.SMETS_WOUTERS
    rho_r: float = 0.8
    alpha_pi: float = 1.5
    alpha_y: float = 0.125
    alpha_dy: float = 0.0
    alpha_w: float = 0.0
    tau: float = 0.5

    @property
    def active(self) -> Tuple[str, ...]:
        """Names of the coefficients the family uses, in search order."""
        return ACTIVE[self.family]

    @property
    def uses_flexible_output(self) -> bool:
        """Whether the rule needs the flexible-price output ``Y_f``."""
        return self.family != RuleFamily.IMPLEMENTABLE

    @property
    def uses_wage_index(self) -> bool:
        """Whether the rule needs the aggregate real wage index."""
        return self.family in (RuleFamily.WAGE_INFLATION, RuleFamily.REAL_WAGE_GROWTH)

    @property
    def gamma_pi(self) -> float:
        """Long-run inflation response ``alpha_pi / (1 - rho_r)``; ``inf`` for price-level rules."""
        if self.rho_r >= 1.0:
            return np.inf
        return self.alpha_pi / (1.0 - self.rho_r)

    def vector(self, names: Sequence[str] = None) -> np.ndarray:
        """Coefficients listed in ``names`` (the active set by default)."""
        return np.array([getattr(self, name) for name in (names or self.active)], dtype=float)

    def with_vector(self, values: Sequence[float], names: Sequence[str] = None) -> "PolicyRuleSpec":
        """Copy with ``names`` (the active set by default) set to ``values``."""
        names = tuple(names or self.active)
        if len(values) != len(names):
            raise ConfigurationException(f"Expected {len(names)} rule coefficients, got {len(values)}")
        return replace(self, **{name: float(val) for name, val in zip(names, values)})

    def bounds(self, names: Sequence[str] = None) -> np.ndarray:
        """Box bounds as an ``(k, 2)`` array for ``names`` (the active set by default)."""
        return np.array([BOUNDS[name] for name in (names or self.active)], dtype=float)

    def clip(self) -> "PolicyRuleSpec":
        """Projects every coefficient onto its box."""
        return replace(self, **{name: float(np.clip(getattr(self, name), *BOUNDS[name])) for name in BOUNDS})

    def validate(self, mu: float = None) -> "PolicyRuleSpec":
        """
        Checks the coefficient bounds and the family's domain.

        :param mu: inverse labor mobility of the economy the rule is attached to
        :raises ConfigurationException: when a coefficient is out of bounds or the wage-growth-differential rule
            is attached to an economy with perfect labor mobility
        """
        for name, (low, high) in BOUNDS.items():
            value = getattr(self, name)
            if not low - 1e-12 <= value <= high + 1e-12:
                raise ConfigurationException(f"Rule coefficient {name}={value} outside [{low}, {high}]")
        if self.family == RuleFamily.WAGE_GROWTH_DIFFERENTIAL and mu is not None and mu == 0.0:
            raise ConfigurationException(
                "The wage-growth-differential rule is not defined under perfect labor mobility"
            )
        return self

    def to_dict(self) -> dict:
        """Plain-dict view with the family as its string value."""
        doc = asdict(self)
        doc["family"] = self.family.value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "PolicyRuleSpec":
        """Inverse of :meth:`to_dict`; unknown keys are rejected."""
        allowed = set(BOUNDS) | {"family"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigurationException(f"Unknown rule keys: {', '.join(sorted(unknown))}")
        values = dict(doc)
        values["family"] = RuleFamily.parse(values.get("family", RuleFamily.SMETS_WOUTERS))
        return cls(**values)

    @classmethod
    def from_taylor(cls, rho_pi: float, rho_y: float, rho_dy: float, rho_r: float, tau: float,
                    family: RuleFamily = RuleFamily.SMETS_WOUTERS) -> "PolicyRuleSpec":
        """
        Builds a rule from long-run responses, ``alpha_x = (1 - rho_r) * rho_x``.
        """
        scale = 1.0 - rho_r
        return cls(family=family, rho_r=rho_r, alpha_pi=scale * rho_pi, alpha_y=scale * rho_y,
                   alpha_dy=scale * rho_dy, tau=tau)


def estimated_rule() -> PolicyRuleSpec:
    """Rule at the posterior means of the fully-fledged model."""
    return PolicyRuleSpec.from_taylor(rho_pi=1.4761, rho_y=0.0225, rho_dy=0.3525, rho_r=0.6334, tau=0.2264)
