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

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

from ..exceptions import ConfigurationException
from ..rules import PolicyRuleSpec
from .parameters import ParameterSet


class VariantKind(str, Enum):
    """
    The three model economies.
    """

    STYLIZED_NONDURABLE = "stylized-nondurable"
    STYLIZED_DURABLE = "stylized-durable"
    FULLY_FLEDGED = "fully-fledged"

    @classmethod
    def parse(cls, value) -> "VariantKind":
        """Accepts members, values or names."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if key in (member.value, member.name.lower().replace("_", "-")):
                return member
        raise ConfigurationException(f"Unknown model variant {value}")

    @property
    def shocks(self) -> Tuple[str, ...]:
        """Exogenous processes of the economy, the monetary-policy shock excluded."""
        if self == VariantKind.FULLY_FLEDGED:
            return ("B", "A", "I", "G", "C", "D", "wC", "wD")
        return ("B", "A", "AC", "AD")

    @property
    def markup_shocks(self) -> Tuple[str, ...]:
        """Shocks muted in the flexible-price counterpart."""
        if self == VariantKind.FULLY_FLEDGED:
            return ("C", "D", "wC", "wD")
        return ()

    @property
    def durable(self) -> bool:
        """Whether sector D produces a durable stock."""
        return self != VariantKind.STYLIZED_NONDURABLE


@dataclass(frozen=True)
class VariantFlags:
    """
    Friction switches and excluded shocks.
    """

    flexible_prices_d: bool = False
    flexible_wages_d: bool = False
    drop_habit: bool = False
    drop_iac: bool = False
    excluded_shocks: FrozenSet[str] = field(default_factory=frozenset)

    @classmethod
    def of(cls, excluded_shocks: Iterable[str] = (), **switches) -> "VariantFlags":
        """Builds flags from keyword switches and an iterable of excluded shocks."""
        return cls(excluded_shocks=frozenset(excluded_shocks or ()), **switches)


@dataclass(frozen=True)
class ModelVariant:
    """
    Economy, friction flags, optional policy rule and the weight of the interest-rate penalty in the welfare objective.
    """

    kind: VariantKind = VariantKind.STYLIZED_NONDURABLE
    flags: VariantFlags = field(default_factory=VariantFlags)
    rule: Optional[PolicyRuleSpec] = None
    zlb_weight: float = 0.0

    def with_rule(self, rule: Optional[PolicyRuleSpec]) -> "ModelVariant":
        """Copy with another (or no) rule attached."""
        return replace(self, rule=rule)

    def with_zlb_weight(self, zlb_weight: float) -> "ModelVariant":
        """Copy with another penalty weight."""
        return replace(self, zlb_weight=float(zlb_weight))

    @property
    def shocks(self) -> Tuple[str, ...]:
        """Innovation names in system order."""
        return self.kind.shocks + (("R",) if self.rule is not None else ())

    def validate(self, params: ParameterSet) -> "ModelVariant":
        """
        Checks that every flag belongs to a friction the economy owns.

        :raises ConfigurationException: for a flag the variant does not own, an unknown excluded shock or
            ``mu < 0``
        """
        fully_fledged = self.kind == VariantKind.FULLY_FLEDGED
        for flag in ("flexible_wages_d", "drop_habit", "drop_iac"):
            if getattr(self.flags, flag) and not fully_fledged:
                raise ConfigurationException(f"Flag {flag} requires the fully-fledged variant")
        unknown = set(self.flags.excluded_shocks) - set(self.shocks) - {"R"}
        if unknown:
            raise ConfigurationException(
                f"Cannot exclude shocks {sorted(unknown)} from the {self.kind.value} variant"
            )
        if params.mu < 0:
            raise ConfigurationException("mu must be non-negative")
        if self.zlb_weight < 0:
            raise ConfigurationException("The ZLB penalty weight must be non-negative")
        if self.rule is not None:
            self.rule.validate(params.mu)
        return self

    def effective_params(self, params: ParameterSet) -> ParameterSet:
        """
        Applies the friction switches and shock exclusions to ``params``.
        """
        changes = {}
        if self.flags.flexible_prices_d:
            changes["theta_d"] = 0.0
        if self.flags.flexible_wages_d:
            changes["theta_wd"] = 0.0
        if self.flags.drop_habit:
            changes.update(zeta=0.0, rho_c=0.0)
        if self.flags.drop_iac:
            changes["phi_iac"] = 0.0
        if self.kind != VariantKind.FULLY_FLEDGED:
            changes.update(zeta=0.0, rho_c=0.0, phi_iac=0.0, theta_wc=0.0, theta_wd=0.0, g_y=0.0)
        if self.kind == VariantKind.STYLIZED_NONDURABLE:
            changes["delta"] = 1.0
        out = params.replace(**changes)
        if self.flags.excluded_shocks:
            out = out.with_shocks(sigma={k: 0.0 for k in self.flags.excluded_shocks})
        return out
