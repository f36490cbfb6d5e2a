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
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from ..exceptions import ConfigurationException, PresetNotFound
from ..model.parameters import ParameterSet, fully_fledged_calibration, mobility_to_mu, stylized_calibration
from ..model.variant import ModelVariant, VariantFlags, VariantKind
from ..properties import PropertyManager
from ..rules import PolicyRuleSpec, RuleFamily, estimated_rule

PRESETS_FILE = Path(__file__).with_name("presets.json")
MODES = ("optimize", "tau-only", "fix-tau")
PRESET_KEYS = frozenset({
    "name", "table", "panel", "kind", "calibration", "params", "flags", "family", "mode", "lambdas",
    "reference", "fixed", "base_rule", "benchmark_wr",
})
CALIBRATIONS = {"stylized": stylized_calibration, "fully-fledged": fully_fledged_calibration}


def parse_lambda(value) -> float:
    """Labor mobility from a number or ``inf``."""
    return math.inf if mobility_to_mu(value) == 0.0 else float(value)


def lambda_label(value: float) -> str:
    """Printable labor mobility: ``inf`` or the number."""
    return "inf" if math.isinf(value) else f"{value:g}"


@dataclass(frozen=True)
class ExperimentPreset:
    # pylint: disable=too-many-instance-attributes
    """
    One panel of a policy table: the economy, its frictions and calibration overrides, the rule family, the labor
    mobility grid and the reference rows the panel reports.

    ``benchmark_wr`` is the penalty weight of the planner benchmark every rule of the panel is compared with,
    whatever weight the rule economies carry.
    """

    name: str
    table: str
    panel: str
    kind: VariantKind
    calibration: str
    params: Mapping[str, float] = field(default_factory=dict)
    flags: VariantFlags = field(default_factory=VariantFlags)
    family: RuleFamily = RuleFamily.SMETS_WOUTERS
    mode: str = "optimize"
    lambdas: Tuple[float, ...] = ()
    reference: Tuple[Mapping[str, float], ...] = ()
    fixed: Mapping[str, float] = field(default_factory=dict)
    base_rule: Optional[str] = None
    benchmark_wr: float = 0.0

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExperimentPreset":
        """
        :raises ConfigurationException: for unknown keys, modes, calibrations or parameter names
        """
        unknown = set(doc) - PRESET_KEYS
        if unknown:
            raise ConfigurationException(f"Unknown preset keys: {', '.join(sorted(unknown))}")
        mode = doc.get("mode", "optimize")
        if mode not in MODES:
            raise ConfigurationException(f"Unknown preset mode {mode}")
        calibration = doc.get("calibration", "stylized")
        if calibration not in CALIBRATIONS:
            raise ConfigurationException(f"Unknown calibration {calibration}")
        benchmark_wr = float(doc.get("benchmark_wr", 0.0))
        if benchmark_wr < 0.0:
            raise ConfigurationException(f"Negative benchmark penalty weight in preset {doc.get('name')}")
        params = dict(doc.get("params") or {})
        bad = set(params) - set(ParameterSet.__dataclass_fields__)
        if bad:
            raise ConfigurationException(f"Unknown parameters in preset {doc.get('name')}: {sorted(bad)}")
        return cls(
            name=doc["name"],
            table=str(doc.get("table", "")),
            panel=doc.get("panel", ""),
            kind=VariantKind.parse(doc["kind"]),
            calibration=calibration,
            params=params,
            flags=VariantFlags.of(**(doc.get("flags") or {})),
            family=RuleFamily.parse(doc.get("family", RuleFamily.SMETS_WOUTERS)),
            mode=mode,
            lambdas=tuple(parse_lambda(v) for v in doc.get("lambdas") or ()),
            reference=tuple(dict(row) for row in doc.get("reference") or ()),
            fixed=dict(doc.get("fixed") or {}),
            base_rule=doc.get("base_rule"),
            benchmark_wr=benchmark_wr,
        )

    def parameters(self, lambda_mob=None) -> ParameterSet:
        """Calibration of the panel, at labor mobility ``lambda_mob`` when given."""
        overrides = dict(self.params)
        if lambda_mob is not None:
            overrides["mu"] = mobility_to_mu(lambda_mob)
        return CALIBRATIONS[self.calibration](**overrides)

    def variant(self, rule: Optional[PolicyRuleSpec] = None, zlb_weight: float = 0.0) -> ModelVariant:
        """The panel's economy with ``rule`` attached."""
        return ModelVariant(self.kind, self.flags, rule, zlb_weight)

    def initial_rule(self) -> PolicyRuleSpec:
        """Rule the search starts from: the estimated rule for ``tau-only`` panels, the family default otherwise."""
        if self.base_rule == "estimated":
            return estimated_rule()
        rule = PolicyRuleSpec(family=self.family)
        if self.fixed:
            rule = rule.with_vector(list(self.fixed.values()), list(self.fixed))
        return rule

    def free_coefficients(self) -> Tuple[str, ...]:
        """Coefficients the search moves."""
        if self.mode == "tau-only":
            return ("tau",)
        active = PolicyRuleSpec(family=self.family).active
        return tuple(name for name in active if name not in self.fixed)

    def reference_rows(self, lambda_mob: float) -> Tuple[Mapping[str, float], ...]:
        """Reference rows reported for ``lambda_mob``."""
        return tuple(row for row in self.reference if parse_lambda(row["lambda"]) == lambda_mob)

    def describe(self) -> Dict[str, object]:
        """Plain-data summary for listings."""
        return {
            "name": self.name,
            "table": self.table,
            "panel": self.panel,
            "kind": self.kind.value,
            "family": self.family.value,
            "mode": self.mode,
            "lambdas": [lambda_label(v) for v in self.lambdas],
        }


@lru_cache(maxsize=4)
def _registry(path: str) -> Tuple[Dict[str, ExperimentPreset], Dict[str, str]]:
    config = PropertyManager.from_file(path)
    config.validate(("presets", "aliases"))
    presets = {}
    for doc in config.get("presets", []):
        preset = ExperimentPreset.from_dict(doc)
        if preset.name in presets:
            raise ConfigurationException(f"Duplicate preset {preset.name}")
        presets[preset.name] = preset
    aliases = config.get("aliases", {})
    missing = sorted(set(aliases.values()) - set(presets))
    if missing:
        raise ConfigurationException(f"Aliases point to unknown presets: {', '.join(missing)}")
    return presets, aliases


def load_presets(path=None) -> Dict[str, ExperimentPreset]:
    """Presets by name from ``path`` (the shipped registry by default)."""
    return dict(_registry(str(path or PRESETS_FILE))[0])


def preset_names(path=None, aliases: bool = False):
    """Registered preset names in file order, optionally followed by the aliases."""
    presets, alias_map = _registry(str(path or PRESETS_FILE))
    return tuple(presets) + (tuple(alias_map) if aliases else ())


def get_preset(name: str, path=None) -> ExperimentPreset:
    """
    Looks up a preset by name or alias.

    :raises PresetNotFound: for unknown names
    """
    presets, aliases = _registry(str(path or PRESETS_FILE))
    key = aliases.get(name, name)
    if key not in presets:
        raise PresetNotFound(f"Unknown preset {name}")
    return presets[key]
