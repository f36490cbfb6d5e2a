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

from dataclasses import dataclass, replace
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConfigurationException

ROLES = ("state", "jump", "exogenous", "auxiliary")
TRANSFORMS = ("log", "level")


@dataclass(frozen=True)
class Variable:
    """
    A registered model variable.

    :param role: one of ``state`` (appears lagged), ``jump``, ``exogenous`` or ``auxiliary``
    :param transform: ``log`` for strictly positive variables perturbed in log-levels, ``level`` otherwise
    :param block: the equation block that owns the variable (economy, flexible, rule, exogenous, welfare, multiplier)
    """

    name: str
    role: str = "jump"
    transform: str = "log"
    block: str = "economy"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigurationException(f"Unknown role {self.role} for {self.name}")
        if self.transform not in TRANSFORMS:
            raise ConfigurationException(f"Unknown transform {self.transform} for {self.name}")


class VariableRegistry:
    """
    Ordered, name-unique collection of :class:`Variable` with index maps both ways.
    """

    def __init__(self, variables: Iterable[Variable]):
        self._variables: Tuple[Variable, ...] = tuple(variables)
        self._index: Dict[str, int] = {}
        for pos, var in enumerate(self._variables):
            if var.name in self._index:
                raise ConfigurationException(f"Duplicate variable {var.name}")
            self._index[var.name] = pos
        self._log_mask = np.array([v.transform == "log" for v in self._variables], dtype=bool)

    def __len__(self) -> int:
        return len(self._variables)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._variables)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Variable:
        return self._variables[self.index(name)]

    @property
    def names(self) -> Tuple[str, ...]:
        """Variable names in registry order."""
        return tuple(v.name for v in self._variables)

    @property
    def log_mask(self) -> np.ndarray:
        """Boolean mask of log-transformed variables."""
        return self._log_mask.copy()

    def index(self, name: str) -> int:
        """
        Position of ``name``.

        :raises KeyError: for unregistered names
        """
        try:
            return self._index[name]
        except KeyError as exc:
            raise KeyError(f"Unregistered variable {name}") from exc

    def indices(self, names: Iterable[str] = None, role: str = None, block: str = None) -> np.ndarray:
        """Positions filtered by explicit names, role and/or block."""
        if names is not None:
            return np.array([self.index(n) for n in names], dtype=int)
        return np.array(
            [pos for pos, v in enumerate(self._variables)
             if (role is None or v.role == role) and (block is None or v.block == block)],
            dtype=int,
        )

    def names_in(self, block: str) -> Tuple[str, ...]:
        """Names owned by ``block``."""
        return tuple(v.name for v in self._variables if v.block == block)

    def with_states(self, states: Iterable[str]) -> "VariableRegistry":
        """
        Copy where the endogenous variables in ``states`` get role ``state`` and the other endogenous ones ``jump``.
        Exogenous and auxiliary roles are kept.
        """
        states = set(states)
        updated = []
        for var in self._variables:
            if var.role in ("state", "jump"):
                var = replace(var, role="state" if var.name in states else "jump")
            updated.append(var)
        return VariableRegistry(updated)

    def extend(self, variables: Iterable[Variable]) -> "VariableRegistry":
        """Copy with ``variables`` appended."""
        return VariableRegistry(self._variables + tuple(variables))

    def to_levels(self, values: np.ndarray) -> np.ndarray:
        """Maps transformed values (logs for log variables) to levels along the first axis."""
        out = np.array(values, copy=True)
        out[self._log_mask] = np.exp(out[self._log_mask])
        return out

    def to_transformed(self, levels: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_levels`."""
        out = np.array(levels, copy=True)
        out[self._log_mask] = np.log(out[self._log_mask])
        return out

    def view(self, values: np.ndarray, rename: Mapping[str, str] = None,
             fixed: Mapping[str, float] = None) -> "VariableView":
        """Attribute view over ``values`` (first axis aligned with the registry)."""
        return VariableView(values, self._index, rename, fixed)

    def subset(self, names: Sequence[str]) -> "VariableRegistry":
        """Registry restricted to ``names`` in the given order."""
        return VariableRegistry(self[n] for n in names)


class VariableView:
    """
    Read-only attribute access to the rows of an array by variable name.

    ``rename`` redirects names (the flexible block reads ``C`` from ``C_f``) and ``fixed`` pins names to constants
    (muted shocks).
    """

    def __init__(self, values: np.ndarray, index: Mapping[str, int], rename: Optional[Mapping[str, str]] = None,
                 fixed: Optional[Mapping[str, float]] = None):
        super().__setattr__("_values", values)
        super().__setattr__("_index", index)
        super().__setattr__("_rename", rename or {})
        super().__setattr__("_fixed", fixed or {})

    def __getattr__(self, name):
        if name.startswith("_"):
            return super().__getattribute__(name)
        fixed = super().__getattribute__("_fixed")
        if name in fixed:
            return fixed[name]
        target = super().__getattribute__("_rename").get(name, name)
        index = super().__getattribute__("_index")
        if target not in index:
            raise AttributeError(f"Unregistered variable {target}")
        return super().__getattribute__("_values")[index[target]]

    def __setattr__(self, name: str, value):
        raise AttributeError("Attempt to modify a read-only attribute: %s" % name)
