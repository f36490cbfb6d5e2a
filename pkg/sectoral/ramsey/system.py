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

from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import ConfigurationException
from ..model.registry import Variable, VariableRegistry
from ..model.system import Block, ResidualSystem, lag_lead_pattern, policy_free
from ..utils import get_logger, json_str, log_message

log = get_logger(__name__)

MULTIPLIER_PREFIX = "lm_"
FOC_PREFIX = "foc_"
LAG_PREFIX = "L_"
LEAD_PREFIX = "F_"
INNER_STEP = 1e-20
MULTIPLIER_GUESS = 1.0


def multiplier_name(equation: str) -> str:
    """Multiplier attached to an equilibrium condition."""
    return MULTIPLIER_PREFIX + equation


def utility_gradient(base: ResidualSystem, cur: np.ndarray, zlb_weight: float) -> np.ndarray:
    """
    Gradient of ``e^B (log X - nu N^(1+phi)/(1+phi)) - w_r (R - R̄)^2`` with respect to the economy variables.

    :param cur: levels aligned with the base registry, optional trailing batch axes
    :return: array of shape ``(n_economy, ...)``
    """
    p = base.params
    registry = base.registry
    economy = base.economy_names
    e_b = cur[registry.index("eB")] if "eB" in registry else 1.0
    x, n, r = (cur[registry.index(name)] for name in ("X", "N", "R"))
    grad = np.zeros((len(economy),) + np.shape(cur)[1:], dtype=np.result_type(cur, float))
    grad[economy.index("X")] = e_b / x
    grad[economy.index("N")] = -e_b * p.nu * n ** p.phi_frisch
    grad[economy.index("R")] = -2.0 * zlb_weight * (r - p.r_bar)
    return grad


def economy_jacobians(base: ResidualSystem, y_prev, y_now, y_next, slots=(0, 1, 2)) -> Tuple[np.ndarray, ...]:
    """
    Complex-step Jacobians of the economy conditions with respect to the economy variables, one per requested
    slot (0 previous, 1 current, 2 next period).

    :return: arrays of shape ``(n_conditions, n_economy, ...)``
    """
    rows = base.rows("economy")
    columns = base.registry.indices(block="economy")
    points = np.broadcast_arrays(*(np.asarray(y, dtype=float) for y in (y_prev, y_now, y_next)))
    batch = points[0].shape[1:]
    bump = np.zeros((base.n_variables, columns.size))
    bump[columns, np.arange(columns.size)] = INNER_STEP
    bump = bump.reshape(bump.shape + (1,) * len(batch))
    out = []
    for slot in slots:
        args = [y[:, None, ...] for y in points]
        args[slot] = args[slot] + 1j * bump
        out.append(np.imag(base.residual(*args)[rows]) / INNER_STEP)
    return tuple(out)


def _contract(multipliers: np.ndarray, jac: np.ndarray) -> np.ndarray:
    return np.einsum("i...,ij...->j...", multipliers, jac)


class RamseySystem(ResidualSystem):
    # pylint: disable=too-many-instance-attributes
    """
    Equilibrium conditions of an economy without a policy rule, stacked with the planner's first-order conditions
    for every economy variable and the multipliers on the equilibrium conditions.

    The planner maximizes expected discounted utility net of ``w_r (R - R̄)^2``. A multiplier on a condition with
    expectations enters the next period's first-order conditions divided by ``beta``. Variables appearing lagged in
    a forward-looking condition (or with a lead in a backward-looking one) get auxiliary lag (``L_``) or lead
    (``F_``) copies so that every condition stays within one period of ``t``.

    The planner conditions are numeric derivatives, so the outer system is differentiated with real stencils.
    """

    complex_safe = False

    def __init__(self, base: ResidualSystem, zlb_weight: float):
        self.base = base
        self.zlb_weight = float(zlb_weight)
        economy = base.economy_names
        self.conditions: Tuple[str, ...] = tuple(base.equation_names[r] for r in base.rows("economy"))
        self.multipliers: Tuple[str, ...] = tuple(multiplier_name(eq) for eq in self.conditions)
        self.lagged, self.led = _auxiliary_sets(base)
        n_base = base.n_variables
        variables = list(base.registry)
        variables += [Variable(name, "jump", "level", "multiplier") for name in self.multipliers]
        variables += [Variable(LAG_PREFIX + v, "jump", base.registry[v].transform, "auxiliary_lag")
                      for v in self.lagged]
        variables += [Variable(LEAD_PREFIX + v, "jump", base.registry[v].transform, "auxiliary_lead")
                      for v in self.led]
        registry = VariableRegistry(variables)
        guess = np.concatenate([
            base.guess,
            np.full(len(self.multipliers), MULTIPLIER_GUESS),
            base.guess[base.registry.indices(self.lagged)] if self.lagged else np.zeros(0),
            base.guess[base.registry.indices(self.led)] if self.led else np.zeros(0),
        ])
        self._n_base = n_base
        self._multiplier_index = registry.indices(self.multipliers)
        self._lag_targets = base.registry.indices(self.lagged) if self.lagged else np.zeros(0, dtype=int)
        self._lag_sources = registry.indices([LAG_PREFIX + v for v in self.lagged]) \
            if self.lagged else np.zeros(0, dtype=int)
        self._lead_targets = base.registry.indices(self.led) if self.led else np.zeros(0, dtype=int)
        self._lead_sources = registry.indices([LEAD_PREFIX + v for v in self.led]) \
            if self.led else np.zeros(0, dtype=int)
        blocks = base.blocks + (self._planner_block(), self._auxiliary_block())
        super().__init__(base.variant.with_zlb_weight(zlb_weight), base.params, registry, blocks, base.shocks,
                         guess, base.derived, False)
        if not self.is_square:
            raise ConfigurationException(
                f"Dimension mismatch: {self.n_equations} equations for {self.n_variables} variables"
            )

    @property
    def n_multipliers(self) -> int:
        """Multipliers, one per equilibrium condition."""
        return len(self.multipliers)

    @property
    def planner_size(self) -> int:
        """Economy variables plus multipliers."""
        return len(self.base.economy_names) + self.n_multipliers

    def base_levels(self, values: np.ndarray) -> np.ndarray:
        """The leading block of ``values`` aligned with the base registry."""
        return np.asarray(values)[:self._n_base]

    def multiplier_values(self, values: np.ndarray) -> np.ndarray:
        """Multipliers in condition order."""
        return np.asarray(values)[self._multiplier_index]

    def _planner_block(self) -> Block:
        base = self.base

        def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
            # pylint: disable=protected-access
            y_lag, y_cur, y_lead = np.broadcast_arrays(lag._values, cur._values, lead._values)
            b_lag, b_cur, b_lead = (y[:self._n_base] for y in (y_lag, y_cur, y_lead))
            b_lag2 = np.array(b_lag, copy=True)
            b_lag2[self._lag_targets] = y_lag[self._lag_sources]
            b_lead2 = np.array(b_lead, copy=True)
            b_lead2[self._lead_targets] = y_lead[self._lead_sources]
            (j_now,) = economy_jacobians(base, b_lag, b_cur, b_lead, slots=(1,))
            (j_next,) = economy_jacobians(base, b_lag2, b_lag, b_cur, slots=(2,))
            (j_prev,) = economy_jacobians(base, b_cur, b_lead, b_lead2, slots=(0,))
            idx = self._multiplier_index
            foc = (utility_gradient(base, b_cur, self.zlb_weight)
                   + _contract(y_cur[idx], j_now)
                   + _contract(y_lag[idx], j_next) / base.beta
                   + base.beta * _contract(y_lead[idx], j_prev))
            return {FOC_PREFIX + name: foc[j] for j, name in enumerate(base.economy_names)}

        return Block("planner", evaluate)

    def _auxiliary_block(self) -> Block:
        def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
            res = {}
            for v in self.lagged:
                res["lag_" + v] = getattr(cur, LAG_PREFIX + v) - getattr(lag, v)
            for v in self.led:
                res["lead_" + v] = getattr(cur, LEAD_PREFIX + v) - getattr(lead, v)
            return res

        return Block("auxiliary", evaluate)

    def structural_key(self) -> str:
        """Key of the underlying economy with the planner's penalty weight."""
        return json_str({"ramsey": self.base.structural_key(), "zlb_weight": self.zlb_weight})

    def with_zlb_weight(self, zlb_weight: float) -> "RamseySystem":
        """Same economy, another penalty weight."""
        return RamseySystem(self.base.with_variant(self.base.variant.with_zlb_weight(zlb_weight)), zlb_weight)

    def with_params(self, params):
        """Planner problem of the same economy at other parameters."""
        return RamseySystem(self.base.with_params(params), self.zlb_weight)

    def with_variant(self, variant):
        """Planner problem of another variant of the economy (its rule is dropped)."""
        return RamseySystem(self.base.with_variant(variant.with_rule(None)), variant.zlb_weight)

    def __repr__(self):
        return (f"RamseySystem({self.kind.value}, {self.n_equations} equations, "
                f"{self.planner_size} planner unknowns, w_r={self.zlb_weight:g})")


def _auxiliary_sets(base: ResidualSystem) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Variables lagged in forward-looking conditions and led in backward-looking ones."""
    prev, nxt = lag_lead_pattern(base)
    rows = base.rows("economy")
    prev, nxt = prev[rows], nxt[rows]
    forward, backward = nxt.any(axis=1), prev.any(axis=1)
    names = base.registry.names
    lagged = tuple(names[j] for j in range(len(names)) if prev[forward, j].any())
    led = tuple(names[j] for j in range(len(names)) if nxt[backward, j].any())
    return lagged, led


def build_ramsey_system(system: ResidualSystem, zlb_weight: Optional[float] = None) -> RamseySystem:
    """
    Adjoins the planner's first-order conditions to an economy without a policy rule.

    :param system: economy without a policy rule (see :func:`sectoral.model.policy_free`)
    :param zlb_weight: penalty weight ``w_r``; the variant's weight by default
    :raises ConfigurationException: when a rule is attached or the stacked system is not square
    """
    if system.variant is None:
        raise ConfigurationException("The planner problem needs a model variant")
    if system.has_rule:
        raise ConfigurationException("Remove the policy rule before building the planner problem")
    if system.flexible:
        system = policy_free(system)
    weight = system.variant.zlb_weight if zlb_weight is None else float(zlb_weight)
    if weight < 0.0:
        raise ConfigurationException("The interest-rate penalty weight must be non-negative")
    if weight != system.variant.zlb_weight:
        system = system.with_variant(system.variant.with_zlb_weight(weight))
    ramsey = RamseySystem(system, weight)
    log_message("Planner system: %d economy variables, %d multipliers, auxiliaries %s / %s", log,
                len(system.economy_names), ramsey.n_multipliers, ramsey.lagged, ramsey.led)
    return ramsey


def planner_conditions(rs: RamseySystem, values_lag, values_now, values_lead) -> Dict[str, float]:
    """First-order conditions of the planner at explicit points, by variable name."""
    res = rs.residual(values_lag, values_now, values_lead)
    rows = rs.rows("planner")
    return {rs.equation_names[r][len(FOC_PREFIX):]: float(res[r]) for r in rows}
