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
from functools import partial
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from ..exceptions import ConfigurationException, DerivativeException
from ..rules import PolicyRuleSpec, RuleFamily
from ..utils import get_logger, json_str, log_message
from .closed_form import closed_form_steady_state, period_utility_level
from .equations import (
    DURABLE_EXTRA_NAMES,
    FULLY_FLEDGED_NAMES,
    STYLIZED_NAMES,
    economy_variables,
    fully_fledged_equations,
    period_utility,
    stylized_equations,
    wage_index,
)
from .parameters import ARMA_SHOCKS, ParameterSet
from .registry import Variable, VariableRegistry, VariableView
from .variant import ModelVariant, VariantKind

log = get_logger(__name__)

FLEX_SUFFIX = "_f"
WELFARE_NAMES = ("W", "Pen", "WP")


@dataclass(frozen=True)
class Block:
    """
    A named group of residual equations.

    ``evaluate(lag, cur, lead, innov, steady)`` returns an ordered mapping from equation name to residual.
    """

    name: str
    evaluate: Callable[..., Dict[str, np.ndarray]]


class ResidualSystem:
    # pylint: disable=too-many-instance-attributes
    """
    A model as ``f(y_prev, y_now, y_next, u) = 0`` in levels, with its variable registry.

    States (variables appearing lagged) are detected at construction and flagged in the registry. Instances are not
    modified afterwards; they are safe to share across threads.
    """

    complex_safe = True

    def __init__(self, variant: Optional[ModelVariant], params: Optional[ParameterSet], registry: VariableRegistry,
                 blocks: Tuple[Block, ...], shocks: Tuple[str, ...], guess: np.ndarray,
                 derived: Mapping[str, float] = None, flexible: bool = False):
        self.variant = variant
        self.params = params
        self.registry = registry
        self.blocks = tuple(blocks)
        self.shocks = tuple(shocks)
        self.guess = np.asarray(guess, dtype=float)
        self.derived = dict(derived or {})
        self.flexible = flexible
        self._shock_index = {name: pos for pos, name in enumerate(self.shocks)}
        views = self._views(self.guess, self.guess, self.guess, np.zeros(len(self.shocks)))
        self.equation_blocks: Dict[str, str] = {}
        for block in self.blocks:
            for name in block.evaluate(*views, False):
                if name in self.equation_blocks:
                    raise ConfigurationException(f"Duplicate equation {name}")
                self.equation_blocks[name] = block.name
        self.equation_names: Tuple[str, ...] = tuple(self.equation_blocks)
        states, expectational = detect_states(self)
        self.registry = registry.with_states(states)
        self.states: Tuple[str, ...] = states
        self.expectational_count = expectational

    @classmethod
    def custom(cls, variables: Iterable[Variable], blocks: Iterable[Block], shocks: Iterable[str],
               guess: Iterable[float]) -> "ResidualSystem":
        """
        Builds a free-standing system from hand-written blocks (small test models, auxiliary systems).
        States and expectational equations are detected the same way as for the model variants.
        """
        return cls(None, None, VariableRegistry(variables), tuple(blocks), tuple(shocks),
                   np.asarray(list(guess), dtype=float))

    # -- sizes ---------------------------------------------------------------------------------------------------
    @property
    def n_variables(self) -> int:
        """Registered variables."""
        return len(self.registry)

    @property
    def n_equations(self) -> int:
        """Residual equations."""
        return len(self.equation_names)

    @property
    def n_shocks(self) -> int:
        """Innovations."""
        return len(self.shocks)

    @property
    def is_square(self) -> bool:
        """Whether the system determines every registered variable."""
        return self.n_equations == self.n_variables

    @property
    def has_rule(self) -> bool:
        """Whether a policy rule closes the model."""
        return self.variant is not None and self.variant.rule is not None

    @property
    def kind(self) -> Optional[VariantKind]:
        """The economy (``None`` for custom systems)."""
        return self.variant.kind if self.variant is not None else None

    @property
    def economy_names(self) -> Tuple[str, ...]:
        """Endogenous variables of the sticky economy."""
        return self.registry.names_in("economy")

    @property
    def beta(self) -> float:
        """Discount factor of the welfare recursions."""
        return self.params.beta

    def structural_key(self) -> str:
        """
        Stable description of the economy, its flags, the rule and the parameters; keys cached benchmarks.
        """
        if self.variant is None:
            raise ConfigurationException("Custom systems have no structural key")
        rule = self.variant.rule
        return json_str({
            "kind": self.kind.value,
            "flags": {k: sorted(v) if isinstance(v, frozenset) else v for k, v in asdict(self.variant.flags).items()},
            "rule": rule.to_dict() if rule else None,
            "zlb_weight": self.variant.zlb_weight,
            "flexible": self.flexible,
            "params": {k: dict(v) if isinstance(v, Mapping) else v for k, v in asdict(self.params).items()},
        })

    # -- evaluation ----------------------------------------------------------------------------------------------
    def _views(self, y_prev, y_now, y_next, u):
        return (
            self.registry.view(y_prev),
            self.registry.view(y_now),
            self.registry.view(y_next),
            VariableView(u, self._shock_index),
        )

    def _evaluate_blocks(self, y_prev, y_now, y_next, u, steady) -> Dict[str, np.ndarray]:
        views = self._views(y_prev, y_now, y_next, u)
        parts: Dict[str, np.ndarray] = {}
        for block in self.blocks:
            parts.update(block.evaluate(*views, steady))
        return parts

    def residual(self, y_prev, y_now, y_next, u=None, steady: bool = False) -> np.ndarray:
        """
        Evaluates the residuals in levels.

        Arrays may carry trailing batch axes: ``y_*`` of shape ``(n, ...)`` and ``u`` of shape ``(n_shocks, ...)``.
        Complex inputs are supported.

        :param steady: use the steady-state form of the policy rule, ``log(R/R̄) = 0``
        :return: residuals of shape ``(n_equations, ...)``
        """
        y_prev, y_now, y_next = np.asarray(y_prev), np.asarray(y_now), np.asarray(y_next)
        batch = np.broadcast_shapes(y_prev.shape[1:], y_now.shape[1:], y_next.shape[1:])
        if u is None:
            u = np.zeros((self.n_shocks,) + batch)
        u = np.asarray(u)
        batch = np.broadcast_shapes(batch, u.shape[1:])
        parts = self._evaluate_blocks(y_prev, y_now, y_next, u, steady)
        dtype = np.result_type(y_prev, y_now, y_next, u, float)
        out = np.empty((self.n_equations,) + batch, dtype=dtype)
        for pos, name in enumerate(self.equation_names):
            out[pos] = parts[name]
        return out

    def residual_transformed(self, x_prev, x_now, x_next, u=None, steady: bool = False) -> np.ndarray:
        """Residuals as a function of transformed variables (logs of log variables)."""
        to_levels = self.registry.to_levels
        return self.residual(to_levels(x_prev), to_levels(x_now), to_levels(x_next), u, steady)

    def steady_residual(self, levels: np.ndarray) -> np.ndarray:
        """Residuals at a time-invariant point with zero innovations."""
        return self.residual(levels, levels, levels, None, steady=True)

    def rows(self, block: str) -> np.ndarray:
        """Equation positions owned by ``block``."""
        return np.array([pos for pos, name in enumerate(self.equation_names)
                         if self.equation_blocks[name] == block], dtype=int)

    def with_params(self, params: ParameterSet) -> "ResidualSystem":
        """
        Rebuilds the same variant with ``params`` taken as given (``chi_c``, ``nu`` and ``g_bar`` are not
        recomputed when set).
        """
        return _assemble(self.variant, params, self.flexible, derive=False)

    def with_variant(self, variant: ModelVariant) -> "ResidualSystem":
        """Rebuilds with another rule or penalty weight on the same parameters."""
        return _assemble(variant, self.params, self.flexible or _needs_flexible(variant), derive=False)

    def __repr__(self):
        if self.variant is None:
            return f"ResidualSystem(custom, {self.n_equations} equations, {self.n_variables} variables)"
        return (f"ResidualSystem({self.kind.value}, {self.n_equations} equations, {self.n_variables} variables, "
                f"rule={self.variant.rule.family.value if self.variant.rule else None})")


def _needs_flexible(variant: ModelVariant) -> bool:
    return variant.rule is not None and variant.rule.uses_flexible_output


def _economy(kind: VariantKind):
    if kind == VariantKind.FULLY_FLEDGED:
        return FULLY_FLEDGED_NAMES, fully_fledged_equations
    if kind == VariantKind.STYLIZED_DURABLE:
        return STYLIZED_NAMES + DURABLE_EXTRA_NAMES, partial(stylized_equations, durable=True)
    return STYLIZED_NAMES, partial(stylized_equations, durable=False)


def _economy_block(p: ParameterSet, equations) -> Block:
    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        return equations(p, lag, cur, lead)

    return Block("economy", evaluate)


def _flexible_block(kind: VariantKind, p: ParameterSet, names, equations, registry: VariableRegistry) -> Block:
    flex = p.replace(theta_c=0.0, theta_d=0.0, theta_wc=0.0, theta_wd=0.0)
    rename = {name: name + FLEX_SUFFIX for name in names}
    muted = {"e" + shock: 1.0 for shock in kind.markup_shocks}

    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        views = [registry.view(v._values, rename, muted) for v in (lag, cur, lead)]  # pylint: disable=protected-access
        res = {name + FLEX_SUFFIX: value for name, value in equations(flex, *views).items()}
        res["anchor" + FLEX_SUFFIX] = np.log(getattr(cur, "PiC" + FLEX_SUFFIX) / p.pi_c_bar)
        return res

    return Block("flexible", evaluate)


def _rule_variables(rule: PolicyRuleSpec) -> Tuple[Variable, ...]:
    out = [Variable("PiT", "jump", "log", "rule")]
    if rule.uses_wage_index:
        out.append(Variable("Wg", "jump", "log", "rule"))
    if rule.family == RuleFamily.WAGE_INFLATION:
        out.append(Variable("Piw", "jump", "log", "rule"))
    return tuple(out)


def _rule_block(rule: PolicyRuleSpec, p: ParameterSet, y_bar: float) -> Block:
    tau = rule.tau
    r_bar = p.r_bar
    pi_target = p.pi_c_bar ** (1.0 - tau) * p.pi_d_bar ** tau

    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        res = {"inflation_index": np.log(cur.PiT) - (1.0 - tau) * np.log(cur.PiC) - tau * np.log(cur.PiD)}
        if rule.uses_wage_index:
            res["wage_index"] = np.log(cur.Wg) - np.log(wage_index(p.mu, cur.wC, cur.wD))
        if rule.family == RuleFamily.WAGE_INFLATION:
            res["wage_inflation_index"] = np.log(cur.Piw) - np.log(cur.Wg) + np.log(lag.Wg) - np.log(cur.PiC)
        if steady:
            res["policy_rule"] = np.log(cur.R / r_bar)
            return res
        if rule.uses_flexible_output:
            gap = np.log(cur.Y) - np.log(getattr(cur, "Y" + FLEX_SUFFIX))
            gap_lag = np.log(lag.Y) - np.log(getattr(lag, "Y" + FLEX_SUFFIX))
        else:
            gap = np.log(cur.Y / y_bar)
            gap_lag = np.log(lag.Y / y_bar)
        wage_term = 0.0
        if rule.family == RuleFamily.WAGE_INFLATION:
            wage_term = np.log(cur.Piw / p.pi_c_bar)
        elif rule.family == RuleFamily.REAL_WAGE_GROWTH:
            wage_term = np.log(cur.Wg) - np.log(lag.Wg)
        elif rule.family == RuleFamily.WAGE_GROWTH_DIFFERENTIAL:
            wage_term = np.log(cur.wD / cur.wC) - np.log(lag.wD / lag.wC)
        alpha_dy = rule.alpha_dy if rule.family != RuleFamily.IMPLEMENTABLE else 0.0
        res["policy_rule"] = (
            np.log(cur.R / r_bar)
            - rule.rho_r * np.log(lag.R / r_bar)
            - rule.alpha_pi * np.log(cur.PiT / pi_target)
            - rule.alpha_y * gap
            - alpha_dy * (gap - gap_lag)
            - rule.alpha_w * wage_term
            - np.log(cur.eR)
        )
        return res

    return Block("rule", evaluate)


def _exogenous_variables(shocks: Tuple[str, ...]) -> Tuple[Variable, ...]:
    out = [Variable("e" + k, "exogenous", "log", "exogenous") for k in shocks]
    out += [Variable("innov_" + k, "auxiliary", "level", "exogenous") for k in shocks if k in ARMA_SHOCKS]
    return tuple(out)


def _exogenous_block(shocks: Tuple[str, ...], p: ParameterSet) -> Block:
    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        res = {}
        for k in shocks:
            log_now = np.log(getattr(cur, "e" + k))
            log_lag = np.log(getattr(lag, "e" + k))
            if k in ARMA_SHOCKS:
                res["process_" + k] = (log_now - p.rho_of(k) * log_lag
                                       - getattr(cur, "innov_" + k) + p.ma_of(k) * getattr(lag, "innov_" + k))
            else:
                res["process_" + k] = log_now - p.rho_of(k) * log_lag - p.sigma_of(k) * getattr(innov, k)
        for k in shocks:
            if k in ARMA_SHOCKS:
                res["innovation_" + k] = getattr(cur, "innov_" + k) - p.sigma_of(k) * getattr(innov, k)
        return res

    return Block("exogenous", evaluate)


def _welfare_block(p: ParameterSet, zlb_weight: float) -> Block:
    r_bar = p.r_bar

    def evaluate(lag, cur, lead, innov, steady):  # pylint: disable=unused-argument
        return {
            "welfare": cur.W - cur.eB * period_utility(p, cur) - p.beta * lead.W,
            "penalty": cur.Pen - (cur.R - r_bar) ** 2 - p.beta * lead.Pen,
            "welfare_penalized": cur.WP - cur.W + zlb_weight * cur.Pen,
        }

    return Block("welfare", evaluate)


def _assemble(variant: ModelVariant, params: ParameterSet, flexible: bool, derive: bool = True) -> ResidualSystem:
    # pylint: disable=too-many-locals
    variant.validate(params)
    kind = variant.kind
    if derive:
        p = variant.effective_params(params.replace(chi_c=None, g_bar=None)).validate()
    else:
        p = params
    levels, derived = closed_form_steady_state(kind, p)
    if derive:
        p = p.replace(chi_c=derived["chi_c"], nu=derived["nu"], g_bar=derived["g_bar"])
        levels, derived = closed_form_steady_state(kind, p)
    names, equations = _economy(kind)
    shocks = variant.shocks

    variables = list(economy_variables(names))
    blocks = [_economy_block(p, equations)]
    if flexible:
        variables += economy_variables(names, FLEX_SUFFIX, "flexible")
        levels.update({name + FLEX_SUFFIX: levels[name] for name in names})
    if variant.rule is not None:
        variables += _rule_variables(variant.rule)
        tau = variant.rule.tau
        levels["PiT"] = p.pi_c_bar ** (1.0 - tau) * p.pi_d_bar ** tau
        levels["Wg"] = float(wage_index(p.mu, levels["wC"], levels["wD"]))
        levels["Piw"] = p.pi_c_bar
    variables += _exogenous_variables(shocks)
    variables += [Variable(name, "jump", "level", "welfare") for name in WELFARE_NAMES]
    registry = VariableRegistry(variables)
    if flexible:
        blocks.append(_flexible_block(kind, p, names, equations, registry))
    if variant.rule is not None:
        blocks.append(_rule_block(variant.rule, p, levels["Y"]))
    blocks.append(_exogenous_block(shocks, p))
    blocks.append(_welfare_block(p, variant.zlb_weight))

    for shock in shocks:
        levels["e" + shock] = 1.0
        levels["innov_" + shock] = 0.0
    utility = period_utility_level(levels, p)
    levels["W"] = utility / (1.0 - p.beta)
    levels["Pen"] = (levels["R"] - p.r_bar) ** 2 / (1.0 - p.beta)
    levels["WP"] = levels["W"] - variant.zlb_weight * levels["Pen"]
    guess = np.array([levels[name] for name in registry.names], dtype=float)

    system = ResidualSystem(variant, p, registry, tuple(blocks), shocks, guess, derived, flexible)
    if variant.rule is not None and not system.is_square:
        raise ConfigurationException(
            f"Dimension mismatch: {system.n_equations} equations for {system.n_variables} variables"
        )
    return system


def lag_lead_pattern(system, point: np.ndarray = None, seed: int = 20240101) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sparsity of ``∂f/∂y_prev`` and ``∂f/∂y_next`` near ``point`` (the guess by default).

    The pattern is read at a randomly perturbed point so that derivatives vanishing only at the steady state are
    not mistaken for structural zeros. Complex-safe systems are differentiated with complex steps, others with
    central differences and a relative threshold.

    :return: boolean matrices of shape ``(n_equations, n_variables)``
    :raises DerivativeException: when the residual is not finite near the point
    """
    rng = np.random.default_rng(seed)
    base = system.guess if point is None else point
    noise = 0.01 * rng.standard_normal(base.shape)
    x = system.registry.to_transformed(base) + noise
    n = system.n_variables
    flat = x[:, None] * np.ones((1, n))
    if system.complex_safe:
        step = 1e-20
        bumped = x[:, None] + 1j * step * np.eye(n)
        jac_prev = np.imag(system.residual_transformed(bumped, flat, flat)) / step
        jac_next = np.imag(system.residual_transformed(flat, flat, bumped)) / step
        threshold = 0.0
    else:
        step = 1e-6
        up, down = flat + step * np.eye(n), flat - step * np.eye(n)
        jac_prev = (system.residual_transformed(up, flat, flat) - system.residual_transformed(down, flat, flat))
        jac_next = (system.residual_transformed(flat, flat, up) - system.residual_transformed(flat, flat, down))
        jac_prev, jac_next = jac_prev / (2 * step), jac_next / (2 * step)
        threshold = 1e-6
    if not (np.all(np.isfinite(jac_prev)) and np.all(np.isfinite(jac_next))):
        raise DerivativeException("Non-finite residual near the point while reading the lag and lead structure")
    return np.abs(jac_prev) > threshold, np.abs(jac_next) > threshold


def detect_states(system) -> Tuple[Tuple[str, ...], int]:
    """
    Predetermined variables (any lagged appearance) and the count of expectational equations of ``system``.

    :return: ``(states, expectational_count)``
    """
    prev, nxt = lag_lead_pattern(system)
    names = system.registry.names
    states = tuple(names[j] for j in range(system.n_variables) if prev[:, j].any())
    return states, int(nxt.any(axis=1).sum())


def build_model(variant: ModelVariant, params: ParameterSet) -> ResidualSystem:
    """
    Builds the residual system of ``variant`` at ``params``.

    ``chi_c`` is recomputed from the steady state, ``nu`` is calibrated to ``params.target_n`` when it is ``None``
    and ``g_bar = g_y * Y``. Rules that respond to the flexible-price output gap get the flexible counterpart
    stacked automatically. Without a rule the nominal rate is left free (one equation short); such systems feed
    the Ramsey builder.

    :raises ConfigurationException: for inconsistent flags, ``mu < 0`` or out-of-bounds rule coefficients
    """
    system = _assemble(variant, params, _needs_flexible(variant))
    log_message("Built %r with %d states", log, system, len(system.states))
    return system


def flexible_counterpart(system: ResidualSystem) -> ResidualSystem:
    """
    Stacks the sticky economy with its flexible-price counterpart.

    The counterpart has zero price (and wage) adjustment costs, muted markup shocks and its own copy of every
    economy variable (suffix ``_f``); both economies share the exogenous processes. The counterpart's nominal
    anchor is ``Π^C_f = Π̄^C``, which leaves its real allocation unaffected.
    """
    if system.flexible:
        return system
    return _assemble(system.variant, system.params, True, derive=False)


def policy_free(system: ResidualSystem) -> ResidualSystem:
    """Same economy and parameters with the policy rule (and flexible counterpart) removed."""
    return _assemble(replace(system.variant, rule=None), system.params, False, derive=False)


def flex_name(name: str) -> str:
    """Name of the flexible-price copy of ``name``."""
    return name + FLEX_SUFFIX


def shock_index(system: ResidualSystem, shock: str) -> int:
    """
    Position of ``shock`` among the innovations.

    :raises ConfigurationException: for unknown shocks
    """
    try:
        return system.shocks.index(shock)
    except ValueError as exc:
        raise ConfigurationException(f"Unknown shock {shock}; available: {', '.join(system.shocks)}") from exc


def registry_levels(system: ResidualSystem, levels: Optional[np.ndarray] = None) -> Dict[str, float]:
    """Name to level mapping (the guess by default)."""
    values = system.guess if levels is None else levels
    return dict(zip(system.registry.names, map(float, values)))
