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
import threading
from dataclasses import dataclass, replace
from typing import Dict, Optional

import numpy as np
from scipy.optimize import brentq

from ..exceptions import ConfigurationException, NumericalException
from ..experiment import LocalExperiment
from ..model import ParameterSet, build_model, solve_steady_state
from ..perturbation import Determinacy, linearize, pr_zlb, solve_first_order, solve_second_order, welfare_mean
from ..perturbation.simulate import ZLB_PERIODS
from ..ramsey import ramsey_benchmark
from ..rules import PolicyRuleSpec
from ..timer import Timer
from ..utils import get_logger, log_message
from .presets import ExperimentPreset, lambda_label

log = get_logger(__name__)

ZLB_LIMIT = 0.01
OMEGA_FLOOR = -1e-6
TIGHT_STEADY_TOL = 1e-12
BENCHMARK_EXPERIMENT = "ramsey-benchmarks"


def consumption_equivalent(welfare_rule: float, welfare_ramsey: float, beta: float) -> float:
    """
    Permanent fraction of planner consumption a household gives up to be indifferent with the rule.

    With utility logarithmic in the consumption bundle, scaling it by ``1 - omega`` every period shifts lifetime
    utility by ``log(1 - omega) / (1 - beta)``, so ``omega = 1 - exp((W_rule - W_ramsey)(1 - beta))``.

    :param welfare_rule: penalty-free welfare under the rule
    :param welfare_ramsey: penalty-free welfare under the planner
    :param beta: discount factor
    :return: omega as a fraction (multiply by 100 for percent)
    """
    return float(-math.expm1((welfare_rule - welfare_ramsey) * (1.0 - beta)))


def consumption_equivalent_implicit(welfare_rule: float, welfare_ramsey: float, beta: float) -> float:
    """
    Root of ``W_ramsey + log(1 - omega) / (1 - beta) = W_rule`` found numerically; cross-checks
    :func:`consumption_equivalent`.
    """
    gap = welfare_rule - welfare_ramsey
    if gap == 0.0:
        return 0.0

    def scaled(omega):
        return math.log1p(-omega) / (1.0 - beta) - gap

    low, high = -1.0, float(np.nextafter(1.0, 0.0))
    while scaled(low) < 0.0:
        low = 2.0 * low
    return float(brentq(scaled, low, high, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500))


@dataclass(frozen=True)
class PolicyEvaluation:
    # pylint: disable=too-many-instance-attributes
    """
    Welfare of one rule in one economy.

    ``welfare`` includes the interest-rate penalty and is the search objective; ``omega100`` compares the
    penalty-free welfare with the planner's. Infeasible rules carry ``-inf`` welfare and a verdict saying why.
    """

    rule: PolicyRuleSpec
    lambda_mob: float
    zlb_weight: float
    verdict: Determinacy
    welfare: float = -math.inf
    welfare_no_penalty: float = -math.inf
    omega100: float = math.nan
    pr_zlb: Optional[float] = None
    reason: str = ""
    seconds: float = 0.0

    @property
    def feasible(self) -> bool:
        """Determinate with finite welfare."""
        return self.verdict == Determinacy.DETERMINATE and math.isfinite(self.welfare)

    @property
    def objective(self) -> float:
        """Penalized welfare, ``-inf`` when infeasible."""
        return self.welfare if self.feasible else -math.inf

    @property
    def gamma_pi(self) -> float:
        """Long-run inflation response of the rule."""
        return self.rule.gamma_pi

    @property
    def taylor_principle(self) -> Optional[bool]:
        """``gamma_pi > 1`` when the rule is not a price-level rule, ``None`` otherwise."""
        if self.rule.rho_r >= 1.0:
            return None
        return bool(self.gamma_pi > 1.0)

    @property
    def zlb_ok(self) -> Optional[bool]:
        """Whether Pr(ZLB) is below the one-percent target, ``None`` when not simulated."""
        return None if self.pr_zlb is None else self.pr_zlb < ZLB_LIMIT

    def with_pr_zlb(self, value: float) -> "PolicyEvaluation":
        return replace(self, pr_zlb=float(value))

    def to_row(self) -> Dict[str, object]:
        """Flat record for tables: every rule coefficient, welfare, omega, w_r, Pr(ZLB) and the verdict."""
        row = {"lambda": lambda_label(self.lambda_mob), "family": self.rule.family.value}
        row.update({k: v for k, v in self.rule.to_dict().items() if k != "family"})
        row.update({
            "omega100": self.omega100,
            "welfare": self.welfare,
            "welfare_no_penalty": self.welfare_no_penalty,
            "w_r": self.zlb_weight,
            "pr_zlb": self.pr_zlb,
            "verdict": self.verdict.value,
            "gamma_pi": self.gamma_pi if math.isfinite(self.gamma_pi) else None,
            "taylor_principle": self.taylor_principle,
        })
        return row


class PolicyProblem:
    # pylint: disable=too-many-instance-attributes
    """
    One panel at one labor mobility: builds rule economies, caches the planner benchmark they are compared with
    and evaluates candidate rules.

    :param preset: the panel
    :param lambda_mob: labor mobility (``inf`` for perfect mobility)
    :param zlb_weight: weight of the interest-rate penalty in the rule economies' objective
    :param benchmark_weight: penalty weight of the planner benchmark; the preset's ``benchmark_wr`` by default
    :param experiment: store for planner benchmarks; computed in memory when ``None``
    :param params: calibration overriding the preset's at ``lambda_mob``
    """

    def __init__(self, preset: ExperimentPreset, lambda_mob: float, zlb_weight: float = 0.0,
                 benchmark_weight: Optional[float] = None, experiment: Optional[LocalExperiment] = None,
                 zlb_periods: int = ZLB_PERIODS, seed: int = 0, params: Optional[ParameterSet] = None):
        if zlb_weight < 0.0:
            raise ConfigurationException("The interest-rate penalty weight must be non-negative")
        self.preset = preset
        self.lambda_mob = float(lambda_mob)
        self.zlb_weight = float(zlb_weight)
        self.benchmark_weight = preset.benchmark_wr if benchmark_weight is None else float(benchmark_weight)
        if self.benchmark_weight < 0.0:
            raise ConfigurationException("The benchmark penalty weight must be non-negative")
        self.params = params if params is not None else preset.parameters(self.lambda_mob)
        self.experiment = experiment
        self.zlb_periods = int(zlb_periods)
        self.seed = int(seed)
        self._benchmark = None
        self._lock = threading.Lock()

    def __repr__(self):
        return (f"PolicyProblem({self.preset.name}, lambda={lambda_label(self.lambda_mob)}, "
                f"w_r={self.zlb_weight:g})")

    @property
    def beta(self) -> float:
        return self.params.beta

    def with_zlb_weight(self, zlb_weight: float) -> "PolicyProblem":
        """
        Same panel and planner benchmark with another penalty weight on the rule economies.
        """
        other = PolicyProblem(self.preset, self.lambda_mob, zlb_weight, self.benchmark_weight, self.experiment,
                              self.zlb_periods, self.seed, self.params)
        with self._lock:
            other._benchmark = self._benchmark  # pylint: disable=protected-access
        return other

    def system(self, rule: PolicyRuleSpec, zlb_weight: Optional[float] = None):
        """Residual system of the economy with ``rule`` attached."""
        weight = self.zlb_weight if zlb_weight is None else zlb_weight
        return build_model(self.preset.variant(rule, weight), self.params)

    @property
    def benchmark(self) -> Dict[str, object]:
        """
        Summary of the planner benchmark (see :meth:`sectoral.ramsey.RamseyBenchmark.summary`).
        """
        with self._lock:
            if self._benchmark is None:
                self._benchmark = self._compute_benchmark()
            return self._benchmark

    def _compute_benchmark(self) -> Dict[str, object]:
        economy = build_model(self.preset.variant(None, self.benchmark_weight), self.params)

        def compute():
            return ramsey_benchmark(economy, self.benchmark_weight).summary()

        if self.experiment is None:
            return compute()
        key = ramsey_key(economy, self.benchmark_weight)
        return self.experiment.cached("summary", compute, key=key)

    def evaluate(self, rule: PolicyRuleSpec, zlb_weight: Optional[float] = None, zlb: bool = False,
                 tight: bool = False) -> PolicyEvaluation:
        """
        Solves the rule economy to second order and evaluates conditional welfare at the planner's steady state.

        Indeterminate and explosive rules, and numerical failures along the way, give an infeasible evaluation
        instead of raising.

        :param zlb: also simulate Pr(ZLB)
        :param tight: solve the steady state with a tighter tolerance
        """
        weight = self.zlb_weight if zlb_weight is None else float(zlb_weight)
        rule = rule.clip()
        benchmark = self.benchmark
        with Timer() as timer:
            try:
                system = self.system(rule, weight)
                steady = solve_steady_state(system, tol=TIGHT_STEADY_TOL) if tight else solve_steady_state(system)
                first = solve_first_order(linearize(system, steady))
                if not first.is_determinate:
                    result = PolicyEvaluation(rule, self.lambda_mob, weight, first.verdict, reason=first.reason)
                else:
                    second = solve_second_order(first)
                    values = welfare_mean(second, initial=benchmark["levels"])
                    omega = consumption_equivalent(values.without_penalty, benchmark["welfare_no_penalty"],
                                                   self.beta)
                    result = PolicyEvaluation(rule, self.lambda_mob, weight, first.verdict, values.with_penalty,
                                              values.without_penalty, 100.0 * omega)
                    if zlb:
                        result = result.with_pr_zlb(
                            pr_zlb(second, n_periods=self.zlb_periods, seed=self.seed)
                        )
            except NumericalException as exc:
                log_message("Rule %s failed: %s", log, rule.to_dict(), exc, level=logging.DEBUG)
                result = PolicyEvaluation(rule, self.lambda_mob, weight, Determinacy.EXPLOSIVE, reason=str(exc))
        return replace(result, seconds=timer.interval)

    def pr_zlb(self, rule: PolicyRuleSpec) -> float:
        """Pr(ZLB) of the rule economy, ``1`` when the rule is infeasible."""
        evaluation = self.evaluate(rule, zlb=True)
        return evaluation.pr_zlb if evaluation.feasible else 1.0


def ramsey_key(economy, zlb_weight: float) -> str:
    """Cache key of a planner benchmark."""
    return f"{economy.structural_key()}|w_r={float(zlb_weight):g}"


def evaluate_rule(preset: ExperimentPreset, rule: PolicyRuleSpec, lambda_mob: float, zlb_weight: float = 0.0,
                  experiment: Optional[LocalExperiment] = None, zlb: bool = True,
                  benchmark_weight: Optional[float] = None) -> PolicyEvaluation:
    """
    Evaluates ``rule`` in ``preset`` at ``lambda_mob`` against the panel's planner benchmark.

    ``zlb_weight`` only enters the penalized objective; omega is measured against the benchmark solved at
    ``benchmark_weight`` (the preset's ``benchmark_wr`` by default).

    :raises ConfigurationException: for out-of-bounds coefficients or a rule family the economy cannot carry
    """
    rule.validate(preset.parameters(lambda_mob).mu)
    problem = PolicyProblem(preset, lambda_mob, zlb_weight, benchmark_weight, experiment=experiment)
    evaluation = problem.evaluate(rule, zlb=zlb)
    log_message("%s at lambda=%s: %s welfare %.8f, 100*omega %.6f", log, rule.family.value,
                lambda_label(problem.lambda_mob), evaluation.verdict.value, evaluation.objective,
                evaluation.omega100)
    return evaluation
