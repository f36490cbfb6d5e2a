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
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import qmc

from ..env import SectoralEnv
from ..exceptions import OptimizationException
from ..rules import PolicyRuleSpec, RuleFamily
from ..timer import Timer
from ..utils import get_logger, log_message
from .evaluate import PolicyEvaluation, PolicyProblem
from .presets import lambda_label

log = get_logger(__name__)

SOBOL_M = 5
REFINED_STARTS = 4
XATOL = 1e-4
FATOL = 1e-10
MAX_EVALUATIONS = 400
TIE_TOL = 1e-10
ALPHAS = ("alpha_pi", "alpha_y", "alpha_dy", "alpha_w")


def sobol_starts(bounds: np.ndarray, m: int = SOBOL_M, seed: int = 0) -> np.ndarray:
    """
    ``2**m`` scrambled Sobol points scaled to the box ``bounds`` (shape ``(k, 2)``).
    """
    sampler = qmc.Sobol(d=bounds.shape[0], scramble=True, seed=seed)
    return qmc.scale(sampler.random_base2(m=m), bounds[:, 0], bounds[:, 1])


def tie_break_key(rule: PolicyRuleSpec) -> Tuple[float, ...]:
    """Absolute response coefficients in ``ALPHAS`` order, compared lexicographically among near-ties."""
    return tuple(abs(float(getattr(rule, name))) for name in ALPHAS)


class _Search:
    """
    Memoized objective over the free coefficients of a base rule. Values are negated penalized welfare so that
    infeasible rules map to ``+inf``.
    """

    def __init__(self, problem: PolicyProblem, base: PolicyRuleSpec, names: Sequence[str]):
        self.problem = problem
        self.base = base
        self.names = tuple(names)
        self.bounds = base.bounds(self.names)
        self._memo: Dict[Tuple[float, ...], PolicyEvaluation] = {}
        self._lock = threading.Lock()

    def rule(self, x) -> PolicyRuleSpec:
        x = np.clip(np.asarray(x, dtype=float), self.bounds[:, 0], self.bounds[:, 1])
        return self.base.with_vector(x, self.names)

    def evaluate(self, x) -> PolicyEvaluation:
        rule = self.rule(x)
        key = tuple(np.round(rule.vector(self.names), 12))
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        evaluation = self.problem.evaluate(rule)
        with self._lock:
            self._memo[key] = evaluation
        return evaluation

    def __call__(self, x) -> float:
        return -self.evaluate(x).objective

    @property
    def evaluations(self) -> int:
        return len(self._memo)

    def best(self) -> Optional[PolicyEvaluation]:
        """Best feasible evaluation so far; near-ties go to the lexicographically smallest absolute response coefficients."""
        with self._lock:
            feasible = [ev for ev in self._memo.values() if ev.feasible]
        if not feasible:
            return None
        top = max(ev.objective for ev in feasible)
        ties = [ev for ev in feasible if ev.objective >= top - TIE_TOL * max(1.0, abs(top))]
        return min(ties, key=lambda ev: tie_break_key(ev.rule))


def _nelder_mead(search: _Search, x0: np.ndarray, max_evaluations: int) -> np.ndarray:
    result = minimize(search, x0, method="Nelder-Mead", bounds=search.bounds,
                      options={"xatol": XATOL, "fatol": FATOL, "maxfev": max_evaluations, "adaptive": True})
    return np.clip(result.x, search.bounds[:, 0], search.bounds[:, 1])


def _coordinate_polish(search: _Search, x: np.ndarray, sweeps: int = 2) -> np.ndarray:
    x = np.array(x, dtype=float)
    for _ in range(sweeps):
        moved = False
        for i, (low, high) in enumerate(search.bounds):
            def along(value, i=i):
                trial = x.copy()
                trial[i] = value
                return search(trial)

            result = minimize_scalar(along, bounds=(low, high), method="bounded", options={"xatol": XATOL})
            if result.fun < search(x) - FATOL:
                x[i] = result.x
                moved = True
        if not moved:
            break
    return x


def optimize_rule(problem: PolicyProblem, family: Optional[RuleFamily] = None,
                  names: Optional[Sequence[str]] = None, base_rule: Optional[PolicyRuleSpec] = None,
                  seed: int = 0, sobol_m: int = SOBOL_M, refined: int = REFINED_STARTS,
                  max_evaluations: int = MAX_EVALUATIONS, threads: Optional[int] = None,
                  zlb: bool = True) -> PolicyEvaluation:
    """
    Searches the rule coefficients that maximize penalized welfare.

    Every Sobol start (plus the base rule) is evaluated in parallel, the best ``refined`` feasible starts are
    refined by bounded Nelder-Mead, and the winner gets a coordinate-wise polish. The optimum is re-evaluated with
    a tight steady-state tolerance and, when ``zlb`` is set, its Pr(ZLB) is simulated.

    :param problem: panel, labor mobility and penalty weight
    :param family: rule family; the preset's by default
    :param names: coefficients to search; the family's active set by default
    :param base_rule: values of the coefficients held fixed
    :raises OptimizationException: when every start is infeasible
    """
    base = base_rule or PolicyRuleSpec(family=RuleFamily.parse(family or problem.preset.family))
    if family is not None and base.family != RuleFamily.parse(family):
        base = replace(base, family=RuleFamily.parse(family))
    names = tuple(names or base.active)
    base.validate(problem.params.mu)
    search = _Search(problem, base, names)
    threads = threads or SectoralEnv.get_threads()

    with Timer() as timer:
        starts = np.vstack([base.clip().vector(names)[None, :], sobol_starts(search.bounds, sobol_m, seed)])
        with ThreadPoolExecutor(max_workers=threads) as pool:
            screened = list(pool.map(search.evaluate, starts))
        order = sorted((i for i, ev in enumerate(screened) if ev.feasible),
                       key=lambda i: (-screened[i].objective, i))
        if not order:
            raise OptimizationException(
                f"No feasible rule among {len(starts)} starts for {problem!r}"
            )
        log_message("%s: %d of %d starts feasible, best welfare %.8f", log, problem, len(order), len(starts),
                    screened[order[0]].objective)
        chosen = [starts[i] for i in order[:refined]]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda x0: _nelder_mead(search, x0, max_evaluations), chosen))
        best = search.best()
        _coordinate_polish(search, best.rule.vector(names))
        best = search.best()
        final = problem.evaluate(best.rule, zlb=zlb, tight=True)
        if not final.feasible:
            final = best
    log_message("%s optimum after %d evaluations in %.1fs: %s, 100*omega %.6f, Pr(ZLB) %s", log, problem,
                search.evaluations, timer.interval, {k: round(v, 4) for k, v in zip(names, final.rule.vector(names))},
                final.omega100, final.pr_zlb)
    if final.taylor_principle is False:
        log_message("Optimum at lambda=%s violates the Taylor principle (gamma_pi=%.4f)", log,
                    lambda_label(problem.lambda_mob), final.gamma_pi, level=logging.WARNING)
    return final


def optimize_preset_rule(problem: PolicyProblem, **kwargs) -> PolicyEvaluation:
    """
    Optimizes the coefficients the preset frees, starting from and holding the rest at its initial rule.
    """
    preset = problem.preset
    base = preset.initial_rule()
    return optimize_rule(problem, family=base.family, names=preset.free_coefficients(), base_rule=base, **kwargs)


def is_optimum_stable(problem: PolicyProblem, evaluation: PolicyEvaluation, names: Sequence[str] = None,
                      tol: float = 1e-8) -> bool:
    """
    Re-runs the local search from ``evaluation`` and checks that welfare moves by less than ``tol``.
    """
    names = tuple(names or evaluation.rule.active)
    search = _Search(problem, evaluation.rule, names)
    x = _nelder_mead(search, evaluation.rule.vector(names), MAX_EVALUATIONS)
    again = search.best() or search.evaluate(x)
    return math.isfinite(again.objective) and abs(again.objective - evaluation.objective) < tol
