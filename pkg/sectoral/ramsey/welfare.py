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

from dataclasses import dataclass
from typing import Dict, Optional

from ..exceptions import SolutionException
from ..model.system import ResidualSystem, policy_free
from ..perturbation import (
    SecondOrderSolution,
    WelfareMean,
    linearize,
    solve_first_order,
    solve_second_order,
    welfare_mean,
)
from ..timer import Timer
from ..utils import get_logger, log_message
from .steady import RamseySteadyState, solve_ramsey_steady
from .system import RamseySystem, build_ramsey_system

log = get_logger(__name__)


@dataclass(frozen=True)
class RamseyBenchmark:
    """
    Planner steady state, second-order solution and welfare of one economy and penalty weight.
    """

    system: RamseySystem
    steady: RamseySteadyState
    solution: SecondOrderSolution
    welfare: WelfareMean
    seconds: float = 0.0

    def summary(self) -> Dict[str, object]:
        """Plain-data view: welfare pair, steady levels and the headline steady numbers."""
        return {
            "key": self.system.structural_key(),
            "zlb_weight": self.system.zlb_weight,
            "welfare": self.welfare.with_penalty,
            "welfare_no_penalty": self.welfare.without_penalty,
            "annual_inflation": self.steady.annual_inflation,
            "levels": self.steady.steady.as_dict(),
            "seconds": self.seconds,
        }


def ramsey_solution(rs: RamseySystem, ss: RamseySteadyState) -> SecondOrderSolution:
    """
    Second-order solution of the planner problem around its steady state.

    :raises SolutionException: when the planner system is not determinate
    """
    first = solve_first_order(linearize(rs, ss.steady))
    if not first.is_determinate:
        raise SolutionException(f"Planner system is {first.verdict.value}: {first.reason}")
    return solve_second_order(first)


def ramsey_welfare(rs: RamseySystem, ss: RamseySteadyState,
                   solution: Optional[SecondOrderSolution] = None) -> WelfareMean:
    """
    Conditional second-order welfare at the planner's steady state, with and without the interest-rate penalty.
    """
    solution = solution or ramsey_solution(rs, ss)
    return welfare_mean(solution)


def ramsey_benchmark(system: ResidualSystem, zlb_weight: Optional[float] = None) -> RamseyBenchmark:
    """
    Builds, solves and evaluates the planner problem of ``system``'s economy (its rule is ignored).
    """
    with Timer() as timer:
        rs = build_ramsey_system(policy_free(system) if system.has_rule else system, zlb_weight)
        ss = solve_ramsey_steady(rs)
        solution = ramsey_solution(rs, ss)
        welfare = welfare_mean(solution)
    log_message("Planner benchmark w_r=%g: welfare %.8f (no penalty %.8f) in %.1fs", log, rs.zlb_weight,
                welfare.with_penalty, welfare.without_penalty, timer.interval)
    return RamseyBenchmark(rs, ss, solution, welfare, timer.interval)
