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
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..exceptions import ConfigurationException, PresetNotFound
from ..experiment import LocalExperiment
from ..rules import PolicyRuleSpec, estimated_rule
from ..utils import get_logger, log_message
from .evaluate import ZLB_LIMIT, PolicyEvaluation, PolicyProblem
from .optimize import optimize_preset_rule, optimize_rule
from .presets import ExperimentPreset, lambda_label, load_presets, parse_lambda

log = get_logger(__name__)

WR_GRID = tuple(float(w) for w in range(0, 85, 5))
MONOTONE_TOL = 0.02


@dataclass(frozen=True)
class ZlbCalibration:
    """
    Outcome of the penalty-weight search: the weight, the rule optimized under it and every grid step tried.
    """

    weight: float
    evaluation: PolicyEvaluation
    satisfied: bool
    trail: Tuple[Dict[str, float], ...] = field(default_factory=tuple)


def calibrate_wr(problem: PolicyProblem, rule: Optional[PolicyRuleSpec] = None, grid: Sequence[float] = WR_GRID,
                 **optimizer) -> ZlbCalibration:
    """
    Smallest penalty weight on ``grid`` whose optimized rule keeps Pr(ZLB) below one percent.

    With ``rule`` given the rule is held fixed instead of re-optimized at each weight. When no weight on the grid
    meets the target the largest one is reported with ``satisfied=False``.
    Every candidate is compared with the planner benchmark of ``problem``, so omega along the trail and in the
    reported row share one reference.
    """
    trail = []
    evaluation = None
    weight = None
    for weight in sorted(float(w) for w in grid):
        candidate = problem.with_zlb_weight(weight)
        if rule is None:
            evaluation = optimize_preset_rule(candidate, zlb=True, **optimizer)
        else:
            evaluation = candidate.evaluate(rule, zlb=True)
        share = evaluation.pr_zlb if evaluation.feasible else 1.0
        trail.append({"w_r": weight, "pr_zlb": share, "welfare": evaluation.objective,
                      "omega100": evaluation.omega100})
        log_message("%s: w_r=%g gives Pr(ZLB)=%.4f", log, problem, weight, share)
        if share < ZLB_LIMIT:
            return ZlbCalibration(weight, evaluation, True, tuple(trail))
    if weight is None:
        raise ConfigurationException("The penalty-weight grid is empty")
    log_message("%s: no w_r on the grid keeps Pr(ZLB) below %.2f, reporting w_r=%g", log, problem, ZLB_LIMIT,
                weight, level=logging.WARNING)
    return ZlbCalibration(weight, evaluation, False, tuple(trail))


def monotone_violations(taus: Sequence[float], tol: float = MONOTONE_TOL) -> List[int]:
    """Positions where tau rises by more than ``tol`` over the previous entry (ordered by increasing mobility)."""
    return [i for i in range(1, len(taus)) if taus[i] > taus[i - 1] + tol]


def _problem(preset: ExperimentPreset, lambda_mob: float, zlb_weight: Optional[float],
             experiment: Optional[LocalExperiment], seed: int, zlb_periods: Optional[int], **optimizer):
    kwargs = {} if zlb_periods is None else {"zlb_periods": zlb_periods}
    problem = PolicyProblem(preset, lambda_mob, zlb_weight or 0.0, experiment=experiment, seed=seed, **kwargs)
    if zlb_weight is not None:
        return problem, None
    calibration = calibrate_wr(problem, seed=seed, **optimizer)
    return problem.with_zlb_weight(calibration.weight), calibration


def _optimum(problem: PolicyProblem, calibration: Optional[ZlbCalibration], seed: int, **optimizer):
    if calibration is not None and calibration.evaluation.feasible:
        return problem.evaluate(calibration.evaluation.rule, zlb=True, tight=True)
    return optimize_preset_rule(problem, seed=seed, **optimizer)


def _sorted_lambdas(lambdas: Sequence) -> Tuple[float, ...]:
    return tuple(sorted({parse_lambda(v) for v in lambdas}))


def tau_lambda_curve(preset: ExperimentPreset, lambdas: Sequence = None, zlb_weight: Optional[float] = 0.0,
                     experiment: Optional[LocalExperiment] = None, seed: int = 0,
                     zlb_periods: Optional[int] = None, **optimizer) -> pd.DataFrame:
    """
    Optimal weight on sector-D inflation over a labor-mobility grid, ``inf`` (perfect mobility) last.

    The ``monotone_violation`` column flags rows where tau rises by more than 0.02 as mobility increases.

    :param zlb_weight: fixed penalty weight; calibrated per point when ``None``
    """
    grid = _sorted_lambdas(lambdas or preset.lambdas)
    rows = []
    for lambda_mob in grid:
        problem, calibration = _problem(preset, lambda_mob, zlb_weight, experiment, seed, zlb_periods, **optimizer)
        evaluation = _optimum(problem, calibration, seed, **optimizer)
        rows.append({"lambda": lambda_label(lambda_mob), "tau": evaluation.rule.tau,
                     "omega100": evaluation.omega100, "w_r": evaluation.zlb_weight, "pr_zlb": evaluation.pr_zlb})
    frame = pd.DataFrame(rows)
    flagged = set(monotone_violations(frame["tau"].tolist()))
    frame["monotone_violation"] = [i in flagged for i in range(len(frame))]
    if flagged:
        log_message("%s: tau rises with mobility at lambda %s", log, preset.name,
                    ", ".join(frame.loc[sorted(flagged), "lambda"]), level=logging.WARNING)
    return frame


def _row(preset: ExperimentPreset, evaluation: PolicyEvaluation, label: str = "") -> Dict[str, object]:
    row = {"preset": preset.name, "table": preset.table, "panel": preset.panel, "row": label}
    row.update(evaluation.to_row())
    return row


def relative_loss(omega_a: float, omega_b: float) -> float:
    """Percent change of the welfare loss from row A to row B, ``100 (omega_B - omega_A) / omega_A``."""
    if omega_a == 0.0 or not (math.isfinite(omega_a) and math.isfinite(omega_b)):
        return math.nan
    return 100.0 * (omega_b - omega_a) / omega_a


def run_preset_table(preset: ExperimentPreset, lambdas: Sequence = None, zlb_weight: Optional[float] = None,
                     experiment: Optional[LocalExperiment] = None, seed: int = 0,
                     zlb_periods: Optional[int] = None, **optimizer) -> pd.DataFrame:
    """
    Rows of one panel, laid out like the published table: one row per labor mobility with every rule coefficient,
    tau and ``100*omega``; paired A/B rows and the ``relative_loss`` column for the Table-5 modes.

    ``tau-only`` compares the estimated rule (A) with the same rule and an optimized tau (B); ``fix-tau`` compares
    the fully optimized rule (A) with one whose tau is held at the preset value (B).

    :param zlb_weight: fixed penalty weight; calibrated per labor mobility when ``None``
    """
    rows = []
    for lambda_mob in (_sorted_lambdas(lambdas) if lambdas else preset.lambdas):
        problem, calibration = _problem(preset, lambda_mob, zlb_weight, experiment, seed, zlb_periods,
                                        **optimizer)
        if preset.mode == "optimize":
            rows.append(_row(preset, _optimum(problem, calibration, seed, **optimizer)))
            continue
        if preset.mode == "tau-only":
            row_a = problem.evaluate(estimated_rule(), zlb=True, tight=True)
        else:
            full = PolicyRuleSpec(family=preset.family)
            row_a = optimize_rule(problem, base_rule=full, seed=seed, **optimizer)
        row_b = _optimum(problem, calibration, seed, **optimizer)
        loss = relative_loss(row_a.omega100, row_b.omega100)
        rows.append({**_row(preset, row_a, "A"), "relative_loss": math.nan})
        rows.append({**_row(preset, row_b, "B"), "relative_loss": loss})
        log_message("%s at lambda=%s: relative loss change %.2f%%", log, preset.name, lambda_label(lambda_mob),
                    loss)
    return pd.DataFrame(rows)


def table_presets(name: str, path=None) -> Tuple[ExperimentPreset, ...]:
    """
    Presets of a published table, e.g. ``table1``, ``tableC1`` or ``tableG4``, in registry order.

    :raises PresetNotFound: when no preset belongs to the table
    """
    key = name.lower().replace("table", "", 1).replace(".", "").replace("-", "")
    found = tuple(p for p in load_presets(path).values() if p.table.lower().replace(".", "") == key)
    if not found:
        raise PresetNotFound(f"No presets for table {name}")
    return found


def run_table(name: str, path=None, reference: bool = False, **kwargs) -> pd.DataFrame:
    """Concatenated panels of a published table, joined with each panel's reference rows when ``reference``."""
    frames = []
    for preset in table_presets(name, path):
        frame = run_preset_table(preset, **kwargs)
        frames.append(compare_reference(frame, preset) if reference else frame)
    return pd.concat(frames, ignore_index=True)


def compare_reference(frame: pd.DataFrame, preset: ExperimentPreset) -> pd.DataFrame:
    """
    Joins computed rows with the preset's reference rows on labor mobility (and the A/B label).
    """
    reference = pd.DataFrame([dict(row) for row in preset.reference])
    if reference.empty:
        return frame.copy()
    reference["lambda"] = [lambda_label(parse_lambda(v)) for v in reference["lambda"]]
    if "row" not in reference:
        reference["row"] = ""
    reference = reference.add_prefix("ref_").rename(columns={"ref_lambda": "lambda", "ref_row": "row"})
    merged = frame.merge(reference, on=["lambda", "row"], how="left")
    if "ref_tau" in merged:
        merged["tau_gap"] = merged["tau"] - merged["ref_tau"]
    if "ref_omega100" in merged:
        merged["omega100_gap"] = merged["omega100"] - merged["ref_omega100"]
    return merged


def sigma_sensitivity(preset: ExperimentPreset, lambda_mob: float, rule: PolicyRuleSpec,
                      factors: Sequence[float] = (1.0, 2.0), grid: Sequence[float] = WR_GRID) -> Dict[float, float]:
    """Calibrated penalty weight at a fixed rule when every shock standard deviation is scaled by each factor."""
    out = {}
    for factor in factors:
        problem = PolicyProblem(preset, lambda_mob, params=preset.parameters(lambda_mob).scale_sigma(factor))
        out[float(factor)] = calibrate_wr(problem, rule=rule, grid=grid).weight
    return out
