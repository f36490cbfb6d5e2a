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

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .__version__ import __version__
from .diagnostics import immobile_wage_gap, loglinear_check, solve_economy
from .env import SectoralEnv
from .estimation import (
    EstimationModel,
    LogPosterior,
    observables_matrix,
    posterior_summary,
    prepare_observables,
    rwmh_sample,
    simulate_observables,
)
from .estimation.data import BASE_PERIOD
from .exceptions import ConfigurationException, DataRequired, NumericalException, SectoralException, error_report
from .experiment import LocalExperiment
from .model import VariantKind, build_model, solve_steady_state
from .perturbation import impulse_response, simulate
from .policy import (
    PolicyProblem,
    get_preset,
    lambda_label,
    load_presets,
    optimize_rule,
    parse_lambda,
    run_preset_table,
    run_table,
    tau_lambda_curve,
)
from .policy.evaluate import BENCHMARK_EXPERIMENT
from .properties import PropertyManager
from .rules import PolicyRuleSpec, RuleFamily, estimated_rule
from .utils import get_logger, json_str, log_message, to_builtin

log = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("steady", "solve", "irf", "simulate", "optimize", "curve", "table", "estimate", "check", "presets")
ESTIMATED = ("lambda_mob", "theta_c", "theta_d")
MANIFEST = "manifest.json"
RULE_COEFFICIENTS = ("rho_r", "alpha_pi", "alpha_y", "alpha_dy", "alpha_w", "tau")


@dataclass
class RunConfig:
    # pylint: disable=too-many-instance-attributes
    """
    Fully resolved options of one command. Every manifest echoes it; ``--config <manifest>`` reloads it.
    """

    command: str = ""
    preset: str = "symmetric"
    lambda_mob: Optional[str] = None
    mu: Optional[float] = None
    rule: Optional[str] = None
    coefs: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    out: str = "sectoral-out"
    home: Optional[str] = None
    threads: Optional[int] = None
    order: int = 1
    horizon: int = 40
    periods: Optional[int] = None
    shocks: Optional[List[str]] = None
    tol: Optional[float] = None
    zlb_weight: Optional[float] = None
    zlb_periods: Optional[int] = None
    name: Optional[str] = None
    lambdas: Optional[List[str]] = None
    data: Optional[str] = None
    raw: Optional[str] = None
    base_period: str = BASE_PERIOD
    synthetic: bool = False
    draws: int = 20000
    chains: int = 2
    adapt: int = 2000
    params: List[str] = field(default_factory=lambda: list(ESTIMATED))

    @classmethod
    def allowed(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """
        Merges a ``--config`` file (a manifest or a plain mapping) with the flags given on the command line;
        flags win.

        :raises ConfigurationException: for unknown keys or a file written by another command
        """
        given = {k: v for k, v in vars(args).items() if k != "config"}
        doc = {}
        config_file = getattr(args, "config", None)
        if config_file:
            try:
                mgr = PropertyManager.from_file(config_file)
            except FileNotFoundError as exc:
                raise ConfigurationException(str(exc)) from exc
            doc = mgr.get("config") if mgr.is_key("config") else mgr.get_all()
            doc = doc or {}
        PropertyManager(doc).validate(cls.allowed())
        if doc.get("command") not in (None, "", given["command"]):
            raise ConfigurationException(
                f"{config_file} configures {doc['command']}, not {given['command']}"
            )
        merged = {**doc, **given}
        merged["coefs"] = _coefficients(merged.get("coefs") or {})
        return cls(**merged).validate()

    def validate(self) -> "RunConfig":
        """
        :raises ConfigurationException: for values outside their domain
        """
        if self.command not in COMMANDS:
            raise ConfigurationException(f"Unknown command {self.command}")
        if self.order not in (1, 2):
            raise ConfigurationException("--order must be 1 or 2")
        if self.seed < 0 or self.horizon < 1 or self.draws < 1 or self.chains < 1 or self.adapt < 0:
            raise ConfigurationException("seed, horizon, draws, chains and adapt must be non-negative counts")
        if self.periods is not None and self.periods < 1:
            raise ConfigurationException("--periods must be positive")
        if self.lambda_mob is not None and self.mu is not None:
            raise ConfigurationException("Give either --lambda or --mu")
        if self.lambda_mob is not None:
            parse_lambda(self.lambda_mob)
        if self.zlb_weight is not None and self.zlb_weight < 0.0:
            raise ConfigurationException("--wr must be non-negative")
        return self

    def to_dict(self) -> Dict[str, object]:
        return to_builtin(asdict(self))


def _coefficients(values) -> Dict[str, float]:
    if isinstance(values, dict):
        pairs = values.items()
    else:
        pairs = []
        for item in values:
            name, sep, value = str(item).partition("=")
            if not sep:
                raise ConfigurationException(f"Coefficient {item} is not of the form name=value")
            pairs.append((name.strip(), value))
    out = {}
    for name, value in pairs:
        if name not in RULE_COEFFICIENTS:
            raise ConfigurationException(f"Unknown rule coefficient {name}; use one of {', '.join(RULE_COEFFICIENTS)}")
        try:
            out[name] = float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigurationException(f"Coefficient {name} must be a number, got {value}") from exc
    return out


class _Parser(argparse.ArgumentParser):
    """Raises on bad arguments so the error reaches the JSON error report."""

    def error(self, message):
        raise ConfigurationException(message)


def build_parser() -> argparse.ArgumentParser:
    """Command-line parser; options left out on the command line are absent from the namespace."""
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="YAML or JSON run configuration, e.g. a manifest of an earlier run")
    common.add_argument("--preset", help="experiment preset or alias (default: symmetric)")
    common.add_argument("--lambda", dest="lambda_mob", help="labor mobility, a positive number or inf")
    common.add_argument("--mu", type=float, help="inverse labor mobility, instead of --lambda")
    common.add_argument("--rule", help="rule family, or 'estimated' for the estimated rule")
    common.add_argument("--coef", dest="coefs", action="append", metavar="NAME=VALUE",
                        help="rule coefficient override, repeatable")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (default: sectoral-out)")
    common.add_argument("--home", help="experiment store (default: $SECTORAL_HOME or ~/.sectoral)")
    common.add_argument("--threads", type=int, help="worker threads (default: $SECTORAL_THREADS)")
    common.add_argument("--wr", dest="zlb_weight", type=float,
                        help="interest-rate penalty weight; calibrated to Pr(ZLB) < 1%% when omitted")
    common.add_argument("--zlb-periods", dest="zlb_periods", type=int, help="periods simulated for Pr(ZLB)")
    common.add_argument("--tol", type=float, help="steady-state tolerance")

    parser = _Parser(prog="sectoral", description="Two-sector New Keynesian policy toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        return sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS, help=help_text)

    command("steady", "steady-state levels and report")
    solve = command("solve", "eigenvalues and determinacy verdict")
    solve.add_argument("--order", type=int, choices=(1, 2))
    irf = command("irf", "impulse responses, one CSV per shock")
    irf.add_argument("--order", type=int, choices=(1, 2))
    irf.add_argument("--horizon", type=int)
    irf.add_argument("--shocks", nargs="+")
    sim = command("simulate", "simulated paths")
    sim.add_argument("--order", type=int, choices=(1, 2))
    sim.add_argument("--periods", type=int)
    command("optimize", "optimal simple rule at one labor mobility")
    curve = command("curve", "optimal tau over labor mobility")
    curve.add_argument("--lambdas", nargs="+")
    table = command("table", "every panel of a published table")
    table.add_argument("--name")
    est = command("estimate", "posterior sampling of the fully-fledged model")
    est.add_argument("--data", help="CSV of prepared observables")
    est.add_argument("--raw", help="CSV of raw series to transform into observables")
    est.add_argument("--base-period", dest="base_period")
    est.add_argument("--synthetic", action="store_true", help="simulate data at the posterior means")
    est.add_argument("--periods", type=int, help="synthetic sample length (default: 500)")
    est.add_argument("--draws", type=int)
    est.add_argument("--chains", type=int)
    est.add_argument("--adapt", type=int)
    est.add_argument("--params", nargs="+", help="estimated parameters (default: lambda_mob theta_c theta_d)")
    check = command("check", "closed-form oracles and the full-depreciation reduction")
    check.add_argument("--periods", type=int)
    command("presets", "list presets")
    return parser


class CommandContext:
    """Output directory, run record and the resolved preset of one command."""

    def __init__(self, config: RunConfig, run):
        self.config = config
        self.run = run
        self.out = Path(config.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: List[str] = []
        self.home = config.home or str(SectoralEnv.get_home())
        self.threads = config.threads or SectoralEnv.get_threads()

    @property
    def preset(self):
        return get_preset(self.config.preset)

    @property
    def lambda_mob(self) -> Optional[float]:
        if self.config.lambda_mob is None:
            return None
        return parse_lambda(self.config.lambda_mob)

    def params(self):
        params = self.preset.parameters(self.lambda_mob)
        if self.config.mu is not None:
            params = params.replace(mu=self.config.mu).validate()
        return params

    def rule(self, default: Optional[PolicyRuleSpec] = None) -> PolicyRuleSpec:
        """Rule from ``--rule`` and ``--coef``, starting from the preset's."""
        name = self.config.rule
        if name is None:
            rule = default or self.preset.initial_rule()
        elif name == "estimated":
            rule = estimated_rule()
        else:
            rule = PolicyRuleSpec(family=RuleFamily.parse(name))
        if self.config.coefs:
            rule = rule.with_vector(list(self.config.coefs.values()), list(self.config.coefs))
        return rule

    def system(self, rule: Optional[PolicyRuleSpec] = None):
        params = self.params()
        rule = rule or self.rule()
        rule.validate(params.mu)
        return build_model(self.preset.variant(rule, self.config.zlb_weight or 0.0), params)

    def solved(self, order: Optional[int] = None):
        return solve_economy(self.system(), order or self.config.order, self.config.tol)

    def benchmarks(self) -> LocalExperiment:
        return LocalExperiment(BENCHMARK_EXPERIMENT, basedir=self.home)

    def optimizer(self) -> Dict[str, object]:
        out = {"threads": self.threads}
        if self.config.zlb_periods is not None:
            out["zlb_periods"] = self.config.zlb_periods
        return out

    def write_csv(self, frame: pd.DataFrame, name: str, index: bool = False) -> Path:
        path = self.out / name
        frame.to_csv(path, index=index)
        self.files.append(name)
        log_message("Wrote %s", log, path)
        return path

    def write_json(self, doc, name: str) -> Path:
        path = self.out / name
        path.write_text(json.dumps(to_builtin(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.files.append(name)
        log_message("Wrote %s", log, path)
        return path


def cmd_steady(ctx: CommandContext) -> int:
    """Steady-state levels of every variable and the report of derived scalars."""
    system = ctx.system()
    steady = solve_steady_state(system) if ctx.config.tol is None else solve_steady_state(system, tol=ctx.config.tol)
    frame = pd.DataFrame({"variable": list(steady.names), "level": steady.values})
    ctx.write_csv(frame, "steady.csv")
    report = steady.report()
    ctx.write_json(report, "steady.json")
    ctx.run.log_metrics({"R": report.get("R"), "residual": report["residual"]})
    return EXIT_OK


def cmd_solve(ctx: CommandContext) -> int:
    """Generalized eigenvalues and the determinacy verdict; indeterminate rules are reported, not raised."""
    solved = solve_economy(ctx.system(), ctx.config.order, ctx.config.tol, require_determinate=False)
    first = solved.first
    moduli = np.asarray(first.eigenvalues, dtype=float)
    ctx.write_csv(pd.DataFrame({"modulus": moduli, "stable": moduli < 1.0}), "eigenvalues.csv")
    report = {
        "verdict": first.verdict.value,
        "reason": first.reason,
        "states": list(first.states),
        "n_stable": first.n_stable,
        "spectral_radius": first.spectral_radius if first.is_determinate else None,
        "residual": first.residual,
        "order": solved.order,
    }
    ctx.write_json(report, "solution.json")
    ctx.run.log_metric("determinate", first.is_determinate)
    return EXIT_OK


def cmd_irf(ctx: CommandContext) -> int:
    """Impulse responses in long format, one CSV per shock."""
    solved = ctx.solved()
    shocks = ctx.config.shocks or list(solved.system.shocks)
    variables = list(solved.system.economy_names)
    for shock in shocks:
        response = impulse_response(solved.solution, shock, horizon=ctx.config.horizon, variables=variables,
                                    seed=ctx.config.seed)
        ctx.write_csv(response.to_long(), f"irf_{shock}.csv")
    return EXIT_OK


def cmd_simulate(ctx: CommandContext) -> int:
    """Simulated paths in percent deviations, long format."""
    solved = ctx.solved()
    paths = simulate(solved.solution, ctx.config.periods or 200, seed=ctx.config.seed,
                     variables=list(solved.system.economy_names))
    paths.index.name = "t"
    long = paths.reset_index().melt(id_vars="t", var_name="variable", value_name="value")
    ctx.write_csv(long, "simulation.csv")
    return EXIT_OK


def _lambda(ctx: CommandContext) -> float:
    return ctx.lambda_mob if ctx.lambda_mob is not None else ctx.preset.lambdas[0]


def cmd_optimize(ctx: CommandContext) -> int:
    """
    Optimal rule of the preset at one labor mobility. With ``--rule`` the family is overridden and the penalty
    weight is taken as given (zero when ``--wr`` is omitted).
    """
    preset, lambda_mob, config = ctx.preset, _lambda(ctx), ctx.config
    if config.rule is None:
        frame = run_preset_table(preset, [lambda_mob], config.zlb_weight, ctx.benchmarks(), config.seed,
                                 **ctx.optimizer())
    else:
        kwargs = ctx.optimizer()
        zlb_periods = kwargs.pop("zlb_periods", None)
        problem = PolicyProblem(preset, lambda_mob, config.zlb_weight or 0.0, experiment=ctx.benchmarks(),
                                seed=config.seed, **({"zlb_periods": zlb_periods} if zlb_periods else {}))
        evaluation = optimize_rule(problem, base_rule=ctx.rule(), seed=config.seed, **kwargs)
        frame = pd.DataFrame([{"preset": preset.name, "table": preset.table, "panel": preset.panel, "row": "",
                               **evaluation.to_row()}])
    ctx.write_csv(frame, "optimize.csv")
    last = frame.iloc[-1]
    ctx.run.log_metrics({"tau": float(last["tau"]), "omega100": float(last["omega100"]), "w_r": float(last["w_r"])})
    return EXIT_OK


def cmd_curve(ctx: CommandContext) -> int:
    """Optimal tau against labor mobility."""
    config = ctx.config
    frame = tau_lambda_curve(ctx.preset, config.lambdas, config.zlb_weight, ctx.benchmarks(), config.seed,
                             **ctx.optimizer())
    ctx.write_csv(frame, "curve.csv")
    ctx.run.log_metric("monotone", not bool(frame["monotone_violation"].any()))
    return EXIT_OK


def cmd_table(ctx: CommandContext) -> int:
    """Every panel of a published table with the reference values alongside."""
    config = ctx.config
    if not config.name:
        raise ConfigurationException("table needs --name, e.g. table1, table4, table5, tableC1 or tableG3")
    kwargs = ctx.optimizer()
    zlb_periods = kwargs.pop("zlb_periods", None)
    frame = run_table(config.name, reference=True, zlb_weight=config.zlb_weight, experiment=ctx.benchmarks(),
                      seed=config.seed, zlb_periods=zlb_periods, **kwargs)
    ctx.write_csv(frame, f"{config.name}.csv")
    ctx.run.log_metric("rows", len(frame))
    return EXIT_OK


def _estimation_data(ctx: CommandContext, model: EstimationModel) -> np.ndarray:
    config = ctx.config
    if config.data:
        return observables_matrix(pd.read_csv(config.data), model.measurement.observables)
    if config.raw:
        frame = prepare_observables(config.raw, config.base_period)
        ctx.write_csv(frame, "observables.csv")
        return observables_matrix(frame, model.measurement.observables)
    if not config.synthetic:
        raise DataRequired("estimate needs --data, --raw or --synthetic")
    frame = simulate_observables(model.state_space(model.point()), config.periods or 500, seed=config.seed)
    ctx.write_csv(frame, "observables.csv")
    return observables_matrix(frame, model.measurement.observables)


def cmd_estimate(ctx: CommandContext) -> int:
    """Random-walk Metropolis-Hastings draws, posterior summary with 90% intervals and sampler diagnostics."""
    config = ctx.config
    model = EstimationModel(tuple(config.params))
    data = _estimation_data(ctx, model)
    target = LogPosterior(model, data)
    x0 = model.point()
    posterior = rwmh_sample(target, x0, model.names, chains=config.chains, draws=config.draws, seed=config.seed,
                            adapt=config.adapt, threads=ctx.threads)
    summary = posterior_summary(posterior)
    ctx.write_csv(posterior.to_frame(), "draws.csv")
    ctx.write_csv(summary, "posterior.csv", index=True)
    ctx.write_json({
        "names": list(model.names),
        "start": x0,
        "log_posterior_start": target(x0),
        "acceptance": posterior.acceptance,
        "proposal_cov": posterior.proposal_cov,
        "rhat": summary["rhat"].to_dict(),
        "converged": bool(summary["converged"].all()),
        "observations": int(data.shape[0]),
    }, "diagnostics.json")
    ctx.run.log_metrics({"acceptance": float(np.mean(posterior.acceptance)),
                         "max_rhat": float(np.nanmax(summary["rhat"].to_numpy()))})
    return EXIT_OK


def cmd_check(ctx: CommandContext) -> int:
    """Closed-form oracles, exits with the numerical-failure code when they do not hold."""
    system = ctx.system()
    if system.kind == VariantKind.FULLY_FLEDGED:
        raise ConfigurationException("check runs on stylized presets only")
    periods = ctx.config.periods or 1000
    report = loglinear_check(system, periods, ctx.config.seed)
    report["preset"] = ctx.preset.name
    report["lambda"] = lambda_label(ctx.lambda_mob) if ctx.lambda_mob is not None else None
    if system.params.mu == 0.0:
        report["immobile_wage_gap"] = immobile_wage_gap(solve_economy(system).first, periods, ctx.config.seed)
    ctx.write_json(report, "check.json")
    ctx.run.log_metric("passed", report["passed"])
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def cmd_presets(ctx: CommandContext) -> int:
    """Preset listing; names are also printed one per line."""
    frame = pd.DataFrame([p.describe() for p in load_presets().values()])
    frame["lambdas"] = frame["lambdas"].map(" ".join)
    ctx.write_csv(frame, "presets.csv")
    print("\n".join(frame["name"]))
    return EXIT_OK


HANDLERS = {
    "steady": cmd_steady,
    "solve": cmd_solve,
    "irf": cmd_irf,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "curve": cmd_curve,
    "table": cmd_table,
    "estimate": cmd_estimate,
    "check": cmd_check,
    "presets": cmd_presets,
}


def run_command(config: RunConfig) -> int:
    """Runs one command inside a run of the ``cli`` experiment and writes the manifest."""
    home = config.home or str(SectoralEnv.get_home())
    experiment = LocalExperiment("cli", basedir=home)
    with experiment.start_run() as run:
        run.log_params(config.to_dict())
        ctx = CommandContext(config, run)
        code = HANDLERS[config.command](ctx)
        run.set_meta("files", list(ctx.files))
        ctx.write_json({
            "version": __version__,
            "run_id": run.id,
            "exit_code": code,
            "config": config.to_dict(),
            "files": list(ctx.files),
            "metrics": run.metrics,
        }, MANIFEST)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point. Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 anything else; failures
    print a JSON error report on stdout.
    """
    try:
        args = build_parser().parse_args(argv)
        return run_command(RunConfig.from_args(args))
    except ConfigurationException as exc:
        code = EXIT_CONFIG
        report = error_report(exc)
    except NumericalException as exc:
        code = EXIT_NUMERICAL
        report = error_report(exc)
    except SectoralException as exc:
        code = EXIT_FAILURE
        report = error_report(exc)
    log_message("%s: %s", log, report["code"], report["message"], level=logging.ERROR)
    print(json_str(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
