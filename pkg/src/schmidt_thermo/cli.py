"""Command-line runner: ``schmidt-thermo {run,verify,models,probe-gauge}``.

Exit status: 0 when every non-skipped check passes, 1 when a check fails
or the pipeline cannot complete, 2 for usage and scenario errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .model import MODEL_SUMMARIES, ModelError, Scenario, ScenarioError, builtin_model, initial_energy, load_scenario
from .numerics import TOL, PreconditionError
from .schmidt import GaugeAlignmentError, schmidt_trajectory
from .evolution import propagate
from .verification import Simulation, residual_series, simulate, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", nargs="?", help="scenario file (YAML or JSON)")
    p.add_argument("--model", help="builtin model instead of a scenario file (see `models`)")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-max", type=float, help="final time")
    p.add_argument("--mc-samples", type=int, help="Monte-Carlo samples per Haar average")
    p.add_argument("--seed", type=int, help="master seed for Monte-Carlo checks")
    p.add_argument("--eps-rank", type=float, default=TOL.eps_rank, help="Schmidt-rank threshold on s^2")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--no-refine", action="store_true", help="skip the dt/2 convergence run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schmidt-thermo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    run = sub.add_parser("run", help="full pipeline: series files and verification report")
    _add_common(run)
    ver = sub.add_parser("verify", help="checks only; report to stdout or --out")
    _add_common(ver)
    sub.add_parser("models", help="list builtin models")
    probe = sub.add_parser("probe-gauge", help="Schmidt alignment diagnostics")
    _add_common(probe)
    return parser


def resolve_scenario(args) -> Scenario:
    """Scenario from file or ``--model``, with command-line flags taking precedence."""
    if args.scenario and args.model:
        raise ScenarioError("give either a scenario file or --model, not both")
    if args.scenario:
        sc = load_scenario(args.scenario)
    elif args.model:
        try:
            sc = Scenario(builtin_model(args.model), name=args.model.upper())
        except ModelError as exc:
            raise ScenarioError(str(exc)) from None
    else:
        raise ScenarioError("no scenario: pass a scenario file or --model NAME")
    overrides = {"dt": args.dt, "t_max": args.t_max, "mc_samples": args.mc_samples, "seed": args.seed}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(sc, **overrides) if overrides else sc


def _write_csv(path: Path, columns: list[str], data: np.ndarray) -> None:
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(columns), comments="")


def write_series(sim: Simulation, out: Path, families, series: dict | None = None) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    t = sim.st.times
    th = sim.thermo
    written = []
    if "schmidt" in families:
        r = sim.st.s.shape[1]
        cols = ["t"] + [f"s2_{l}" for l in range(r)] + ["M"]
        _write_csv(out / "schmidt.csv", cols, np.column_stack([t, sim.st.s**2, sim.st.M]))
        written.append(out / "schmidt.csv")
    if "energy" in families:
        e0 = np.full_like(t, initial_energy(sim.spec))
        cols = ["t", "E1", "E2", "E1_plus_E2", "H0", "E1_canonical", "E2_canonical"]
        data = np.column_stack([t, th.E[1], th.E[2], th.E[1] + th.E[2], e0, th.E_can[1], th.E_can[2]])
        _write_csv(out / "energy.csv", cols, data)
        written.append(out / "energy.csv")
    if "thermo" in families:
        cols = ["t", "dQ1", "dW1", "dQ2", "dW2", "Q1", "W1", "Q2", "W2", "dQ_F1", "dQ_F2", "dQ_int", "dW_int",
                "dQ1_canonical", "dW1_canonical", "dQ2_canonical", "dW2_canonical", "free_drift"]
        data = np.column_stack([
            t, th.dQ[1], th.dW[1], th.dQ[2], th.dW[2], th.Q[1], th.W[1], th.Q[2], th.W[2],
            th.dQ_F[1], th.dQ_F[2], th.dQ_int, th.dW_int,
            th.dQ_can[1], th.dW_can[1], th.dQ_can[2], th.dW_can[2], th.free_drift,
        ])
        _write_csv(out / "thermo.csv", cols, data)
        written.append(out / "thermo.csv")
    if "residuals" in families:
        series = residual_series(sim) if series is None else series
        cols = ["t", "master_eq_1", "master_eq_2", "generator_equiv_1", "generator_equiv_2"]
        data = np.column_stack([t] + [series[c] for c in cols[1:]])
        _write_csv(out / "residuals.csv", cols, data)
        written.append(out / "residuals.csv")
    return written


def cmd_models(args) -> int:
    for name, summary in MODEL_SUMMARIES.items():
        print(f"{name:10s} {summary}")
    return EXIT_OK


def cmd_probe(args) -> int:
    sc = resolve_scenario(args)
    traj = propagate(sc.system, sc.t_max, sc.dt)
    diag = schmidt_trajectory(traj, eps_rank=args.eps_rank).diagnostics()
    diag = {"model": sc.system.name, "dt": sc.dt, "t_max": sc.t_max, **diag}
    text = json.dumps(diag, indent=2)
    print(text)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "gauge.json").write_text(text + "\n")
    return EXIT_OK


def cmd_verify(args, write: bool) -> int:
    sc = resolve_scenario(args)
    sim = simulate(sc.system, sc.t_max, sc.dt, args.eps_rank)
    series = residual_series(sim)
    if write:
        out = args.out or Path("out") / sc.name
        for path in write_series(sim, out, sc.outputs, series):
            print(f"wrote {path}")
    report = verify(sc, args.eps_rank, sim=sim, refine=not args.no_refine, series=series)
    print(report.format_table())
    if args.out or write:
        out = args.out or Path("out") / sc.name
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json() + "\n")
        print(f"wrote {out / 'report.json'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "models":
            return cmd_models(args)
        if args.command == "probe-gauge":
            return cmd_probe(args)
        return cmd_verify(args, write=args.command == "run")
    except (ScenarioError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GaugeAlignmentError as exc:
        print(f"pipeline failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
