"""Command-line front end: ``hamlocal {test,sweep,verify,lowerbound}``.

Reports are JSON (``schema: 1``) or CSV, written once at the end.  JSON is
dumped with sorted keys and no timestamps, so equal configurations give
byte-identical files whatever the worker count.

Exit codes: 0 success, 1 an Inconclusive verdict, 2 usage or capability
error, 3 a bound violation found by ``verify`` or ``lowerbound``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from . import harness
from .amplitude import AEConfig, baseline_sample_count, majority_rounds, nonlocal_projection_mass
from .amplitude import qae_grid_size, qae_outcome_law
from .lower_bound import CSV_COLUMNS, ZChainPair, distinguishability_experiment, check_diagonal_pair
from .oracle import AccessFlags, CapabilityError
from .pauli import (
    HamiltonianError,
    HamiltonianSpec,
    distance_to_klocal,
    load_hamiltonian,
    random_pauli_hamiltonian,
    validate_hamiltonian,
    z_chain,
)
from .seeding import generator
from .trotter import TestSpec, exact_tester_report, plan_schedule
from .verdict import Decision
from .verify import run_battery

SCHEMA = 1
EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3

BOUND_FORMULAS = {
    "trotter": {
        "time": "79*sqrt(eps2/(eps2-eps1)^5)*ln(2/delta)",
        "queries": "7850*sqrt(eps2/(eps2-eps1)^7)*ln(2/delta)",
    },
    "ae": {
        "round_time": "sqrt(22)*pi/(eps2-eps1)",
        "round_queries": "3*sqrt(22)*pi*c/(eps2-eps1)^2",
    },
    "baseline": {
        "samples": "ceil((low+(high-low)/3)*2*ln(2/delta)/((high-low)/2)^2)",
    },
}


class UsageError(Exception):
    pass


# -- argument parsing -----------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _add_hamiltonian_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("hamiltonian")
    g.add_argument("--hamiltonian", metavar="PATH",
                   help="Pauli-term file, one '<pauli-word> <coefficient>' per line")
    g.add_argument("--generator", choices=("zchain", "random-pauli"), default="zchain")
    g.add_argument("--n", type=int, default=3, help="qubit count for generators")
    g.add_argument("--zchain-eps", type=float, default=0.6, help="coefficient of the Z chain")
    g.add_argument("--kprime", type=int, default=None, help="Z-chain length (default n)")
    g.add_argument("--terms", type=int, default=6, help="term count for random-pauli")
    g.add_argument("--gen-seed", type=int, default=0, help="seed of the random-pauli generator")
    g.add_argument("--target-norm", type=float, default=1.0, help="spectral norm for random-pauli")


def _add_spec_args(p: argparse.ArgumentParser, *, eps2: bool = True):
    p.add_argument("--eps1", type=float, default=0.0)
    if eps2:
        p.add_argument("--eps2", type=float, default=0.6)
    p.add_argument("--delta", type=float, default=1 / 3)
    p.add_argument("--k", type=int, default=1)


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--output", default="-", help="report path, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamlocal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one tester on one Hamiltonian")
    _add_hamiltonian_args(p)
    _add_spec_args(p)
    p.add_argument("--algorithm", choices=harness.TESTERS, default="trotter")
    p.add_argument("--mode", choices=("montecarlo", "exact"), default="montecarlo")
    p.add_argument("--qae-mode", choices=("kernel", "circuit"), default="kernel")
    p.add_argument("--c", type=float, default=1.0, help="norm-equivalence constant for ae/baseline")
    p.add_argument("--access", default=None,
                   help="comma list of forward,inverse,controlled (default per algorithm)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    _add_output_args(p)

    p = sub.add_parser("sweep", help="time-vs-gap curve on diagonal hard pairs")
    _add_spec_args(p, eps2=False)
    p.add_argument("--eps2-list", type=_float_list, required=True)
    p.add_argument("--algorithm", choices=harness.TESTERS, default="trotter")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--kprime", type=int, default=2)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--sidecar-dir", default=None, help="write one JSON file per gap point here")
    p.add_argument("--output", default="-")
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = sub.add_parser("verify", help="run the bound-check battery")
    p.add_argument("--suite-size", type=int, default=10)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qae-draws", type=int, default=2000)
    p.add_argument("--corrupt-alpha", type=float, default=1.0,
                   help="debug: multiply the step size by this factor (negative control)")
    _add_output_args(p)

    p = sub.add_parser("lowerbound", help="phase-distance checks on diagonal hard pairs")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--kprime", type=int, default=2)
    p.add_argument("--eps-grid", type=_float_list, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--t-grid", type=_float_list, default=[round(0.1 * i, 10) for i in range(1, 31)])
    _add_output_args(p)
    return parser


# -- helpers --------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _resolved(args: argparse.Namespace) -> dict:
    """Config echo; the worker count is left out so reports do not depend on it."""
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("workers", "output")}


def _workers(args) -> int:
    w = args.workers if args.workers is not None else harness.default_workers()
    if w < 1:
        raise UsageError("--workers must be >= 1")
    return w


def resolve_hamiltonian(args) -> HamiltonianSpec:
    if args.hamiltonian:
        return load_hamiltonian(args.hamiltonian)
    if args.generator == "zchain":
        length = args.n if args.kprime is None else args.kprime
        return validate_hamiltonian([(z_chain(args.n, length), args.zchain_eps)])
    return random_pauli_hamiltonian(
        args.n, args.terms, generator(args.gen_seed), target_norm=args.target_norm
    )


def _spec(args, eps2=None) -> TestSpec:
    try:
        return TestSpec(args.eps1, args.eps2 if eps2 is None else eps2, args.delta, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _access(args) -> AccessFlags:
    if args.access is None:
        return harness.default_access(args.algorithm)
    try:
        return AccessFlags.parse(args.access)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- test -----------------------------------------------------------------


def _trotter_budget(verdicts, spec) -> list[dict]:
    sched = plan_schedule(spec)
    worst_t = max(v.total_time for v in verdicts)
    worst_q = max(v.queries for v in verdicts)
    return [
        {"name": "time", "formula": BOUND_FORMULAS["trotter"]["time"], "measured_max": worst_t,
         "bound": sched.time_bound, "passed": worst_t <= sched.time_bound},
        {"name": "queries", "formula": BOUND_FORMULAS["trotter"]["queries"], "measured_max": worst_q,
         "bound": sched.query_bound, "passed": worst_q <= sched.query_bound},
    ]


def _ae_budget(verdicts, cfg: AEConfig) -> list[dict]:
    worst_t = max(max(v.details["round_times"]) for v in verdicts)
    worst_q = max(max(v.details["round_queries"]) for v in verdicts)
    calls = max(v.details["grover_calls"] for v in verdicts)
    return [
        {"name": "round_time", "formula": BOUND_FORMULAS["ae"]["round_time"],
         "measured_max": worst_t, "bound": cfg.round_time_bound,
         "passed": worst_t <= cfg.round_time_bound},
        {"name": "round_queries", "formula": BOUND_FORMULAS["ae"]["round_queries"],
         "measured_max": worst_q, "bound": cfg.round_query_bound,
         "passed": worst_q <= cfg.round_query_bound},
        {"name": "round_grover_calls", "formula": BOUND_FORMULAS["ae"]["round_queries"],
         "measured_max": calls, "bound": cfg.round_query_bound,
         "passed": calls <= cfg.round_query_bound},
    ]


def _exact_report(h: HamiltonianSpec, spec: TestSpec, args) -> dict:
    """Outcome law computed from the Hamiltonian itself, not through the oracle."""
    if args.algorithm == "trotter":
        return exact_tester_report(h, spec)
    cfg = AEConfig.from_spec(spec, args.c)
    eta = nonlocal_projection_mass(h, spec.k, cfg.alpha)
    out = {"eta": eta, "midpoint": cfg.midpoint, "thresholds": list(cfg.thresholds),
           "exact_decision": (Decision.FAR if eta >= cfg.midpoint else Decision.LOCAL).value}
    if args.algorithm == "ae":
        M = qae_grid_size(cfg.thresholds[1], cfg.xi)
        probs, est = qae_outcome_law(eta, M)
        p_vote = float(probs[est >= cfg.midpoint].sum())
        R = majority_rounds(spec.delta)
        out.update(grid_size=M, rounds=R, prob_far_vote=p_vote,
                   prob_far=float(stats.binom.sf(math.ceil(R / 2) - 1, R, p_vote)))
    else:
        N = baseline_sample_count(cfg, spec.delta)
        cut = math.ceil(cfg.midpoint * N - 1e-12)
        out.update(samples=N, prob_far=float(stats.binom.sf(cut - 1, N, eta)))
    return out


def cmd_test(args) -> tuple[dict, str, int]:
    h = resolve_hamiltonian(args)
    spec = _spec(args)
    access = _access(args)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    report = {
        "schema": SCHEMA,
        "command": "test",
        "config": _resolved(args),
        "seed": args.seed,
        "hamiltonian": {"n": h.n, "terms": h.as_text(), "spectral_norm": h.spectral_norm,
                        "distance_to_klocal": distance_to_klocal(h, spec.k)},
        "bound_formulas": BOUND_FORMULAS[args.algorithm],
    }
    if args.algorithm == "trotter":
        report["schedule"] = plan_schedule(spec).to_dict()
    else:
        cfg = AEConfig.from_spec(spec, args.c)
        report["schedule"] = {"alpha_ae": cfg.alpha, "xi_ae": cfg.xi, "thresholds": list(cfg.thresholds),
                              "midpoint": cfg.midpoint, "rounds": majority_rounds(spec.delta),
                              "round_time_bound": cfg.round_time_bound,
                              "round_query_bound": cfg.round_query_bound}
        if args.algorithm == "baseline":
            report["schedule"]["samples"] = baseline_sample_count(cfg, spec.delta)

    if args.mode == "exact":
        report["white_box"] = True
        report["label"] = "white-box: computed from the Hamiltonian, no oracle queries were made"
        report["exact"] = _exact_report(h, spec, args)
        text = dumps(report) if args.format == "json" else _csv_text(
            ["key", "value"], [[k, v] for k, v in sorted(report["exact"].items()) if k != "schedule"])
        return report, text, EXIT_OK

    missing = [f for f in ("forward", "inverse", "controlled")
               if args.algorithm == "ae" and not getattr(access, f)]
    if not access.forward:
        missing.insert(0, "forward")
    if missing:
        raise CapabilityError(missing[0])

    verdicts = harness.repeat(args.algorithm, h, spec, args.seed, args.repeats,
                              workers=_workers(args), c=args.c, ae_mode=args.qae_mode, access=access)
    report["white_box"] = False
    report["access"] = access.names()
    report["runs"] = [v.to_dict() for v in verdicts]
    counts = {d.value: sum(v.decision == d for v in verdicts) for d in Decision}
    report["summary"] = {"decisions": counts,
                         "mean_time": float(np.mean([v.total_time for v in verdicts])),
                         "mean_queries": float(np.mean([v.queries for v in verdicts]))}
    if args.algorithm == "trotter":
        report["budget_checks"] = _trotter_budget(verdicts, spec)
    elif args.algorithm == "ae":
        report["budget_checks"] = _ae_budget(verdicts, AEConfig.from_spec(spec, args.c))
    else:
        report["budget_checks"] = []
    code = EXIT_INCONCLUSIVE if counts[Decision.INCONCLUSIVE.value] else EXIT_OK
    if args.format == "json":
        text = dumps(report)
    else:
        text = _csv_text(
            ["run", "tester", "decision", "statistic", "threshold", "queries", "total_time"],
            [[i, v.tester, v.decision.value, repr(v.statistic), repr(v.threshold), v.queries,
              repr(v.total_time)] for i, v in enumerate(verdicts)],
        )
    return report, text, code


# -- sweep ----------------------------------------------------------------


def cmd_sweep(args) -> tuple[dict, str, int]:
    if len(args.eps2_list) < 2:
        raise UsageError("--eps2-list needs at least two gap points")
    for e2 in args.eps2_list:
        _spec(args, e2)
    res = distinguishability_experiment(
        args.algorithm, args.eps1, args.eps2_list, n=args.n, k=args.k, kprime=args.kprime,
        reps=args.reps, delta=args.delta, seed=args.seed, workers=_workers(args), c=args.c,
    )
    report = {"schema": SCHEMA, "command": "sweep", "config": _resolved(args), "seed": args.seed,
              "columns": CSV_COLUMNS, "rows": res.rows, "fitted_exponent": res.exponent,
              "time_floor": "(eps2-eps1)^-1/50"}
    if args.sidecar_dir:
        d = Path(args.sidecar_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, row in enumerate(res.rows):
            side = {"schema": SCHEMA, "command": "sweep-point", "config": _resolved(args),
                    "seed": args.seed, "point": i, "row": row}
            (d / f"point_{i:02d}.json").write_text(dumps(side))
    text = res.to_csv() if args.format == "csv" else dumps(report)
    return report, text, EXIT_OK


# -- verify / lowerbound --------------------------------------------------


def cmd_verify(args) -> tuple[dict, str, int]:
    if args.corrupt_alpha <= 0:
        raise UsageError("--corrupt-alpha must be positive")
    checks = run_battery(suite_size=args.suite_size, seed=args.seed, k=args.k,
                         corrupt_alpha=args.corrupt_alpha, qae_draws=args.qae_draws)
    report = {"schema": SCHEMA, "command": "verify", "config": _resolved(args), "seed": args.seed,
              "checks": [c.to_dict() for c in checks],
              "all_passed": all(c.passed for c in checks)}
    failed = [c.name for c in checks if not c.passed]
    if args.format == "json":
        text = dumps(report)
    else:
        fields = [f.name for f in dataclasses.fields(checks[0])] + ["passed"]
        text = _csv_text(fields, [[c.to_dict()[f] for f in fields] for c in checks])
    if failed:
        print("bound violated: " + ", ".join(failed), file=sys.stderr)
    return report, text, EXIT_VIOLATION if failed else EXIT_OK


def cmd_lowerbound(args) -> tuple[dict, str, int]:
    rows = []
    for e1 in args.eps_grid:
        for e2 in args.eps_grid:
            if e2 < e1:
                continue
            try:
                pair = ZChainPair(args.n, args.kprime, e1, e2)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            for r in check_diagonal_pair(pair, args.t_grid):
                r = dict(r, eps1=e1, eps2=e2)
                if (e2 - e1) * r["t"] > math.pi / 2:
                    r["linear_ok"] = None  # outside the small-angle regime
                rows.append(r)
    bad = [r for r in rows if not r["agree"] or r["linear_ok"] is False]
    report = {"schema": SCHEMA, "command": "lowerbound", "config": _resolved(args),
              "formulas": {"closed_form": "2*min(|sin(g t/2)|, |cos(g t/2)|), g = eps2-eps1",
                           "linear": "closed_form <= (eps2-eps1)*t when (eps2-eps1)*t <= pi/2"},
              "rows": rows, "violations": len(bad)}
    cols = ["eps1", "eps2", "t", "closed_form", "generic", "agree", "linear_ok", "diamond_hi", "diamond_ok"]
    text = dumps(report) if args.format == "json" else _csv_text(cols, [[r[c] for c in cols] for r in rows])
    if bad:
        print(f"phase-distance check failed on {len(bad)} grid points", file=sys.stderr)
    return report, text, EXIT_VIOLATION if bad else EXIT_OK


COMMANDS = {"test": cmd_test, "sweep": cmd_sweep, "verify": cmd_verify, "lowerbound": cmd_lowerbound}


def run(argv=None) -> tuple[dict | None, str, int]:
    """Parse and execute; returns (report, rendered text, exit code) without writing."""
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors already exit with 2
        return int(exc.code or 0)
    try:
        _, text, code = COMMANDS[args.command](args)
    except (UsageError, HamiltonianError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"hamlocal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"hamlocal: capability error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
