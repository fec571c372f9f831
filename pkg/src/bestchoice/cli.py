"""Command-line front end.

    bestchoice solve --n 100 --alpha 1 --beta 0.5 --gamma 0.25 [--p 0.9]
    bestchoice table1
    bestchoice sweep --alpha-range 0 1 0.1 --beta-range 0 1 0.1 --gamma 0.05 --p 0.95 --out grid.csv
    bestchoice simulate --n 1000 --alpha 1 --beta 1 --gamma 0 --trials 1000000 --seed 7
    bestchoice duration --n 100000 --alpha 1 --beta 0.5 --gamma 0.5
    bestchoice oracle-check --n 8 --alpha 1 --beta 0.5 --gamma 0.5 --p 0.5 [--report]

JSON goes to stdout unless ``--out`` is given. Exit status is 0 on success,
2 on invalid input and 1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from bestchoice import asymptotics
from bestchoice.dp import policy_outcomes, solve, threshold_mask
from bestchoice.model import InvalidParams, ProblemParams
from bestchoice.simulate import _workers, estimate

log = logging.getLogger("bestchoice")

SIGMA_GATE = 4.0

TABLE1_ROWS = ((1.0, 0.0), (0.75, 0.25), (0.5, 0.5), (0.25, 0.75), (0.0, 1.0))
TABLE1_HEADER = ["beta", "gamma", "t_star", "win_prob"]
SWEEP_HEADER = ["alpha", "beta", "gamma", "p", "t_star", "value", "win_prob", "duration_at_zero"]
SWEEP_FINITE_HEADER = ["n", "threshold_fraction", "start_value"]


class UsageError(Exception):
    """Invalid command-line input; reported with exit status 2."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


# -- solve / duration / oracle-check ------------------------------------------

def _asymptotics(params: ProblemParams):
    try:
        return asymptotics.asymptotic_solution(params.alpha, params.beta, params.gamma, params.p).to_dict(), None
    except asymptotics.NonpositiveNumeratorError as exc:
        return None, f"{exc.code}: {exc}"


def cmd_solve(params: ProblemParams, include_values: bool = True) -> dict:
    sol = solve(params)
    doc = sol.to_dict(include_values=include_values)
    doc["asymptotics"], doc["asymptotics_error"] = _asymptotics(params)
    return doc


def cmd_duration(params: ProblemParams) -> dict:
    sol = solve(params)
    finite = sol.duration.start_mean / params.n
    asym, err = _asymptotics(params)
    limit = asym["duration_at_zero"] if asym else None
    return {
        "n": params.n,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "p": params.p,
        "threshold": sol.threshold,
        "finite_duration_fraction": finite,
        "asymptotic_duration_at_zero": limit,
        "difference": None if limit is None else finite - limit,
        "asymptotics_error": err,
    }


def cmd_oracle_check(params: ProblemParams) -> dict:
    from bestchoice.oracle import RuleSpec, best_rule, exact_value

    sol = solve(params)
    rule, best = best_rule(params)
    dp_rule = RuleSpec(frozenset(k + 1 for k in range(params.n) if sol.stops[k]))
    exact = exact_value(dp_rule, params)
    tol = 1e-12
    return {
        "n": params.n,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "p": params.p,
        "dp_threshold": sol.threshold,
        "dp_start_value": sol.start_value,
        "oracle_best_value": best,
        "oracle_best_set": sorted(rule.stop_set),
        "oracle_value_of_dp_rule": float(exact.value),
        "oracle_mean_duration_of_dp_rule": float(exact.mean_duration),
        "dp_mean_duration": sol.duration.start_mean,
        "agreement": "PASS"
        if abs(sol.start_value - best) <= tol and abs(float(exact.value) - best) <= tol
        and abs(float(exact.mean_duration) - sol.duration.start_mean) <= tol
        else "FAIL",
    }


# -- simulate -------------------------------------------------------------------

def _within(diff, se):
    if se is None:
        return None
    return abs(diff) <= SIGMA_GATE * se + 1e-12


def cmd_simulate(params: ProblemParams, trials: int, seed: int, threshold: int | None = None, workers=None) -> dict:
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    if seed < 0:
        raise UsageError("--seed must be nonnegative")
    sol = solve(params)
    if threshold is None:
        threshold = sol.threshold
        win, wrong, none = sol.win_prob, sol.wrong_prob, sol.none_prob
        dur = sol.duration.start_mean
    else:
        if not 1 <= threshold <= params.n:
            raise UsageError(f"--threshold must lie in 1..{params.n}")
        win, wrong, none, m, _ = policy_outcomes(params, threshold_mask(params.n, threshold))
        dur = float(m[0])
    value = params.alpha * win - params.beta * wrong - params.gamma * none
    report = estimate(params, threshold, trials, seed, workers=workers)
    checks = {
        "freq_win": _within(report.freq_win - win, report.se_win),
        "freq_none": _within(report.freq_none - none, report.se_none),
        "mean_payoff": _within(report.mean_payoff - value, report.se_payoff),
        "mean_duration_fraction": _within(report.mean_duration_fraction - dur / params.n, report.se_duration_fraction),
    }
    if any(v is None for v in checks.values()):
        agreement = "N/A"
    else:
        agreement = "PASS" if all(checks.values()) else "FAIL"
    return {
        "params": {"n": params.n, "alpha": params.alpha, "beta": params.beta, "gamma": params.gamma, "p": params.p},
        "report": report.to_dict(),
        "reference": {
            "threshold": threshold,
            "win_prob": win,
            "wrong_prob": wrong,
            "none_prob": none,
            "value": value,
            "mean_duration_fraction": dur / params.n,
        },
        "checks": checks,
        "sigma_gate": SIGMA_GATE,
        "agreement": agreement,
    }


# -- table1 / sweep -------------------------------------------------------------

def table1_rows():
    rows = []
    for beta, gamma in TABLE1_ROWS:
        rows.append((beta, gamma, asymptotics.threshold_certain(1.0, beta, gamma), asymptotics.win_prob_certain(1.0, beta, gamma)))
    return rows


def cmd_table1() -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE1_HEADER)
    for beta, gamma, t_star, win in table1_rows():
        writer.writerow([f"{beta:g}", f"{gamma:g}", f"{t_star:.5f}", f"{win:.5f}"])
    return buf.getvalue()


@dataclass(frozen=True)
class SweepGrid:
    alpha: tuple
    beta: tuple
    gamma: tuple
    p: tuple
    n: int | None = None

    def points(self):
        return itertools.product(axis_values(self.alpha), axis_values(self.beta),
                                 axis_values(self.gamma), axis_values(self.p))


def axis_values(spec):
    """Inclusive arithmetic range ``(start, stop, step)``; values rounded to 12 digits."""
    start, stop, step = spec
    if step <= 0:
        raise UsageError(f"range step must be positive, got {step}")
    if stop < start:
        raise UsageError(f"range stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _sweep_point(point, n):
    alpha, beta, gamma, p = point
    try:
        ProblemParams(alpha, beta, gamma, n or 1, p)
        asym = asymptotics.asymptotic_solution(alpha, beta, gamma, p)
    except (InvalidParams, asymptotics.NonpositiveNumeratorError) as exc:
        return point, None, str(exc)
    row = [alpha, beta, gamma, p, asym.t_star, asym.value_at_zero, asym.win_prob, asym.duration_at_zero]
    if n:
        sol = solve(ProblemParams(alpha, beta, gamma, n, p))
        row += [n, sol.threshold / n, sol.start_value]
    return point, row, None


def cmd_sweep(grid: SweepGrid, out, workers=None) -> int:
    """Write one CSV row per valid grid point; returns the number of data rows."""
    points = list(grid.points())
    workers = _workers(workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda pt: _sweep_point(pt, grid.n), points))
    else:
        results = [_sweep_point(pt, grid.n) for pt in points]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER + (SWEEP_FINITE_HEADER if grid.n else []))
    written = 0
    for point, row, reason in results:
        if row is None:
            log.warning("skipping alpha=%g beta=%g gamma=%g p=%g: %s", *point, reason)
            continue
        writer.writerow([_fmt(x) for x in row])
        written += 1
    return written


# -- argument handling ------------------------------------------------------------

PARAM_KEYS = ("n", "alpha", "beta", "gamma", "p")


def _add_param_flags(sub, with_format=True):
    sub.add_argument("--n", type=int)
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--beta", type=float)
    sub.add_argument("--gamma", type=float)
    sub.add_argument("--p", type=float)
    sub.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    sub.add_argument("--out", help="write to this path instead of stdout")
    if with_format:
        sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bestchoice", description="Best-choice problem with penalties and refusals.")
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("solve", help="exact finite-horizon solution plus limits")
    _add_param_flags(s)
    s.add_argument("--no-values", action="store_true", help="omit the per-state value table")

    t = subs.add_parser("table1", help="limiting thresholds and win chances for alpha = 1")
    t.add_argument("--out")

    w = subs.add_parser("sweep", help="limiting quantities over a parameter grid, as CSV")
    for name in ("alpha", "beta", "gamma", "p"):
        w.add_argument(f"--{name}-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
        w.add_argument(f"--{name}", type=float, help=f"fix {name} to one value")
    w.add_argument("--n", type=int, help="also solve the finite problem at this horizon")
    w.add_argument("--workers", type=int)
    w.add_argument("--config")
    w.add_argument("--out")

    m = subs.add_parser("simulate", help="Monte Carlo run checked against exact values")
    _add_param_flags(m, with_format=False)
    m.add_argument("--trials", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--threshold", type=int, help="override the optimal threshold")
    m.add_argument("--workers", type=int)

    d = subs.add_parser("duration", help="finite and limiting mean duration")
    _add_param_flags(d, with_format=False)

    o = subs.add_parser("oracle-check", help="compare the solver with exhaustive enumeration (n <= 8)")
    _add_param_flags(o, with_format=False)
    o.add_argument("--report", action="store_true", help="print the closed-form adjudication report instead")
    return parser


def _merge_config(args):
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        with open(path) as fh:
            conf = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(conf, dict):
        raise UsageError("config must be a JSON object")
    for key, value in conf.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _params(args) -> ProblemParams:
    missing = [k for k in ("n", "alpha", "beta", "gamma") if getattr(args, k) is None]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{k}" for k in missing))
    p = 1.0 if args.p is None else args.p
    try:
        return ProblemParams(float(args.alpha), float(args.beta), float(args.gamma), int(args.n), float(p))
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc


def _axis(args, name):
    rng = getattr(args, f"{name}_range")
    fixed = getattr(args, name)
    if rng is not None:
        return tuple(float(x) for x in rng)
    if fixed is None:
        if name == "p":
            return (1.0, 1.0, 1.0)
        raise UsageError(f"sweep needs --{name} or --{name}-range")
    return (float(fixed), float(fixed), 1.0)


def _emit(text: str, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _csv_record(doc) -> str:
    flat = {k: v for k, v in doc.items() if not isinstance(v, (list, dict))}
    asym = doc.get("asymptotics") or {}
    flat.update({f"asymptotic_{k}": v for k, v in asym.items()})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(flat))
    writer.writerow(["" if v is None else _fmt(v) for v in flat.values()])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    _merge_config(args)
    cmd = args.command
    if cmd == "table1":
        _emit(cmd_table1(), args.out)
    elif cmd == "sweep":
        grid = SweepGrid(*(_axis(args, k) for k in ("alpha", "beta", "gamma", "p")), n=args.n)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                cmd_sweep(grid, fh, workers=args.workers)
        else:
            cmd_sweep(grid, sys.stdout, workers=args.workers)
    elif cmd == "solve":
        doc = cmd_solve(_params(args), include_values=not args.no_values)
        _emit(_csv_record(doc) if args.format == "csv" else _json(doc), args.out)
    elif cmd == "simulate":
        if args.trials is None or args.seed is None:
            raise UsageError("simulate needs --trials and --seed")
        doc = cmd_simulate(_params(args), int(args.trials), int(args.seed), args.threshold, args.workers)
        _emit(_json(doc), args.out)
    elif cmd == "duration":
        _emit(_json(cmd_duration(_params(args))), args.out)
    elif cmd == "oracle-check":
        if args.report:
            from bestchoice.oracle import discrepancy_rows, format_report
            _emit(format_report(discrepancy_rows()), args.out)
            return 0
        params = _params(args)
        if params.n > 8:
            raise UsageError("oracle-check enumerates n! orders and is capped at n = 8")
        _emit(_json(cmd_oracle_check(params)), args.out)
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"bestchoice: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"bestchoice: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
