"""Command-line interface: ``hurst-lab <subcommand> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .dfa import dfa_estimate
from .divisor import RECOMMENDED_MIN_BOX, parse_plan
from .errors import HurstLabError
from .mc import (
    DEFAULT_REPS,
    McSummary,
    SIGMA_LEVELS,
    calibrate_tables,
    default_workers,
    sweep_divisor_choice,
    sweep_divisor_count,
    sweep_min_divisor,
)
from .series import as_returns, read_csv
from .synth import SeedSpec, fgn_array, gaussian_array

QUANTILE_NOTE = "empirical quantiles, linear interpolation between order statistics (type 7)"
SUBCOMMANDS = ("estimate", "calibrate", "sweep-d", "sweep-choice", "gen")


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "csv"


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit integer, got {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit integer, got {v}")
    return v


def _unit_interval(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurst-lab",
        description="Detrended fluctuation analysis and Monte Carlo calibration of the Hurst estimator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def mc_common(p, default_format="csv"):
        p.add_argument("--reps", type=_positive_int, default=DEFAULT_REPS,
                       help=f"replications per configuration (default {DEFAULT_REPS})")
        p.add_argument("--seed", type=_seed, required=True, help="master seed")
        p.add_argument("--out", required=True, help="output file")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--threads", type=_positive_int, default=None,
                       help="worker processes (default: $HURST_LAB_THREADS or CPU count)")

    p = sub.add_parser("estimate", help="estimate H for one window of a CSV series")
    p.add_argument("--input", required=True, help="CSV with one value column or timestamp,value")
    p.add_argument("--plan", required=True,
                   help="caseA:L | caseB:L | explicit:N1,N2,... | lowest:d=D,min=M | "
                        "all:min=M | window:start=S,d=D[,min=M]")
    p.add_argument("--window-start", type=int, default=0, help="0-based index of the first return")
    p.add_argument("--window-length", type=_positive_int, default=None,
                   help="L for plans that do not fix it (explicit, lowest, all, window)")
    p.add_argument("--kind", choices=("prices", "increments"), default="prices")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="json estimate, or csv of N,F pairs")
    p.add_argument("--curve-out", default=None, help="also write the N,F curve as CSV")

    p = sub.add_parser("calibrate", help="Monte Carlo mean/SD/intervals for the table plans")
    p.add_argument("--case", choices=("a", "b", "both"), default="both")
    mc_common(p)

    p = sub.add_parser("sweep-d", help="SD of H versus the number of box sizes")
    p.add_argument("--L", dest="L", type=_positive_int, required=True)
    p.add_argument("--d-min", type=_positive_int, required=True)
    p.add_argument("--d-max", type=_positive_int, required=True)
    p.add_argument("--min-divisor", type=_positive_int, default=None,
                   help="smallest box size (default: the table N_min for multiples of 60, else 8)")
    mc_common(p)

    p = sub.add_parser("sweep-choice", help="SD of H versus which consecutive box sizes are used")
    p.add_argument("--L", dest="L", type=_positive_int, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--windows", type=_positive_int, default=5)
    p.add_argument("--min-divisor", type=_positive_int, default=RECOMMENDED_MIN_BOX)
    mc_common(p)

    p = sub.add_parser("gen", help="write synthetic increments as a one-column CSV")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--kind", choices=("gaussian", "fgn"), default="gaussian")
    p.add_argument("--h", type=_unit_interval, default=None, help="Hurst exponent for fgn")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--stream", type=_seed, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse and validate; usage problems exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    params = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "out", "format")}
    fmt = getattr(ns, "format", "csv")
    cmd = ns.subcommand

    if cmd == "sweep-d" and ns.d_min > ns.d_max:
        parser.error(f"--d-min {ns.d_min} exceeds --d-max {ns.d_max} (empty range)")
    if cmd == "sweep-choice" and ns.windows < 2:
        parser.error("--windows must be at least 2")
    if cmd == "gen":
        if ns.kind == "fgn" and ns.h is None:
            parser.error("--h is required with --kind fgn")
        if ns.kind == "fgn" and ns.n < 2:
            parser.error("--n must be at least 2 for fgn")
    if cmd == "estimate" and ns.window_start < 0:
        parser.error("--window-start must be non-negative")
    if "threads" in params and params["threads"] is None:
        params["threads"] = default_workers()
    return RunConfig(cmd, params, ns.out, fmt)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _emit(cfg: RunConfig, text: str, path: Optional[str] = None) -> None:
    path = path if path is not None else cfg.output_path
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _header(cfg: RunConfig, **extra) -> str:
    meta = {"subcommand": cfg.subcommand, "version": __version__}
    # worker count is deliberately left out: output must not depend on it
    meta.update({k: v for k, v in cfg.params.items() if k != "threads"})
    meta.update(extra)
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def _summary_row(case: str, s: McSummary) -> dict:
    ci = s.quantile_intervals
    return {
        "case": case, "L": s.plan.window_length, "d": s.plan.d, "n_min": s.plan.n_min,
        "reps": s.replications, "mean": s.mean_h, "sd": s.sd_h,
        "lo68": ci[0.683][0], "hi68": ci[0.683][1],
        "lo95": ci[0.955][0], "hi95": ci[0.955][1],
        "lo99": ci[0.997][0], "hi99": ci[0.997][1],
        "degenerate": s.degenerate_count,
    }


CALIBRATE_COLUMNS = ("case", "L", "d", "n_min", "reps", "mean", "sd", "lo68", "hi68",
                     "lo95", "hi95", "lo99", "hi99", "degenerate")
SWEEP_D_COLUMNS = ("d", "n_min", "n_max", "reps", "mean", "sd", "degenerate")
SWEEP_CHOICE_COLUMNS = ("window", "n_min", "n_max", "d", "reps", "mean", "sd", "degenerate")


def _run_estimate(cfg: RunConfig) -> None:
    p = cfg.params
    raw = read_csv(p["input"], p["kind"])
    returns = as_returns(raw)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        plan = parse_plan(p["plan"], p["window_length"])
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    est = dfa_estimate(returns, plan, p["window_start"])
    curve_csv = _csv([{"N": n, "F": f} for n, f in est.curve.points], ("N", "F"))
    if cfg.format == "csv":
        _emit(cfg, curve_csv)
    else:
        out = est.to_dict()
        out["window_start"] = p["window_start"]
        out["L"] = plan.window_length
        if raw.timestamps is not None:
            # returns are indexed one step behind prices
            offset = 1 if raw.kind.value == "prices" else 0
            first = p["window_start"] + offset
            out["window_timestamps"] = [raw.timestamps[first],
                                        raw.timestamps[first + plan.window_length - 1]]
        _emit(cfg, json.dumps(out, indent=2) + "\n")
    if p["curve_out"]:
        atomic_write(p["curve_out"], curve_csv)


def _run_calibrate(cfg: RunConfig) -> None:
    p = cfg.params
    a_rows, b_rows = calibrate_tables(p["reps"], p["seed"], p["case"], p["threads"])
    rows = [_summary_row("A", s) for s in a_rows] + [_summary_row("B", s) for s in b_rows]
    _write_table(cfg, rows, CALIBRATE_COLUMNS)


def _run_sweep_d(cfg: RunConfig) -> None:
    p = cfg.params
    min_div = p["min_divisor"] if p["min_divisor"] is not None else sweep_min_divisor(p["L"])
    _warn_small(min_div)
    res = sweep_divisor_count(p["L"], range(p["d_min"], p["d_max"] + 1), p["reps"],
                              p["seed"], min_div, p["threads"])
    rows = [{"d": r.x, "n_min": r.plan.n_min, "n_max": r.plan.box_sizes[-1],
             "reps": p["reps"], "mean": r.mean, "sd": r.sd, "degenerate": r.degenerate_count}
            for r in res.rows]
    fit = None
    if res.fit is not None:
        fit = dict(zip(("slope", "intercept", "r2"), res.fit))
    _write_table(cfg, rows, SWEEP_D_COLUMNS, fit=fit, effective_min_divisor=min_div)


def _run_sweep_choice(cfg: RunConfig) -> None:
    p = cfg.params
    _warn_small(p["min_divisor"])
    res = sweep_divisor_choice(p["L"], p["d"], p["windows"], p["reps"], p["seed"],
                               p["min_divisor"], p["threads"])
    rows = [{"window": i, "n_min": r.plan.n_min, "n_max": r.plan.box_sizes[-1], "d": r.plan.d,
             "reps": p["reps"], "mean": r.mean, "sd": r.sd, "degenerate": r.degenerate_count}
            for i, r in enumerate(res.rows, start=1)]
    _write_table(cfg, rows, SWEEP_CHOICE_COLUMNS)


def _warn_small(min_div: int) -> None:
    if min_div < RECOMMENDED_MIN_BOX:
        print(f"warning: box sizes below {RECOMMENDED_MIN_BOX} are not recommended",
              file=sys.stderr)


def _write_table(cfg: RunConfig, rows, columns, fit: Optional[dict] = None, **meta) -> None:
    if cfg.format == "json":
        doc = {"config": json.loads(_header(cfg, quantiles=QUANTILE_NOTE, **meta)[2:]),
               "rows": rows}
        if fit is not None:
            doc["fit"] = fit
        _emit(cfg, json.dumps(doc, indent=2) + "\n")
        return
    text = _header(cfg, quantiles=QUANTILE_NOTE, **meta) + _csv(rows, columns)
    if fit is not None:
        text += f"fit,slope={_fmt(fit['slope'])},intercept={_fmt(fit['intercept'])},r2={_fmt(fit['r2'])}\n"
    _emit(cfg, text)


def _run_gen(cfg: RunConfig) -> None:
    p = cfg.params
    seed = SeedSpec(p["seed"], p["stream"])
    if p["kind"] == "fgn":
        values = fgn_array(p["n"], p["h"], seed)
    else:
        values = gaussian_array(p["n"], seed)
    _emit(cfg, _header(cfg) + "".join(f"{v!r}\n" for v in values.tolist()))


_DISPATCH = {
    "estimate": _run_estimate,
    "calibrate": _run_calibrate,
    "sweep-d": _run_sweep_d,
    "sweep-choice": _run_sweep_choice,
    "gen": _run_gen,
}


def run(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    try:
        _DISPATCH[cfg.subcommand](cfg)
    except HurstLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{cfg.subcommand} finished in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
