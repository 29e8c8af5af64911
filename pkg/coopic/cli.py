import argparse
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, TextIO

import numpy as np
import tqdm

from .gauss_achieve import gauss_achievable_sum_rate
from .gauss_capacity import COOPERATIVE_MAX_GAP, MAX_GAP, gap_report, gauss_u_terms
from .gauss_model import GaussParams, n_levels
from .ld_achieve import best_instance, verify_grid
from .ld_capacity import classify_levels, classify_regime, ld_sum_capacity, ld_u_terms, select_n_prime_C_detail
from .ld_model import DEFAULT_PRIME, LdParams
from .ld_schemes import EXAMPLES, run_example
from .special_cases import (
    FEEDBACK_MAX_GAP,
    FIG2_ALPHA_WINDOW,
    FIG2_TOL,
    REVERSIBILITY_MAX_DIFF,
    SymmetricParams,
    feedback_bound,
    feedback_gap,
    feedback_to_coop,
    fig2_curve,
    fig2_limit,
    ld_feedback_capacity,
    primed_minima,
    reversibility_check,
    symmetric_achievable,
    symmetric_C,
    symmetric_upper_bounds,
)
from .sweep import DB_MAX, DB_MIN, log_spaced, ordered_map, sample_channels
from .utils import db_to_magnitude, int_range, optional_int, str2bool, write_csv, write_json

LD_GRID_MAX = 8
SANDWICH_PRIMED_GAP = 7.0
SANDWICH_U5_GAP = 2.0
SANDWICH_TOL = 1e-9
REGIME_FILTER_ROUNDS = 1000

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    out: Optional[str] = None  # table destination; summaries go to stdout
    seed: int = 0
    jobs: Optional[int] = 1  # worker processes, 0 or None for every core
    as_json: bool = False  # summaries and reports as JSON
    verbose: bool = True
    grid: Optional[range] = None  # integer levels for LD grids
    count: Optional[int] = None  # random cases for Gaussian sweeps
    db_min: float = DB_MIN
    db_max: float = DB_MAX

    def __post_init__(self):
        if self.jobs is not None and self.jobs < 0:
            raise ValueError(f"--jobs must be non-negative, got {self.jobs}")
        if self.grid is not None and len(self.grid) == 0:
            raise ValueError("Empty level grid")
        if self.count is not None and self.count < 1:
            raise ValueError(f"--count must be positive, got {self.count}")
        if not self.db_min <= self.db_max:
            raise ValueError(f"Empty dB range [{self.db_min}, {self.db_max}]")


@contextmanager
def _table_file(config: RunConfig):
    if config.out is None:
        yield None
    else:
        with open(config.out, "w", encoding="utf-8", newline="") as f:
            yield f


def _emit_table(config: RunConfig, rows, columns: List[str] = None):
    with _table_file(config) as f:
        if f is not None:
            write_csv(rows, f, columns)


def _emit_summary(config: RunConfig, summary: dict, file: TextIO = None):
    file = file or sys.stdout
    if config.as_json:
        write_json(summary, file)
    elif config.verbose:
        for key, value in summary.items():
            print(f"{key}: {value}", file=file)


def _emit_document(config: RunConfig, document: dict):
    if config.out is None:
        write_json(document, sys.stdout)
    else:
        with open(config.out, "w", encoding="utf-8") as f:
            write_json(document, f)


def ld_report(params: LdParams) -> dict:
    bounds = ld_u_terms(params)
    regime = classify_regime(params)
    inst, res = best_instance(params)
    document = {
        "params": dict(zip(("n13", "n14", "n23", "n24", "nC"), params.levels), p=params.p),
        "bounds": dict(zip(("u1", "u2", "u3", "u4", "u5"), bounds.values)),
        "binding": list(bounds.argmin),
        "capacity": ld_sum_capacity(params),
        "regime": str(regime),
        "achievable": res.optimum,
        "scheme": inst.aux_note,
        "rates": res.witness,
        "system": inst.system.to_dict(),
    }
    if regime.tag == "III":
        choice = select_n_prime_C_detail(params)
        document["n_prime_C"] = choice.value
        document["n_prime_C_exact"] = choice.exact
    return document


def gauss_report(params: GaussParams) -> dict:
    bounds = gauss_u_terms(params)
    report = gap_report(params)
    _, detail = gauss_achievable_sum_rate(params)
    return {
        "params": dict(zip(("h13", "h14", "h23", "h24", "hC"), params.magnitudes), theta=params.theta),
        "levels": dict(zip(("n13", "n14", "n23", "n24", "nC"), n_levels(params).levels)),
        "bounds": dict(zip(("u1", "u2", "u3", "u4", "u5"), bounds.values)),
        "primed": dict(zip(("u1p", "u2p", "u3p", "u4p", "u5p"), bounds.primed), u5pp=bounds.u5pp),
        **report.to_dict(),
        "achievement": detail.to_dict(),
    }


def symmetric_report(hD: float, hC: float) -> dict:
    params = SymmetricParams.with_sqrt_cross(hD, hC).to_gauss()
    document = gauss_report(params)
    C = symmetric_C(hD, hC)
    upper = symmetric_upper_bounds(hD, hC)
    achievable = symmetric_achievable(hD, hC)
    document["symmetric"] = {
        "C": C,
        "u1_tight": upper.u1_tight,
        "u2": upper.u2,
        "u5": upper.u5,
        "upper": upper.min_value,
        "achievable": achievable,
        "gap_to_C": C - achievable,
    }
    return document


def cmd_report(config: RunConfig, args: dict) -> int:
    """Single-case report for ld-capacity and gauss-report."""
    if config.subcommand == "ld-capacity":
        params = LdParams(*args.pop("levels"), p=args.pop("p"))
        document = ld_report(params)
        _emit_document(config, document)
        return EXIT_OK if document["achievable"] == document["capacity"] else EXIT_VIOLATION

    db, magnitudes, symmetric = args.pop("db"), args.pop("magnitudes"), args.pop("symmetric")
    theta = args.pop("theta")
    if symmetric is not None:
        hD, hC = symmetric
        document = symmetric_report(hD, hC)
    else:
        params = GaussParams.from_db(*db, theta=theta) if db is not None else GaussParams(*magnitudes, theta)
        document = gauss_report(params)
    _emit_document(config, document)
    return EXIT_OK


def cmd_ld_verify(config: RunConfig, args: dict) -> int:
    grid = config.grid if config.grid is not None else range(6)
    if grid[-1] > LD_GRID_MAX:
        raise ValueError(f"Level grid up to {grid[-1]} exceeds the limit of {LD_GRID_MAX}")
    progress = lambda items: tqdm.tqdm(items, unit="tuple", disable=not config.verbose)
    df = verify_grid(grid, p=args.pop("p"), progress=progress)
    mismatches = df[~df["match"]]
    _emit_table(config, df if args.pop("all_rows") else mismatches)
    _emit_summary(config, {"checked": len(df), "mismatches": len(mismatches)})
    return EXIT_OK if mismatches.empty else EXIT_VIOLATION


def cmd_ld_sim(config: RunConfig, args: dict) -> int:
    number, T, p = args.pop("example"), args.pop("T"), args.pop("p")
    count = args.pop("seeds")
    if count < 1:
        raise ValueError(f"--seeds must be positive, got {count}")
    seeds = range(config.seed, config.seed + count)
    trace_path = args.pop("trace")
    zero = args.pop("zero")
    rows = []
    for seed in tqdm.tqdm(seeds, unit="seed", disable=not config.verbose):
        trace = run_example(number, T, seed, p, zero=zero, audit=True, check=False)
        capacity = ld_sum_capacity(trace.params)
        floor = capacity * (1 - 4 / T)
        rows.append(
            dict(
                example=number, seed=seed, T=T, p=p,
                errors=trace.error_count,
                sum_rate=trace.sum_rate,
                capacity=capacity,
                late_reads=trace.audit["late_reads"],
                ok=trace.error_count == 0 and trace.sum_rate >= floor,
            )
        )
        if trace_path is not None and seed == seeds[0]:
            with open(trace_path, "w", encoding="utf-8") as f:
                write_json(trace.to_dict(), f)
    _emit_table(config, rows)
    failed = sum(1 for r in rows if not r["ok"])
    _emit_summary(config, {"runs": len(rows), "failed": failed, "min_sum_rate": min(r["sum_rate"] for r in rows)})
    return EXIT_OK if failed == 0 else EXIT_VIOLATION


def _gap_row(params: GaussParams) -> dict:
    report = gap_report(params)
    bounds = gauss_u_terms(params)
    sandwich = all(
        u - SANDWICH_PRIMED_GAP - SANDWICH_TOL <= up <= u + SANDWICH_TOL
        for u, up in zip(bounds.values[:4], bounds.primed[:4])
    ) and abs(bounds.u5 - bounds.u5p) <= SANDWICH_U5_GAP + SANDWICH_TOL
    return dict(
        h13=params.h13, h14=params.h14, h23=params.h23, h24=params.h24, hC=params.hC, theta=params.theta,
        **{k: v for k, v in report.to_dict().items()},
        **dict(zip(("u1", "u2", "u3", "u4", "u5"), bounds.values)),
        **dict(zip(("u1p", "u2p", "u3p", "u4p", "u5p"), bounds.primed)),
        sandwich=sandwich,
    )


def _channels_in_regime(config: RunConfig, regime: str) -> List[GaussParams]:
    """Seeded draws kept only when their real-valued levels fall in the regime."""
    found = []
    for attempt in range(REGIME_FILTER_ROUNDS):
        batch = sample_channels(config.count, config.seed + attempt, config.db_min, config.db_max)
        found += [c for c in batch if classify_levels(n_levels(c).levels).tag == regime]
        if len(found) >= config.count:
            return found[: config.count]
    raise ValueError(f"Could not draw {config.count} regime-{regime} channels in [{config.db_min}, {config.db_max}] dB")


def cmd_gauss_sweep(config: RunConfig, args: dict) -> int:
    regime = args.pop("regime")
    channels = sample_channels(config.count, config.seed, config.db_min, config.db_max) if regime == "any" else _channels_in_regime(config, regime)
    rows = ordered_map(_gap_row, channels, config.jobs, config.verbose, desc="channels")
    _emit_table(config, rows)

    gaps = np.array([r["gap"] for r in rows])
    coop = [r["cooperative_gap"] for r in rows if r["cooperative_gap"] is not None]
    summary = {
        "channels": len(rows),
        "max_gap": float(gaps.max()),
        "max_cooperative_gap": max(coop) if coop else None,
        "sandwich_failures": sum(1 for r in rows if not r["sandwich"]),
    }
    _emit_summary(config, summary)
    ok = summary["max_gap"] <= MAX_GAP and summary["sandwich_failures"] == 0
    ok = ok and all(g <= COOPERATIVE_MAX_GAP for g in coop)
    return EXIT_OK if ok else EXIT_VIOLATION


def _feedback_row(point) -> dict:
    hD, beta = point
    hI = hD ** beta
    bound = feedback_bound(hD, hI)
    return dict(
        hD=hD, hI=hI, beta=beta,
        bound=bound,
        u2=gauss_u_terms(feedback_to_coop(hD, hI)).u2,
        gap=feedback_gap(hD, hI),
    )


def cmd_feedback(config: RunConfig, args: dict) -> int:
    ld = args.pop("ld")
    if ld is not None:
        nD, nI = ld
        _emit_summary(config, {"nD": nD, "nI": nI, "capacity": ld_feedback_capacity(nD, nI)})
        return EXIT_OK
    hDs = log_spaced(0.0, args.pop("hD_db_max"), args.pop("points"))
    betas = np.arange(0.0, 1.5 + 1e-9, args.pop("beta_step"))
    points = list(product(hDs.tolist(), betas.tolist()))
    rows = ordered_map(_feedback_row, points, config.jobs, config.verbose, desc="feedback")
    _emit_table(config, rows)
    max_gap = max(r["gap"] for r in rows)
    mismatch = max(abs(r["bound"] - r["u2"]) for r in rows)
    _emit_summary(config, {"points": len(rows), "max_gap": max_gap, "max_bound_u2_difference": mismatch})
    return EXIT_OK if max_gap <= FEEDBACK_MAX_GAP and mismatch <= 1e-9 else EXIT_VIOLATION


def cmd_fig2(config: RunConfig, args: dict) -> int:
    hD = db_to_magnitude(args.pop("hD_db"))
    step = args.pop("alpha_step")
    if not step > 0:
        raise ValueError(f"--alpha_step must be positive, got {step}")
    lo, hi = args.pop("tol_alpha_min"), args.pop("tol_alpha_max")
    if not lo <= hi:
        raise ValueError(f"Empty tolerance window [{lo}, {hi}]")
    alphas = np.round(np.arange(0.0, args.pop("alpha_max") + step / 2, step), 12)
    rows = [dict(alpha=a, normalized_C=fig2_curve(a, hD), analytic_limit=fig2_limit(a)) for a in alphas.tolist()]
    _emit_table(config, rows, ["alpha", "normalized_C", "analytic_limit"])
    curve = np.array([r["normalized_C"] for r in rows])
    monotone = bool(np.all(np.diff(curve) >= -1e-12))
    deviation = max(abs(r["normalized_C"] - r["analytic_limit"]) for r in rows)
    inside = [r for r in rows if lo <= r["alpha"] <= hi]
    window_deviation = max((abs(r["normalized_C"] - r["analytic_limit"]) for r in inside), default=0.0)
    summary = {
        "hD": hD,
        "points": len(rows),
        "non_decreasing": monotone,
        "max_deviation": deviation,
        "tolerance": FIG2_TOL,
        "tolerance_window": [lo, hi],
        "window_deviation": window_deviation,
        "excluded_alphas": [r["alpha"] for r in rows if not lo <= r["alpha"] <= hi],
    }
    _emit_summary(config, summary)
    return EXIT_OK if monotone and window_deviation <= FIG2_TOL else EXIT_VIOLATION


def _reversibility_row(params: GaussParams) -> dict:
    equal, diff = reversibility_check(params)
    return dict(h13=params.h13, h14=params.h14, h23=params.h23, h24=params.h24, hC=params.hC, theta=params.theta, primed_equal=equal, min_diff=diff)


def cmd_reversibility(config: RunConfig, args: dict) -> int:
    grid = config.grid if config.grid is not None else range(7)
    tuples = list(product(grid, repeat=5))
    grid_failures = 0
    for levels in tqdm.tqdm(tuples, unit="tuple", disable=not config.verbose):
        source, dest = primed_minima(levels)
        if source != dest:
            grid_failures += 1
            if config.verbose:
                print(f"primed minima differ at {levels}: {source} != {dest}")
    channels = sample_channels(args.pop("random"), config.seed, config.db_min, config.db_max)
    rows = ordered_map(_reversibility_row, channels, config.jobs, config.verbose, desc="channels")
    _emit_table(config, rows)
    max_diff = max((r["min_diff"] for r in rows), default=0.0)
    _emit_summary(config, {"grid_tuples": len(tuples), "grid_failures": grid_failures, "channels": len(rows), "max_min_diff": max_diff})
    return EXIT_OK if grid_failures == 0 and max_diff <= REVERSIBILITY_MAX_DIFF else EXIT_VIOLATION


COMMANDS = {
    "ld-capacity": cmd_report,
    "ld-verify": cmd_ld_verify,
    "ld-sim": cmd_ld_sim,
    "gauss-report": cmd_report,
    "gauss-gap": cmd_gauss_sweep,
    "feedback": cmd_feedback,
    "fig2": cmd_fig2,
    "reversibility": cmd_reversibility,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", "-o", type=str, default=None, help="path of the CSV table (JSON document for reports); reports go to stdout without it")
    common.add_argument("--seed", type=int, default=0, help="seed of the random sweeps")
    common.add_argument("--jobs", type=optional_int, default=1, help="worker processes for sweeps; 0 or None uses every core")
    common.add_argument("--json", type=str2bool, default=False, help="print the summary as JSON")
    common.add_argument("--verbose", type=str2bool, default=True, help="whether to print out the progress and summary")

    parser = argparse.ArgumentParser(prog="coopic", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("ld-capacity", parents=[common], formatter_class=fmt, help="bounds, regime and scheme of one deterministic channel")
    p.add_argument("levels", nargs=5, type=int, metavar="N", help="n13 n14 n23 n24 nC")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME, help="field size")

    p = sub.add_parser("ld-verify", parents=[common], formatter_class=fmt, help="achievable sum-rate against the capacity formula on a level grid")
    p.add_argument("--grid", type=int_range, default="0..5", help=f"levels 'a..b' (or 'b' for 0..b), at most {LD_GRID_MAX}")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME, help="field size")
    p.add_argument("--all_rows", type=str2bool, default=False, help="write every tuple, not only the mismatches")

    p = sub.add_parser("ld-sim", parents=[common], formatter_class=fmt, help="run a worked uncoded scheme over several seeds")
    p.add_argument("--example", type=int, default=1, choices=sorted(EXAMPLES))
    p.add_argument("--T", type=int, default=64, help="block length")
    p.add_argument("--seeds", type=int, default=100, help="number of consecutive seeds starting at --seed")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME, help="field size")
    p.add_argument("--zero", type=str2bool, default=False, help="all-zero messages")
    p.add_argument("--trace", type=str, default=None, help="write the first run's slot-by-slot trace as JSON here")

    p = sub.add_parser("gauss-report", parents=[common], formatter_class=fmt, help="bounds, achievable rate and gap of one Gaussian channel")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--db", nargs=5, type=float, metavar="DB", help="20*log10 of |h13| |h14| |h23| |h24| |hC|")
    group.add_argument("--magnitudes", nargs=5, type=float, metavar="H", help="|h13| |h14| |h23| |h24| |hC|")
    group.add_argument("--symmetric", nargs=2, type=float, metavar=("HD", "HC"), help="symmetric channel with cross magnitude sqrt(hD)")
    p.add_argument("--theta", type=float, default=0.0, help="phase arg(h14)+arg(h23)-arg(h13)-arg(h24)")

    sweep_help = "link SNRs 20*log10|h| are drawn uniformly in [db_min, db_max] dB (log-uniform magnitudes), theta uniformly"
    p = sub.add_parser("gauss-gap", parents=[common], formatter_class=fmt, help="upper bound minus achievable rate on random channels", description=sweep_help)
    p.add_argument("--count", type=int, default=10000, help="number of channels")
    p.add_argument("--db_min", type=float, default=DB_MIN)
    p.add_argument("--db_max", type=float, default=DB_MAX)
    p.add_argument("--regime", default="any", choices=["any", "I", "II", "III", "IV"], help="keep only channels in this regime")

    p = sub.add_parser("feedback", parents=[common], formatter_class=fmt, help="feedback bound and gap on a symmetric sweep")
    p.add_argument("--hD_db_max", type=float, default=60.0, help="largest 20*log10 hD")
    p.add_argument("--points", type=int, default=13, help="hD values, log-spaced from 0 dB")
    p.add_argument("--beta_step", type=float, default=0.125, help="step of beta in hI = hD^beta over [0, 1.5]")
    p.add_argument("--ld", nargs=2, type=int, default=None, metavar=("ND", "NI"), help="print the deterministic feedback capacity instead")

    p = sub.add_parser("fig2", parents=[common], formatter_class=fmt, help="normalized symmetric sum-capacity against alpha = log hC / log hD")
    p.add_argument("--hD_db", type=float, default=120.0, help="20*log10 hD; 120 dB is hD = 1e6")
    p.add_argument("--alpha_step", type=float, default=0.01)
    p.add_argument("--alpha_max", type=float, default=2.0)
    p.add_argument("--tol_alpha_min", type=float, default=FIG2_ALPHA_WINDOW[0], help="alphas below are reported but not held to the tolerance")
    p.add_argument("--tol_alpha_max", type=float, default=FIG2_ALPHA_WINDOW[1], help="alphas above are reported but not held to the tolerance")

    p = sub.add_parser("reversibility", parents=[common], formatter_class=fmt, help="source against destination cooperation bounds", description=sweep_help)
    p.add_argument("--grid", type=int_range, default="0..6", help="integer levels of the exhaustive primed check")
    p.add_argument("--random", type=int, default=10000, help="random Gaussian channels")
    p.add_argument("--db_min", type=float, default=DB_MIN)
    p.add_argument("--db_max", type=float, default=DB_MAX)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv).__dict__
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    subcommand: str = args.pop("subcommand")
    try:
        config = RunConfig(
            subcommand=subcommand,
            out=args.pop("out"),
            seed=args.pop("seed"),
            jobs=args.pop("jobs"),
            as_json=args.pop("json"),
            verbose=args.pop("verbose"),
            grid=args.pop("grid", None),
            count=args.pop("count", None),
            db_min=args.pop("db_min", DB_MIN),
            db_max=args.pop("db_max", DB_MAX),
        )
        return COMMANDS[subcommand](config, args)
    except ValueError as e:
        print(f"coopic {subcommand}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
