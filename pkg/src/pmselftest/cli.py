"""Command-line front-end.

Subcommands: classical, seesaw, bounds, curve, sweep, sdp-fidelity, verify.
Every run writes a JSON manifest next to its outputs; numeric output uses
12 significant digits; CSV files are header + LF rows with dot decimals.

Exit codes: 0 success, 2 usage error, 3 numerical failure (non-convergence,
budget exhaustion, infeasibility, or a failed verification).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    jordan_parameters,
    meas_compat_bound_2,
    meas_compat_bound_N,
    prep_compat_bound_2,
    prep_compat_bound_N,
    qutrit_bound,
)
from .errors import BudgetError, InfeasibleError, NonConvergenceError
from .fidelity import (
    Q2,
    S_STAR,
    conjectured_curve_meas,
    conjectured_curve_states,
    conjectured_upper_bound,
    linear_lower_bound,
    sweep_operator_inequalities,
)
from .scenario import (
    Strategy,
    Witness,
    classical_bound,
    ideal_example2_strategy,
    ideal_rac2_strategy,
    load_strategy,
    load_witness,
    make_biased_rac_witness,
    make_example2_witness,
    make_rac_witness,
    save_strategy,
    witness_value,
)
from .sdp import SwapSdp, example2_swap_ideal_states, rac2_swap_ideal_states
from .seesaw import region_sweep, seesaw

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


def fmt(x) -> str:
    return f"{float(x):.12g}"


def parse_witness(spec: str) -> tuple:
    """Resolve --witness into (name, Witness). Accepts builtin:<name> or a
    file path; builtins: rac<N>, racN:<N>, biased:<q> (or biased(<q>)),
    example2."""
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        m = re.fullmatch(r"rac(\d+)", name) or re.fullmatch(r"racN:(\d+)", name)
        if m:
            return name, make_rac_witness(int(m.group(1)))
        m = re.fullmatch(r"biased[:(](-?[\d.eE+-]+)\)?", name)
        if m:
            return name, make_biased_rac_witness(float(m.group(1)))
        if name == "example2":
            return name, make_example2_witness()
        raise argparse.ArgumentTypeError(f"unknown builtin witness {name!r}")
    return Path(spec).stem, load_witness(spec)


def _ideal_strategy_for(name: str) -> Strategy:
    if name == "example2":
        return ideal_example2_strategy()
    if re.fullmatch(r"rac2|racN:2|biased[:(].*", name):
        return ideal_rac2_strategy()
    raise ValueError(f"no ideal reference strategy registered for witness {name!r}")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row) + "\n")


def write_manifest(out: Path, subcommand: str, args: argparse.Namespace, outputs, wall_s: float) -> Path:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}
    doc = {
        "subcommand": subcommand,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "wall_s": round(wall_s, 3),
        "outputs": [str(p) for p in outputs],
    }
    path = out / f"manifest-{subcommand}.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, default=str)
    return path


def cmd_classical(args, out: Path):
    name, witness = parse_witness(args.witness)
    value = classical_bound(witness, args.dim)
    print(fmt(value))
    csv = out / "classical.csv"
    write_csv(csv, ["witness", "dim", "value"], [(name, args.dim, value)])
    return [csv]


def cmd_seesaw(args, out: Path):
    name, witness = parse_witness(args.witness)
    result = seesaw(witness, args.dim, restarts=args.restarts, rng=args.seed)
    print(fmt(result.best_value))
    strategy_path = out / "strategy.json"
    save_strategy(result.best_strategy, strategy_path)
    csv = out / "seesaw.csv"
    write_csv(
        csv,
        ["witness", "dim", "restarts", "seed", "best_value", "iterations"],
        [(name, args.dim, args.restarts, args.seed, result.best_value, result.iterations)],
    )
    return [csv, strategy_path]


def cmd_bounds(args, out: Path):
    strategy = load_strategy(args.strategy)
    rows = []
    n_prep, n_meas = len(strategy.preparations), len(strategy.measurements)
    if strategy.dim == 2:
        if n_prep == 4 and n_meas == 2:
            rep = prep_compat_bound_2(strategy.preparations)
            rows.append(("prep_compat_bound_2", rep.bound, f"beta={fmt(rep.beta)};alpha={fmt(rep.alpha)}"))
        obs = strategy.observables if all(m.n_outcomes == 2 for m in strategy.measurements) else ()
        if len(obs) == 2:
            rep = meas_compat_bound_2(*obs)
            rows.append(("meas_compat_bound_2", rep.bound, f"mu={fmt(rep.mu)};nu={fmt(rep.nu)}"))
        if n_prep == 2**n_meas and n_meas >= 2:
            rows.append(("prep_compat_bound_N", prep_compat_bound_N(strategy.preparations, n_meas), f"N={n_meas}"))
        if obs:
            rows.append(("meas_compat_bound_N", meas_compat_bound_N(obs), f"N={len(obs)}"))
    elif strategy.dim == 3 and n_meas == 2 and all(m.n_outcomes == 2 for m in strategy.measurements):
        angle, r, s = jordan_parameters(*strategy.observables)
        rows.append(("qutrit_bound", qutrit_bound(angle, r, s), f"alpha={fmt(angle)};r={r};s={s}"))
    if not rows:
        raise ValueError("no analytic bound applies to this strategy shape")
    for nm, val, p in rows:
        print(f"{nm},{fmt(val)},{p}")
    csv = out / "bounds.csv"
    write_csv(csv, ["bound", "value", "parameters"], rows)
    return [csv]


def cmd_curve(args, out: Path):
    n = args.points
    if n < 2:
        raise ValueError("need at least 2 points")
    rows = []
    if args.which == "lower":
        for a2 in np.linspace(0.75, Q2, n):
            rows.append((a2, a2, linear_lower_bound(a2)))
    elif args.which == "upper-conjecture":
        for a2 in np.linspace(0.75, Q2, n):
            rows.append((a2, a2, conjectured_upper_bound(a2)))
    elif args.which == "states":
        for phi in np.linspace(0.0, np.pi / 4, n):
            a2, f = conjectured_curve_states(phi)
            rows.append((phi, a2, f))
    else:  # meas
        for theta in np.linspace(0.0, np.pi / 8, n):
            a2, f = conjectured_curve_meas(theta)
            rows.append((theta, a2, f))
    csv = out / f"curve-{args.which}.csv"
    write_csv(csv, ["parameter", "A2", "F"], rows)
    print(f"wrote {len(rows)} points to {csv}")
    return [csv]


def cmd_sweep(args, out: Path):
    name, witness = parse_witness(args.witness)
    ideal = _ideal_strategy_for(name)
    master = np.random.default_rng(args.seed)
    threads = max(1, args.threads)
    chunks = np.array_split(np.arange(args.samples), min(threads, args.samples))
    streams = master.spawn(len(chunks))

    def run_chunk(pair):
        chunk, stream = pair
        return region_sweep(witness, ideal, len(chunk), rng=stream) if len(chunk) else []

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, zip(chunks, streams)))
    else:
        parts = [run_chunk(p) for p in zip(chunks, streams)]
    rows = [row for part in parts for row in part]
    csv = out / "sweep.csv"
    write_csv(csv, ["A2", "F_states", "F_meas"], rows)
    print(f"wrote {len(rows)} points to {csv}")
    return [csv]


def cmd_sdp_fidelity(args, out: Path):
    name, witness = parse_witness(args.witness)
    if name == "example2":
        ideal = example2_swap_ideal_states()
    elif name == "rac2":
        ideal = rac2_swap_ideal_states()
    else:
        raise ValueError("sdp-fidelity supports builtin:rac2 and builtin:example2")
    sdp = SwapSdp(witness, ideal, rng=args.seed)
    if args.grid and args.grid > 1:
        lo = args.a_star_min if args.a_star_min is not None else classical_bound(witness, 2)
        grid = np.linspace(lo, args.a_star, args.grid)
    else:
        grid = [args.a_star]
    threads = max(1, args.threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(sdp.fidelity_bound, grid))
    else:
        results = [sdp.fidelity_bound(a) for a in grid]
    rows = [
        (a, r.value, r.gap, sdp.rank, round(r.solve_s * 1000, 3))
        for a, r in zip(grid, results)
    ]
    for a, val, gap, rank, ms in rows:
        print(f"A*={fmt(a)} bound={fmt(val)} gap={gap:.2e} rank={rank}")
    csv = out / "sdp-fidelity.csv"
    write_csv(csv, ["A_star", "bound", "gap", "rank", "solve_ms"], rows)
    return [csv]


def cmd_verify(args, out: Path):
    s = S_STAR if args.s == "auto" else float(args.s)
    ok, min_tp, min_tm, min_resid = sweep_operator_inequalities(grid=args.grid, s=s)
    which = args.ineq
    shown = []
    if which in ("prep", "both"):
        shown.append(("prep", min_tp))
    if which in ("meas", "both"):
        shown.append(("meas", min_tm))
    status = "PASS" if ok else "FAIL"
    print(f"{status} min_residual={fmt(min_resid)} " + " ".join(f"min_t_{n}={fmt(t)}" for n, t in shown))
    csv = out / "verify.csv"
    write_csv(csv, ["ineq", "s", "grid", "status", "min_residual", "min_t_prep", "min_t_meas"],
              [(which, s, args.grid, status, min_resid, min_tp, min_tm)])
    if not ok:
        raise NonConvergenceError("operator inequality sweep failed")
    return [csv]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmselftest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    default_threads = int(os.environ.get("SDI_SELFTEST_THREADS", "1"))
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed=True):
        p.add_argument("--out", default="./out", help="output directory (default ./out)")
        p.add_argument("--threads", type=int, default=default_threads,
                       help="worker threads (default $SDI_SELFTEST_THREADS or 1)")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="master RNG seed")

    p = sub.add_parser("classical", help="exact classical bound by enumeration")
    p.add_argument("--witness", required=True)
    p.add_argument("--dim", type=int, required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("seesaw", help="alternating optimization of a witness")
    p.add_argument("--witness", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_seesaw)

    p = sub.add_parser("bounds", help="analytic compatibility bounds for a strategy file")
    p.add_argument("--strategy", required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("curve", help="fidelity curves as CSV")
    p.add_argument("--which", choices=["lower", "states", "meas", "upper-conjecture"], required=True)
    p.add_argument("--points", type=int, default=101)
    common(p, seed=False)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("sweep", help="random-strategy fidelity scatter")
    p.add_argument("--witness", default="builtin:rac2")
    p.add_argument("--samples", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sdp-fidelity", help="swap-method SDP fidelity lower bounds")
    p.add_argument("--witness", required=True)
    p.add_argument("--a-star", type=float, required=True)
    p.add_argument("--a-star-min", type=float, default=None)
    p.add_argument("--grid", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_sdp_fidelity)

    p = sub.add_parser("verify", help="operator-inequality sweep verification")
    p.add_argument("--ineq", choices=["prep", "meas", "both"], default="both")
    p.add_argument("--s", default="auto")
    p.add_argument("--grid", type=int, default=721)
    common(p, seed=False)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        outputs = args.func(args, out)
    except (argparse.ArgumentTypeError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NonConvergenceError, BudgetError, InfeasibleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    write_manifest(out, args.subcommand, args, outputs, time.perf_counter() - t0)
    return 0


def main() -> None:
    sys.exit(run())
