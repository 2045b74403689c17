"""Command-line front end.

Exit codes: 0 success (optimize: converged below eps), 2 budget exhausted
without convergence, 1 usage or domain error. Every run writes a manifest
next to its outputs; data files are deterministic given the seed.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .circuit import run_circuit
from .husimi import husimi_q, normalization, snapshot_sequence
from .noise import (
    BeamProfile,
    dephasing_fidelity_estimate,
    equilibrium_positions,
    intensity_noise_stats,
    nonglobal_infidelity,
)
from .optimize import MultiStartBudget, optimize
from .spin import DomainError, ResourceLimitError, fidelity
from .study import derived_seed, sweep_depth, sweep_summary
from .targets import TargetSpec, materialize
from .tomography import proxy_report, sample_excitation_histogram

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2

log = logging.getLogger("dickeprep")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _p_range(text: str) -> list[int]:
    lo, sep, hi = text.partition(":")
    try:
        values = list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P or PMIN:PMAX, got {text!r}") from None
    if not values or values[0] < 0:
        raise argparse.ArgumentTypeError(f"empty or negative P range {text!r}")
    return values


def _grid(text: str) -> tuple[int, int]:
    a, sep, b = text.lower().partition("x")
    try:
        shape = (int(a), int(b)) if sep else (int(a), int(a))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NTHETAxNPHI, got {text!r}") from None
    if min(shape) < 2:
        raise argparse.ArgumentTypeError("grid sizes must be >= 2")
    return shape


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--threads", type=int, default=1, help="cap on worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    budget = _Parser(add_help=False)
    budget.add_argument("--starts", type=int, default=200)
    budget.add_argument("--hops", type=int, default=10, help="basin-hopping moves per start")
    budget.add_argument("--eps", type=float, default=1e-12)
    budget.add_argument("--max-iter", type=int, default=5000)
    budget.add_argument("--stop-below", type=float, default=None)
    budget.add_argument("--solutions", type=int, default=1,
                        help="collect this many solutions and keep the least total twisting")
    budget.add_argument("--twist-range", type=float, default=None)
    budget.add_argument("--continuation-from", type=int, default=None)

    target = _Parser(add_help=False)
    target.add_argument("--target", type=str, default=None,
                        help="dicke:M, w, ghz, ruskai-r0, ruskai-r1, gross-g0, gross-g1, haar:SEED")
    target.add_argument("--n", type=int, default=None, help="number of qubits")

    parser = _Parser(prog="dickeprep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", parents=[common, budget, target])
    p.add_argument("--p", type=int, required=True, help="number of layers")

    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--targets", type=int, default=20)
    p.add_argument("--p", type=_p_range, required=True, help="PMIN:PMAX inclusive")
    p.add_argument("--starts", type=int, default=4)

    p = sub.add_parser("noise", parents=[common, target])
    p.add_argument("--load", type=Path, required=True, help="parameter file")
    p.add_argument("--delta-phi", type=_floats, default=None, help="intensity noise levels")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--sigma", type=_floats, default=None, help="beam widths for the non-global gate")
    p.add_argument("--gamma", type=float, default=None, help="dephasing rate (rad/s)")
    p.add_argument("--delta", type=float, default=2 * np.pi * 20e3, help="MS detuning (rad/s)")

    p = sub.add_parser("tomography", parents=[common, target])
    p.add_argument("--load", type=Path, default=None, help="parameter file of the prepared state")
    p.add_argument("--shots", type=int, default=10 ** 5)

    p = sub.add_parser("husimi", parents=[common, target])
    p.add_argument("--load", type=Path, default=None)
    p.add_argument("--grid", type=_grid, default=(200, 200))
    return parser


# ---------------------------------------------------------------------------

def _target(args, n_default: int | None = None) -> TargetSpec:
    n = args.n if args.n is not None else n_default
    if args.target is None or n is None:
        raise UsageError("need --target and --n")
    return TargetSpec.parse(args.target, n)


def _target_for_loaded(args, n: int, stored: TargetSpec | None) -> TargetSpec:
    if args.target is not None:
        return _target(args, n)
    if stored is None:
        raise UsageError("parameter file has no target; pass --target")
    return stored


def cmd_optimize(args) -> int:
    spec = _target(args)
    if args.p < 0:
        raise UsageError("--p must be >= 0")
    budget = MultiStartBudget(
        n_starts=args.starts, eps=args.eps, max_iter=args.max_iter, stop_below=args.stop_below,
        n_solutions=args.solutions, n_hops=args.hops, twist_range=args.twist_range,
        continuation_from=args.continuation_from, workers=max(1, args.threads),
    )
    rec = optimize(spec, args.p, budget, seed=args.seed)
    stem = f"optimize_{spec.label().replace(':', '_')}_n{spec.n_qubits}_p{args.p}"
    rec_path = io.write_jsonl(args.out / f"{stem}.jsonl", [io.record_to_dict(rec)])
    par_path = io.save_params(args.out / f"{stem}.params.json", rec.best_params, spec.n_qubits, spec)
    io.write_manifest(args.out, stem, vars(args), args.seed, rec.wall_time, [rec_path, par_path],
                      {"best_infidelity": rec.best_infidelity, "converged": rec.converged})
    print(f"{spec.label()} N={spec.n_qubits} P={args.p}: infidelity {rec.best_infidelity:.3e} "
          f"after {rec.n_starts} starts ({'converged' if rec.converged else 'budget exhausted'})")
    return EXIT_OK if rec.converged else EXIT_BUDGET


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    budget = MultiStartBudget(n_starts=args.starts, workers=max(1, args.threads))
    records = []

    def progress(i, p, rec):
        records.append({"N": args.n, "target_index": i, "target": rec.target.to_dict(), "P": p,
                        "infidelity": rec.best_infidelity, "n_starts": rec.n_starts})
        log.info("target %d P=%d infidelity %.3e", i, p, rec.best_infidelity)

    res = sweep_depth(args.n, args.targets, args.p, budget, seed=args.seed, progress=progress)
    stem = f"sweep_n{args.n}"
    summary = {"N": args.n, "n_targets": args.targets, "p_values": res.p_values,
               "transition_p": res.transition_p, "median_infidelity": res.median().tolist(),
               "q95_infidelity": res.quantile(0.95).tolist(), "summary": True}
    jl = io.write_jsonl(args.out / f"{stem}.jsonl", records + [summary])
    grid = io.write_csv(args.out / f"{stem}.csv", ["N", "P", "median_infidelity", "q95_infidelity"],
                        [(r["N"], r["P"], r["median_infidelity"], r["q95_infidelity"]) for r in sweep_summary(res)])
    io.write_manifest(args.out, stem, vars(args), args.seed, time.perf_counter() - t0, [jl, grid])
    print(f"N={args.n}: transition_p = {res.transition_p}")
    return EXIT_OK if res.transition_p is not None else EXIT_BUDGET


def cmd_noise(args) -> int:
    t0 = time.perf_counter()
    params, n, stored = io.load_params(args.load)
    spec = _target_for_loaded(args, n, stored)
    target = materialize(spec)
    records, rows = [], []
    if args.delta_phi is None and args.sigma is None and args.gamma is None:
        raise UsageError("choose at least one of --delta-phi, --sigma, --gamma")
    for i, dphi in enumerate(args.delta_phi or []):
        est = intensity_noise_stats(params, target, dphi, args.realizations, seed=derived_seed(args.seed, i))
        records.append({"model": "intensity", "delta_phi": dphi, "mean_infidelity": est.mean,
                        "std_error": est.std_error, "n_realizations": est.n_realizations})
        rows.append(("intensity", dphi, est.mean, est.std_error, est.n_realizations))
    if args.sigma:
        chain = equilibrium_positions(n)
        for s in args.sigma:
            inf = nonglobal_infidelity(params, chain, BeamProfile(s), target)
            records.append({"model": "nonglobal", "sigma": s, "mean_infidelity": inf, "std_error": 0.0,
                            "n_realizations": 1})
            rows.append(("nonglobal", s, inf, 0.0, 1))
    if args.gamma is not None:
        ideal = fidelity(run_circuit(params, n), target)
        f = dephasing_fidelity_estimate(n, params.p_layers, args.gamma, args.delta, ideal)
        records.append({"model": "dephasing", "gamma": args.gamma, "delta": args.delta,
                        "fidelity_estimate": f, "mean_infidelity": 1.0 - f})
        rows.append(("dephasing", args.gamma, 1.0 - f, 0.0, 1))
    stem = f"noise_{args.load.stem.replace('.params', '')}"
    jl = io.write_jsonl(args.out / f"{stem}.jsonl", records)
    grid = io.write_csv(args.out / f"{stem}.csv", ["model", "level", "mean_infidelity", "std_error", "n_realizations"], rows)
    io.write_manifest(args.out, stem, vars(args), args.seed, time.perf_counter() - t0, [jl, grid])
    for r in records:
        print(r)
    return EXIT_OK


def cmd_tomography(args) -> int:
    t0 = time.perf_counter()
    if args.load is not None:
        params, n, stored = io.load_params(args.load)
        spec = _target_for_loaded(args, n, stored)
        state = run_circuit(params, n)
    else:
        spec = _target(args)
        state = materialize(spec)
    target = materialize(spec)
    hist = sample_excitation_histogram(state, args.shots, args.seed)
    report = proxy_report(hist, target, exact_state=state)
    stem = f"tomography_{spec.label().replace(':', '_')}_n{spec.n_qubits}"
    hpath = io.write_histogram(args.out / f"{stem}.histogram.csv", hist)
    rpath = io.write_jsonl(args.out / f"{stem}.jsonl", [{"target": spec.to_dict(), **report.to_dict()}])
    io.write_manifest(args.out, stem, vars(args), args.seed, time.perf_counter() - t0, [hpath, rpath])
    print(f"proxy {report.proxy:.6f} +- {report.std_error:.1e} (exact {report.exact_proxy:.6f}, {hist.n_shots} shots)")
    return EXIT_OK


def cmd_husimi(args) -> int:
    t0 = time.perf_counter()
    n_theta, n_phi = args.grid
    if args.load is not None:
        params, n, _ = io.load_params(args.load)
        grids = snapshot_sequence(params, n, n_theta, n_phi)
        stem = f"husimi_{args.load.stem.replace('.params', '')}"
        described = io.params_to_dict(params, n)
    else:
        spec = _target(args)
        n = spec.n_qubits
        grids = [husimi_q(materialize(spec), n_theta, n_phi, "target")]
        stem = f"husimi_{spec.label().replace(':', '_')}_n{n}"
        described = {"target": spec.to_dict()}
    outdir = args.out / stem
    outdir.mkdir(parents=True, exist_ok=True)
    width = max(2, len(str(len(grids) - 1)))
    paths = [io.write_grid(outdir / f"stage_{i:0{width}d}_{g.label}.csv", g) for i, g in enumerate(grids)]
    stages = [{"index": i, "label": g.label, "file": p.name, "normalization": normalization(g)}
              for i, (g, p) in enumerate(zip(grids, paths))]
    io.write_manifest(outdir, "husimi", vars(args), args.seed, time.perf_counter() - t0, paths,
                      {"stages": stages, "params": described, "n_qubits": n})
    print(f"wrote {len(paths)} snapshot grids to {outdir}")
    return EXIT_OK


COMMANDS = {"optimize": cmd_optimize, "sweep": cmd_sweep, "noise": cmd_noise,
            "tomography": cmd_tomography, "husimi": cmd_husimi}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if not args.out.exists():
            args.out.mkdir(parents=True)
        if not args.out.is_dir():
            raise UsageError(f"output path {args.out} is not a directory")
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, ResourceLimitError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"dickeprep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
