"""Depth sweeps over Haar-random symmetric targets and the transition-depth scaling.

The defaults are desk-scale. Larger studies (for example ``--targets 200
--n 6 9 12 15 20 30 50 --starts 10``) use the same code and take hours.
"""
import argparse
import time
from pathlib import Path

from dickeprep import io
from dickeprep.optimize import MultiStartBudget
from dickeprep.study import default_p_range, fit_scaling, sweep_depth, sweep_summary


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 9, 12, 15])
    ap.add_argument("--targets", type=int, default=20)
    ap.add_argument("--starts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    budget = MultiStartBudget(n_starts=args.starts)
    results, rows = [], []
    t0 = time.perf_counter()
    for n in args.n:
        res = sweep_depth(n, args.targets, default_p_range(n), budget, seed=args.seed)
        results.append(res)
        rows.extend({**r, "transition_p": res.transition_p} for r in sweep_summary(res))
        print(f"N={n:3d}: transition P={res.transition_p}  medians "
              + " ".join(f"{p}:{m:.1e}" for p, m in zip(res.p_values, res.median())), flush=True)
    slope, intercept = fit_scaling(results)
    print(f"transition_p ~ {slope:.3f} N + {intercept:.2f}")
    header = ["N", "P", "median_infidelity", "q95_infidelity", "transition_p"]
    out = io.write_csv(args.out / "controllability.csv", header, ([r[h] for h in header] for r in rows))
    io.write_manifest(args.out, "controllability", vars(args), args.seed, time.perf_counter() - t0, [out],
                      {"slope": slope, "intercept": intercept})


if __name__ == "__main__":
    main()
