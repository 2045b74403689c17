"""W and middle Dicke states at large N, solved by continuation in N."""
import argparse
import time
from pathlib import Path

from dickeprep import io
from dickeprep.optimize import MultiStartBudget, optimize
from dickeprep.targets import TargetSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 200, 300])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--start-n", type=int, default=20, help="qubit number where continuation begins")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    budget = MultiStartBudget(continuation_from=args.start_n)
    rows = []
    t0 = time.perf_counter()
    for n in args.n:
        for spec, p in ((TargetSpec("w", n), 3), (TargetSpec("dicke", n, m=0), 4)):
            if spec.kind == "dicke" and n % 2:
                continue
            t1 = time.perf_counter()
            rec = optimize(spec, p, budget, seed=args.seed)
            rows.append(io.record_to_dict(rec))
            print(f"{spec.label():8s} N={n:4d} P={p}: 1-F={rec.best_infidelity:.2e} "
                  f"({time.perf_counter() - t1:.0f}s)", flush=True)
    out = io.write_jsonl(args.out / "large_n.jsonl", rows)
    io.write_manifest(args.out, "large_n", vars(args), args.seed, time.perf_counter() - t0, [out])


if __name__ == "__main__":
    main()
