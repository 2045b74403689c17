"""Single-setting fidelity proxy for a prepared codeword, versus shot count."""
import argparse

from dickeprep.circuit import run_circuit
from dickeprep.optimize import MultiStartBudget, optimize
from dickeprep.targets import TargetSpec, materialize
from dickeprep.tomography import fidelity_proxy, proxy_report, sample_excitation_histogram, setting_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    spec = TargetSpec("ruskai-r1", 9)
    rec = optimize(spec, 4, MultiStartBudget(n_starts=500, n_hops=10), seed=args.seed)
    prepared, target = run_circuit(rec.best_params, 9), materialize(spec)
    print(f"1-F = {rec.best_infidelity:.2e}; full PI tomography needs {setting_count(9)} settings")
    print(f"exact proxy {fidelity_proxy(prepared.populations, target):.6f}")
    for k, shots in enumerate((10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)):
        rep = proxy_report(sample_excitation_histogram(prepared, shots, args.seed + k), target, prepared)
        print(f"{shots:>8d} shots: proxy {rep.proxy:.6f} +- {rep.std_error:.6f}")


if __name__ == "__main__":
    main()
