"""Depth sweeps over Haar-random targets and the location of the controllability transition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .optimize import MultiStartBudget, optimize
from .spin import DomainError
from .targets import TargetSpec

SUCCESS_LEVEL = 1e-10
SUCCESS_QUANTILE = 0.95


@dataclass
class SweepResult:
    n_qubits: int
    p_values: list[int]
    infidelities: np.ndarray  # (target, P)
    target_seeds: list[int] = field(default_factory=list)
    params: dict = field(default_factory=dict)  # (target index, P) -> parameter vector
    success_level: float = SUCCESS_LEVEL
    success_quantile: float = SUCCESS_QUANTILE

    @property
    def transition_p(self) -> int | None:
        """Smallest P where the success quantile of targets is below the success level."""
        for j, p in enumerate(self.p_values):
            if np.mean(self.infidelities[:, j] < self.success_level) >= self.success_quantile:
                return p
        return None

    def median(self) -> np.ndarray:
        return np.median(self.infidelities, axis=0)

    def quantile(self, q: float) -> np.ndarray:
        return np.quantile(self.infidelities, q, axis=0)

    def median_at(self, p: int) -> float:
        return float(self.median()[self.p_values.index(p)])


def derived_seed(master: int, *key: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=key).generate_state(1)[0])


def sweep_depth(n_qubits: int, n_targets: int, p_range, budget: MultiStartBudget | None = None,
                seed: int = 0, progress=None) -> SweepResult:
    """Optimize every (Haar target, P) pair.

    Each P run is warm-started from the best P-1 parameters padded with an
    identity layer, so per-target infidelity is non-increasing in P.
    """
    p_values = sorted(int(p) for p in p_range)
    if not p_values:
        raise DomainError("p_range must be nonempty")
    budget = budget or MultiStartBudget(n_starts=4)
    seeds = [derived_seed(seed, 0, i) for i in range(n_targets)]
    infid = np.ones((n_targets, len(p_values)))
    params = {}
    for i, tseed in enumerate(seeds):
        spec = TargetSpec("haar", n_qubits, seed=tseed)
        prev = None
        for j, p in enumerate(p_values):
            guesses = []
            if prev is not None:
                x = prev.to_vector()
                pad = np.zeros(3 * (p - prev.p_layers))
                guesses = [np.concatenate([x, pad])]
            rec = optimize(spec, p, budget, seed=derived_seed(seed, 1, i, p), initial_guesses=guesses)
            infid[i, j] = rec.best_infidelity
            prev = rec.best_params
            params[(i, p)] = rec.best_params.to_vector().tolist()
            if progress is not None:
                progress(i, p, rec)
    return SweepResult(n_qubits, p_values, infid, seeds, params)


def fit_scaling(results) -> tuple[float, float]:
    """Least-squares line ``transition_p ~ slope * N + intercept``.

    Accepts :class:`SweepResult` objects or plain ``(N, transition_p)`` pairs.
    """
    points = []
    for r in results:
        if isinstance(r, SweepResult):
            if r.transition_p is None:
                raise DomainError(f"no transition found for N={r.n_qubits}")
            points.append((r.n_qubits, r.transition_p))
        else:
            points.append((float(r[0]), float(r[1])))
    if len({n for n, _ in points}) < 3:
        raise DomainError("fit_scaling needs at least 3 distinct N")
    n, p = np.array(points, dtype=float).T
    slope, intercept = np.polyfit(n, p, 1)
    return float(slope), float(intercept)


def sweep_summary(result: SweepResult) -> list[dict]:
    med = result.median()
    q95 = result.quantile(0.95)
    return [
        {"N": result.n_qubits, "P": p, "median_infidelity": float(m), "q95_infidelity": float(q)}
        for p, m, q in zip(result.p_values, med, q95)
    ]


def default_p_range(n_qubits: int, below: int = 3, above: int = 4) -> list[int]:
    """P values bracketing ceil(2N/3)."""
    centre = -(-2 * n_qubits // 3)
    return list(range(max(1, centre - below), centre + above + 1))

