"""Multi-start quasi-Newton search for circuit parameters.

Each start draws a random parameter vector from its own RNG substream
(``SeedSequence(seed, spawn_key=(start,))``), runs a BFGS descent with the
analytic gradient and then, optionally, a few monotonic basin-hopping moves:
Gaussian kicks of the incumbent followed by a fresh descent, kept only when
they improve it. The search stops at the first start whose infidelity drops
below ``eps``; otherwise the lowest-index best start wins.

For large N a uniform start distribution essentially never lands in a good
basin. ``continuation_from`` solves a small member of the target family first
and tracks a pool of its best minima up a geometric ladder of qubit numbers.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .circuit import CircuitParams, canonicalize, evaluator, total_twisting
from .targets import TargetSpec, materialize

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class MultiStartBudget:
    n_starts: int = 200
    eps: float = 1e-12
    gtol: float = 1e-10
    max_iter: int = 5000
    method: str = "BFGS"
    # end the search once a start gets below this (defaults to eps)
    stop_below: float | None = None
    # keep searching until this many starts reach stop_level, then return the
    # one with the least total twisting
    n_solutions: int = 1
    # basin-hopping moves per start, and the kick standard deviation
    n_hops: int = 0
    hop_scale: float = 0.5
    # OAT angles drawn from U(-twist_range, twist_range); None means U[0, 2pi)
    twist_range: float | None = None
    # homotopy in N: solve at this N first, then grow by continuation_growth
    continuation_from: int | None = None
    continuation_growth: float = 1.15
    continuation_pool: int = 6
    workers: int = 1

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.method not in ("BFGS", "L-BFGS-B"):
            raise ValueError(f"unsupported local method {self.method!r}")

    @property
    def stop_level(self) -> float:
        return self.eps if self.stop_below is None else max(self.eps, self.stop_below)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class LocalResult:
    start: int
    x0: np.ndarray
    x: np.ndarray
    cost: float
    grad_norm: float
    n_evals: int


@dataclass
class OptimizationRecord:
    target: TargetSpec
    p_layers: int
    seed: int
    best_params: CircuitParams
    best_infidelity: float
    n_starts: int
    n_objective_evals: int
    converged: bool
    wall_time: float
    best_start: int = 0
    start_point: list = field(default_factory=list)
    grad_norm: float = float("nan")
    start_costs: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)

    @property
    def total_twisting(self) -> float:
        return float(np.sum(np.abs(self.best_params.twisting_angles)))


class _Converged(Exception):
    pass


def local_descent(x0, n_qubits: int, target: np.ndarray, budget: MultiStartBudget):
    """One quasi-Newton descent; returns ``(x, cost, grad_norm, n_evals)``."""
    ev = evaluator(n_qubits)
    best = {"cost": np.inf, "x": np.array(x0, dtype=float), "g": np.inf, "n": 0}

    def fun(x):
        cost, grad = ev.cost_grad(x, target)
        best["n"] += 1
        if cost < best["cost"]:
            best.update(cost=cost, x=x.copy(), g=float(np.linalg.norm(grad)))
        if cost < budget.eps:
            raise _Converged
        return cost, grad

    options = {"maxiter": budget.max_iter, "gtol": budget.gtol}
    if budget.method == "L-BFGS-B":
        options["ftol"] = 1e-16
    try:
        minimize(fun, np.array(x0, dtype=float), jac=True, method=budget.method, options=options)
    except _Converged:
        pass
    return best["x"], float(max(best["cost"], 0.0)), best["g"], best["n"]


def start_rng(seed: int, start: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(start,)))


def draw_start(rng: np.random.Generator, p_layers: int, budget: MultiStartBudget) -> np.ndarray:
    x = rng.uniform(0.0, TWO_PI, 3 * p_layers + 2)
    if budget.twist_range is not None and p_layers:
        x[2::3] = rng.uniform(-budget.twist_range, budget.twist_range, p_layers)
    return x


def run_start(start: int, seed: int, p_layers: int, n_qubits: int, target: np.ndarray,
              budget: MultiStartBudget, x0=None) -> LocalResult:
    rng = start_rng(seed, start)
    x_init = draw_start(rng, p_layers, budget) if x0 is None else np.array(x0, dtype=float)
    x, cost, gnorm, n_evals = local_descent(x_init, n_qubits, target, budget)
    for _ in range(budget.n_hops):
        if cost < budget.eps:
            break
        x2, c2, g2, n2 = local_descent(x + rng.normal(0.0, budget.hop_scale, x.size), n_qubits, target, budget)
        n_evals += n2
        if c2 < cost:
            x, cost, gnorm = x2, c2, g2
    return LocalResult(start, x_init, x, cost, gnorm, n_evals)


def _run_chunk(args):
    starts, seed, p_layers, n_qubits, target, budget, guesses = args
    return [run_start(s, seed, p_layers, n_qubits, target, budget, guesses.get(s)) for s in starts]


def multistart(n_qubits: int, target: np.ndarray, p_layers: int, budget: MultiStartBudget, seed: int,
               initial_guesses=()) -> list[LocalResult]:
    """Run starts in index order until one converges; returns the results actually used.

    ``initial_guesses`` replace the random draws of the first starts.
    """
    guesses = {i: np.asarray(g, dtype=float) for i, g in enumerate(initial_guesses)}
    n_total = budget.n_starts
    results: list[LocalResult] = []
    found = 0
    if budget.workers <= 1:
        for s in range(n_total):
            res = run_start(s, seed, p_layers, n_qubits, target, budget, guesses.get(s))
            results.append(res)
            found += res.cost < budget.stop_level
            if found >= budget.n_solutions:
                break
        return results
    chunk = budget.workers
    with ProcessPoolExecutor(max_workers=budget.workers) as pool:
        for lo in range(0, n_total, chunk):
            starts = list(range(lo, min(n_total, lo + chunk)))
            jobs = [([s], seed, p_layers, n_qubits, target, budget, guesses) for s in starts]
            batch = [r for part in pool.map(_run_chunk, jobs) for r in part]
            for res in batch:
                results.append(res)
                found += res.cost < budget.stop_level
                if found >= budget.n_solutions:
                    # identical to the sequential outcome: drop later starts
                    return results
    return results


def _twisting(x: np.ndarray, n_qubits: int) -> float:
    return total_twisting(canonicalize(CircuitParams.from_vector(x), n_qubits))


def _best(results: list[LocalResult], budget: MultiStartBudget, n_qubits: int) -> LocalResult:
    solutions = [r for r in results if r.cost < budget.stop_level]
    if budget.n_solutions > 1 and solutions:
        return min(solutions, key=lambda r: (_twisting(r.x, n_qubits), r.start))
    return min(results, key=lambda r: (r.cost, r.start))


def _ladder(n_from: int, n_to: int, growth: float, keep_parity: bool) -> list[int]:
    steps = []
    n = n_from
    while n < n_to:
        nxt = min(n_to, max(n + 1, int(n * growth) + 1))
        if keep_parity and (nxt - n) % 2:
            nxt = min(n_to, nxt + 1)
        steps.append(nxt)
        n = nxt
    return steps


def _continuation(spec: TargetSpec, p_layers: int, budget: MultiStartBudget, seed: int):
    n0 = budget.continuation_from
    keep_parity = spec.kind == "dicke"
    if keep_parity and (spec.n_qubits - n0) % 2:
        n0 += 1
    small = spec.resized(n0)
    base = replace(budget, continuation_from=None)
    # the small problem is solved with a full start budget and no early exit
    results = multistart(n0, np.ascontiguousarray(materialize(small).amplitudes), p_layers,
                         replace(base, eps=0.0, stop_below=None), seed)
    n_evals = sum(r.n_evals for r in results)
    pool = _distinct(sorted(results, key=lambda r: (r.cost, r.start)), budget.continuation_pool)
    n_prev = n0
    for n in _ladder(n0, spec.n_qubits, budget.continuation_growth, keep_parity):
        target = np.ascontiguousarray(materialize(spec.resized(n)).amplitudes)
        candidates = []
        for res in pool:
            for alpha in (0.0, 1 / 3, 2 / 3, 1.0):
                x0 = res.x.copy()
                x0[2::3] *= (n_prev / n) ** alpha
                x, cost, gnorm, ne = local_descent(x0, n, target, base)
                n_evals += ne
                candidates.append(LocalResult(res.start, res.x0, x, cost, gnorm, ne))
        pool = _distinct(sorted(candidates, key=lambda r: (r.cost, r.start)), budget.continuation_pool)
        log.info("continuation N=%d best=%.3e", n, pool[0].cost)
        n_prev = n
    return results, pool, n_evals


def _distinct(results: list[LocalResult], k: int) -> list[LocalResult]:
    kept: list[LocalResult] = []
    for r in results:
        if all(abs(r.cost - q.cost) > 1e-6 * max(q.cost, 1e-300) for q in kept):
            kept.append(r)
        if len(kept) == k:
            break
    return kept


def optimize(target: TargetSpec, p_layers: int, budget: MultiStartBudget | None = None, seed: int = 0,
             initial_guesses=()) -> OptimizationRecord:
    """Search for parameters preparing ``target`` with ``p_layers`` layers."""
    budget = budget or MultiStartBudget()
    t0 = time.perf_counter()
    n = target.n_qubits
    if budget.continuation_from is not None and budget.continuation_from < n:
        results, pool, n_evals = _continuation(target, p_layers, budget, seed)
        best = pool[0]
    else:
        amps = np.ascontiguousarray(materialize(target).amplitudes)
        results = multistart(n, amps, p_layers, budget, seed, initial_guesses)
        best = _best(results, budget, n)
        n_evals = sum(r.n_evals for r in results)
    return OptimizationRecord(
        target=target,
        p_layers=p_layers,
        seed=seed,
        best_params=canonicalize(CircuitParams.from_vector(best.x), n),
        best_infidelity=float(min(1.0, best.cost)),
        n_starts=len(results),
        n_objective_evals=n_evals,
        converged=bool(best.cost <= budget.eps),
        wall_time=time.perf_counter() - t0,
        best_start=best.start,
        start_point=best.x0.tolist(),
        grad_norm=best.grad_norm,
        start_costs=[r.cost for r in results],
        budget=budget.to_dict(),
    )
