"""Serialization: parameter files, JSON-lines records, CSV grids and run manifests.

Data files contain no timestamps or timings so that reruns with the same
seed are byte-identical; those live in the manifest only. Floats are written
with ``repr`` and therefore round-trip exactly.
"""
from __future__ import annotations

import csv
import datetime
import json
import math
import platform
from pathlib import Path

import numpy as np

from .circuit import CircuitParams
from .husimi import QGrid
from .optimize import OptimizationRecord
from .spin import CssAngles
from .targets import TargetSpec
from .tomography import ExcitationHistogram


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if value is None or isinstance(value, (str, int, bool)):
        return value
    return str(value)


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, allow_nan=False)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def params_to_dict(params: CircuitParams, n_qubits: int) -> dict:
    return {"n": n_qubits, "p": params.p_layers,
            "css": [params.css.theta, params.css.phi],
            "layers": [list(layer) for layer in params.layers]}


def params_from_dict(data: dict) -> tuple[CircuitParams, int]:
    layers = tuple(tuple(float(v) for v in layer) for layer in data["layers"])
    if "p" in data and int(data["p"]) != len(layers):
        raise ValueError(f"parameter file declares p={data['p']} but has {len(layers)} layers")
    theta, phi = data["css"]
    return CircuitParams(CssAngles(float(theta), float(phi)), layers), int(data["n"])


def save_params(path, params: CircuitParams, n_qubits: int, target: TargetSpec | None = None) -> Path:
    """Write a parameter file; the optional target lets evaluators run without ``--target``."""
    data = params_to_dict(params, n_qubits)
    if target is not None:
        data["target"] = target.to_dict()
    path = Path(path)
    path.write_text(json.dumps(data, indent=1) + "\n")
    return path


def load_params(path) -> tuple[CircuitParams, int, TargetSpec | None]:
    """Read a parameter file, or the first record of an optimization JSON-lines file."""
    path = Path(path)
    if path.suffix == ".jsonl":
        rec = read_jsonl(path)[0]
        data = {**rec["params"], "target": rec["target"]}
    else:
        data = json.loads(path.read_text())
    params, n = params_from_dict(data)
    target = TargetSpec.from_dict(data["target"]) if "target" in data else None
    return params, n, target


# ---------------------------------------------------------------------------
# optimization records
# ---------------------------------------------------------------------------

def record_to_dict(rec: OptimizationRecord, with_timing: bool = False) -> dict:
    out = {
        "target": rec.target.to_dict(),
        "p_layers": rec.p_layers,
        "seed": rec.seed,
        "params": params_to_dict(rec.best_params, rec.target.n_qubits),
        "best_infidelity": rec.best_infidelity,
        "n_starts": rec.n_starts,
        "n_objective_evals": rec.n_objective_evals,
        "converged": rec.converged,
        "best_start": rec.best_start,
        "start_point": rec.start_point,
        "grad_norm": rec.grad_norm,
        "total_twisting": rec.total_twisting,
        "start_costs": rec.start_costs,
        "budget": rec.budget,
    }
    if with_timing:
        out["wall_time"] = rec.wall_time
    return out


def record_from_dict(data: dict) -> OptimizationRecord:
    params, _ = params_from_dict(data["params"])
    grad = data.get("grad_norm")
    return OptimizationRecord(
        target=TargetSpec.from_dict(data["target"]),
        p_layers=int(data["p_layers"]),
        seed=int(data["seed"]),
        best_params=params,
        best_infidelity=float(data["best_infidelity"]),
        n_starts=int(data["n_starts"]),
        n_objective_evals=int(data["n_objective_evals"]),
        converged=bool(data["converged"]),
        wall_time=float(data.get("wall_time", float("nan"))),
        best_start=int(data["best_start"]),
        start_point=list(data["start_point"]),
        grad_norm=float("nan") if grad is None else float(grad),
        start_costs=list(data["start_costs"]),
        budget=dict(data["budget"]),
    )


def write_jsonl(path, records) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")
    return path


def read_jsonl(path) -> list[dict]:
    with Path(path).open() as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# comma-separated files
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_grid(path, grid: QGrid) -> Path:
    rows = ((t, p, grid.values[i, j]) for i, t in enumerate(grid.theta) for j, p in enumerate(grid.phi))
    return write_csv(path, ["theta", "phi", "q"], rows)


def read_grid(path, n_qubits: int, label: str = "") -> QGrid:
    header, rows = read_csv(path)
    if header != ["theta", "phi", "q"]:
        raise ValueError(f"{path}: unexpected grid header {header}")
    data = np.array(rows, dtype=float)
    theta = np.unique(data[:, 0])
    phi = np.unique(data[:, 1])
    values = data[:, 2].reshape(theta.size, phi.size)
    return QGrid(n_qubits, theta, phi, values, label)


def write_histogram(path, hist: ExcitationHistogram) -> Path:
    return write_csv(path, ["k", "count"], ((k, int(c)) for k, c in enumerate(hist.counts)))


def read_histogram(path) -> ExcitationHistogram:
    header, rows = read_csv(path)
    if header != ["k", "count"]:
        raise ValueError(f"{path}: unexpected histogram header {header}")
    counts = np.array([int(c) for _, c in rows], dtype=np.int64)
    return ExcitationHistogram(counts.size - 1, counts)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def versions() -> dict:
    import numba
    import scipy

    from . import __version__

    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "dickeprep": __version__}


def write_manifest(directory, command: str, config: dict, seed: int, wall_time: float,
                   outputs=(), extra: dict | None = None) -> Path:
    path = Path(directory) / f"{command}.manifest.json"
    body = {
        "command": command,
        "config": _clean(config),
        "seed": seed,
        "outputs": [str(Path(o).name) for o in outputs],
        "versions": versions(),
        "wall_time": wall_time,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        body.update(_clean(extra))
    path.write_text(json.dumps(body, indent=1, sort_keys=True) + "\n")
    return path
