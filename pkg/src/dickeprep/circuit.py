"""The layered twisting/rotation circuit and its infidelity objective."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .spin import (
    CssAngles,
    DomainError,
    SymmetricState,
    apply_oat,
    apply_rotation,
    coherent_spin_state,
    m_values,
    ry_eigensystem,
)


@dataclass(frozen=True)
class CircuitParams:
    """Initial CSS angles plus P layers of ``(phi_k, theta_k, xi_k)``.

    Layer k applies ``R_z(theta_k) R_y(xi_k) exp(i phi_k Jz^2)``.
    """

    css: CssAngles
    layers: tuple[tuple[float, float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(tuple(float(v) for v in layer) for layer in self.layers)
        for layer in layers:
            if len(layer) != 3:
                raise DomainError(f"each layer needs (phi, theta, xi), got {layer}")
            if not all(np.isfinite(layer)):
                raise DomainError("circuit parameters must be finite")
        object.__setattr__(self, "layers", layers)

    @property
    def p_layers(self) -> int:
        return len(self.layers)

    @property
    def n_free(self) -> int:
        return 3 * self.p_layers + 2

    def to_vector(self) -> np.ndarray:
        flat = [self.css.theta, self.css.phi]
        for layer in self.layers:
            flat.extend(layer)
        return np.array(flat, dtype=float)

    @classmethod
    def from_vector(cls, x) -> "CircuitParams":
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 2 or (x.size - 2) % 3:
            raise DomainError(f"parameter vector length must be 3P+2, got {x.size}")
        layers = tuple(tuple(x[2 + 3 * k: 5 + 3 * k]) for k in range((x.size - 2) // 3))
        return cls(CssAngles(float(x[0]), float(x[1])), layers)

    @property
    def twisting_angles(self) -> np.ndarray:
        return np.array([layer[0] for layer in self.layers])

    def padded(self) -> "CircuitParams":
        """Same circuit with an identity layer appended."""
        return CircuitParams(self.css, self.layers + ((0.0, 0.0, 0.0),))


class CircuitEvaluator:
    """Precomputed factors for repeated evaluation at fixed N."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        lam, vecs, d = ry_eigensystem(n_qubits)
        self.lam = np.ascontiguousarray(lam)
        self.vecs = np.ascontiguousarray(vecs)
        self.d = np.ascontiguousarray(d)
        self.m = m_values(n_qubits).astype(float)

    def state(self, x) -> np.ndarray:
        return _kernel.forward(np.asarray(x, dtype=float), self.lam, self.vecs, self.d, self.m)

    def cost_grad(self, x, target: np.ndarray) -> tuple[float, np.ndarray]:
        return _kernel.cost_grad(np.asarray(x, dtype=float), self.lam, self.vecs, self.d, self.m, target)

    def cost(self, x, target: np.ndarray) -> float:
        return _kernel.cost_only(np.asarray(x, dtype=float), self.lam, self.vecs, self.d, self.m, target)


_EVALUATORS: dict[int, CircuitEvaluator] = {}


def evaluator(n_qubits: int) -> CircuitEvaluator:
    if n_qubits not in _EVALUATORS:
        _EVALUATORS[n_qubits] = CircuitEvaluator(n_qubits)
    return _EVALUATORS[n_qubits]


def run_circuit(params: CircuitParams, n_qubits: int) -> SymmetricState:
    state = coherent_spin_state(n_qubits, params.css)
    for phi, theta, xi in params.layers:
        state = apply_rotation(apply_oat(state, phi), theta, xi)
    return state


def circuit_stages(params: CircuitParams, n_qubits: int) -> list[tuple[str, SymmetricState]]:
    """Initial CSS followed by the state after every OAT and every rotation."""
    state = coherent_spin_state(n_qubits, params.css)
    stages = [("css", state)]
    for k, (phi, theta, xi) in enumerate(params.layers, start=1):
        state = apply_oat(state, phi)
        stages.append((f"oat{k}", state))
        state = apply_rotation(state, theta, xi)
        stages.append((f"rot{k}", state))
    return stages


def infidelity_and_gradient(params: CircuitParams, target: SymmetricState) -> tuple[float, np.ndarray]:
    """Objective ``1 - |<target|psi_f>|^2`` and its adjoint gradient (length 3P+2)."""
    ev = evaluator(target.n_qubits)
    cost, grad = ev.cost_grad(params.to_vector(), np.ascontiguousarray(target.amplitudes))
    return float(cost), grad


def infidelity(params: CircuitParams, target: SymmetricState) -> float:
    ev = evaluator(target.n_qubits)
    return float(ev.cost(params.to_vector(), np.ascontiguousarray(target.amplitudes)))


def total_twisting(params: CircuitParams) -> float:
    return float(np.sum(np.abs(params.twisting_angles)))


def canonicalize(params: CircuitParams, n_qubits: int) -> CircuitParams:
    """Equivalent circuit with every twisting angle folded into (-pi/2, pi/2].

    ``phi -> phi - pi`` multiplies the OAT by ``exp(-i pi Jz^2)``: a global phase
    for odd N, and ``R_z(pi)`` up to phase for even N, which is pushed through
    the following ``R_y(xi)`` as ``R_z(theta + pi) R_y(-xi)``.
    """
    layers = []
    for phi, theta, xi in params.layers:
        shifts = int(np.floor((phi + np.pi / 2) / np.pi))
        if phi - shifts * np.pi <= -np.pi / 2:
            shifts -= 1
        phi -= shifts * np.pi
        if n_qubits % 2 == 0 and shifts % 2:
            theta, xi = theta + np.pi, -xi
        layers.append((phi, theta, xi))
    return CircuitParams(params.css, tuple(layers))
