"""Trapped-ion error models for optimized circuits.

Three models: shot-to-shot laser intensity noise on the twisting angles, a
non-uniform Raman beam across the ion chain (full 2^N simulation), and the
closed-form dephasing estimate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from scipy.stats import truncnorm

from .circuit import CircuitParams, evaluator
from .spin import (
    FULL_SPACE_MAX_QUBITS,
    ResourceLimitError,
    SymmetricState,
    apply_single_qubit_all,
    pauli,
    symmetric_embedding,
)

TRUNCATION = 5.0


class EquilibriumError(RuntimeError):
    pass


@dataclass(frozen=True)
class NoiseEstimate:
    mean: float
    std_error: float
    n_realizations: int


@dataclass(frozen=True)
class IonChain:
    """Dimensionless equilibrium positions ``u_i = x_i / l`` of a linear chain."""

    n_ions: int
    positions: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(potential_gradient(self.positions))))


@dataclass(frozen=True)
class BeamProfile:
    sigma: float
    center: float = 0.0
    omega_bar: float = 2 * np.pi * 20e3

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("beam width sigma must be positive")

    def weights(self, chain: IonChain) -> np.ndarray:
        """Relative Rabi frequencies ``Omega_i / Omega_bar`` at the ion sites."""
        return np.exp(-((chain.positions - self.center) ** 2) / (2 * self.sigma ** 2))


# ---------------------------------------------------------------------------
# intensity fluctuations
# ---------------------------------------------------------------------------

def _multipliers(rng: np.random.Generator, delta_phi: float, size: int) -> np.ndarray:
    if delta_phi == 0:
        return np.ones(size)
    g = truncnorm.rvs(-TRUNCATION, TRUNCATION, loc=0.0, scale=delta_phi, size=size, random_state=rng)
    return 1.0 + np.atleast_1d(g)


def intensity_noise_stats(params: CircuitParams, target: SymmetricState, delta_phi: float,
                          n_realizations: int = 200, seed: int = 0) -> NoiseEstimate:
    """Mean infidelity when every twisting angle is scaled by ``1 + g``, ``g ~ N(0, delta_phi)``."""
    if delta_phi < 0:
        raise ValueError("delta_phi must be non-negative")
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    ev = evaluator(target.n_qubits)
    amps = np.ascontiguousarray(target.amplitudes)
    x = params.to_vector()
    costs = np.empty(n_realizations)
    for r in range(n_realizations):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        y = x.copy()
        y[2::3] *= _multipliers(rng, delta_phi, params.p_layers)
        costs[r] = ev.cost(y, amps)
    costs = np.clip(costs, 0.0, 1.0)
    se = float(np.std(costs, ddof=1) / np.sqrt(n_realizations)) if n_realizations > 1 else 0.0
    return NoiseEstimate(float(np.mean(costs)), se, n_realizations)


def intensity_noise_average(params: CircuitParams, target: SymmetricState, delta_phi: float,
                            n_realizations: int = 200, seed: int = 0) -> float:
    return intensity_noise_stats(params, target, delta_phi, n_realizations, seed).mean


# ---------------------------------------------------------------------------
# ion chain
# ---------------------------------------------------------------------------

def potential(u: np.ndarray) -> float:
    diff = np.abs(u[:, None] - u[None, :])
    iu = np.triu_indices(u.size, 1)
    return float(0.5 * np.sum(u ** 2) + np.sum(1.0 / diff[iu]))


def potential_gradient(u: np.ndarray) -> np.ndarray:
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    return u - np.sum(np.sign(diff) / diff ** 2, axis=1)


def potential_hessian(u: np.ndarray) -> np.ndarray:
    diff = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(diff, np.inf)
    h = -2.0 / diff ** 3
    np.fill_diagonal(h, 1.0 + np.sum(2.0 / diff ** 3, axis=1))
    return h


def equilibrium_positions(n_ions: int, tol: float = 1e-10, max_newton: int = 50) -> IonChain:
    if n_ions < 2:
        raise ValueError("an ion chain needs at least 2 ions")
    half_width = 1.0 * n_ions ** 0.56
    u = np.linspace(-half_width, half_width, n_ions)
    u = minimize(potential, u, jac=potential_gradient, method="BFGS", options={"gtol": 1e-8}).x
    u = np.sort(u)
    for _ in range(max_newton):
        g = potential_gradient(u)
        if np.max(np.abs(g)) < tol * 1e-2:
            break
        u = u - np.linalg.solve(potential_hessian(u), g)
    u = 0.5 * (u - u[::-1])
    res = float(np.max(np.abs(potential_gradient(u))))
    if res >= tol or np.any(np.diff(u) <= 0):
        raise EquilibriumError(f"equilibrium search for N={n_ions} stalled: residual {res:.2e}")
    return IonChain(n_ions, u)


# ---------------------------------------------------------------------------
# non-global twisting
# ---------------------------------------------------------------------------

def nonglobal_oat_state(params: CircuitParams, chain: IonChain, beam: BeamProfile,
                        n_qubits: int | None = None) -> np.ndarray:
    """Final 2^N state with every OAT replaced by ``exp(i phi_k W^2)``, ``W = sum_i w_i sigma_i^z / 2``."""
    n = chain.n_ions if n_qubits is None else n_qubits
    if n != chain.n_ions:
        raise ValueError(f"chain has {chain.n_ions} ions but N={n}")
    if n > FULL_SPACE_MAX_QUBITS:
        raise ResourceLimitError(f"non-global simulation limited to N <= {FULL_SPACE_MAX_QUBITS}")
    w = beam.weights(chain)
    return _run_with_weights(params, w)


def _run_with_weights(params: CircuitParams, w: np.ndarray) -> np.ndarray:
    n = w.size
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    wsum = (2 * bits - 1) @ w / 2  # eigenvalues of W
    sy, sz = pauli("y"), pauli("z")

    def rot(theta, xi):
        return expm(-0.5j * theta * sz) @ expm(-0.5j * xi * sy)

    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    psi = apply_single_qubit_all(psi, rot(params.css.phi, params.css.theta), n)
    for phi, theta, xi in params.layers:
        psi = np.exp(1j * phi * wsum ** 2) * psi
        psi = apply_single_qubit_all(psi, rot(theta, xi), n)
    return psi


def nonglobal_infidelity(params: CircuitParams, chain: IonChain, beam: BeamProfile,
                         target: SymmetricState) -> float:
    psi = nonglobal_oat_state(params, chain, beam, target.n_qubits)
    return float(max(0.0, 1.0 - abs(np.vdot(symmetric_embedding(target), psi)) ** 2))


def sigma_sweep(params: CircuitParams, chain: IonChain, target: SymmetricState, sigmas) -> list[dict]:
    return [
        {"sigma": float(s), "infidelity": nonglobal_infidelity(params, chain, BeamProfile(float(s)), target)}
        for s in sigmas
    ]


# ---------------------------------------------------------------------------
# gate timing and dephasing
# ---------------------------------------------------------------------------

def gate_timing(eta_omega: float, delta: float) -> tuple[float, float]:
    """Loop-closing time ``2 pi / delta`` and enclosed twisting angle ``2 pi (eta Omega)^2 / delta^2``."""
    if delta <= 0:
        raise ValueError("detuning must be positive")
    return 2 * np.pi / delta, 2 * np.pi * eta_omega ** 2 / delta ** 2


def detuning_for_angle(phi: float, eta_omega: float) -> float:
    """Detuning that realizes twisting angle ``phi`` at fixed ``eta * Omega``."""
    return eta_omega * np.sqrt(2 * np.pi / abs(phi))


def dephasing_fidelity_estimate(n_qubits: int, p_layers: int, gamma: float, delta: float,
                                ideal_fidelity: float = 1.0) -> float:
    """``F_ideal * (1 + exp(-gamma N P t_f)) / 2``; rotations are taken as instantaneous."""
    if gamma < 0 or delta <= 0:
        raise ValueError("rates must be positive")
    t_f, _ = gate_timing(0.0, delta)
    return float(ideal_fidelity * 0.5 * (1.0 + np.exp(-gamma * n_qubits * p_layers * t_f)))

