"""su(2) Husimi Q function on a (theta, phi) grid.

``Q(theta, phi) = |<theta, phi|psi>|^2`` with ``|theta, phi> = R_z(phi) R_y(theta) |J,-J>``,
so ``theta = 0`` is the all-down pole. The theta grid includes both poles and
the phi grid is periodic, excluding ``2 pi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParams, circuit_stages
from .spin import DomainError, SymmetricState, css_amplitudes, jx, jy, jz, m_values


@dataclass(frozen=True)
class QGrid:
    n_qubits: int
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # (n_theta, n_phi)
    label: str = ""

    @property
    def n_theta(self) -> int:
        return self.theta.size

    @property
    def n_phi(self) -> int:
        return self.phi.size


def theta_grid(n_theta: int) -> np.ndarray:
    return np.linspace(0.0, np.pi, n_theta)


def phi_grid(n_phi: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n_phi) / n_phi


def husimi_q(state: SymmetricState, n_theta: int = 200, n_phi: int = 200, label: str = "") -> QGrid:
    if n_theta < 2 or n_phi < 2:
        raise DomainError("grid sizes must be >= 2")
    n = state.n_qubits
    theta, phi = theta_grid(n_theta), phi_grid(n_phi)
    # CSS amplitudes factor as (real theta part) x exp(-i phi M)
    mags = np.array([css_amplitudes(n, t, 0.0).real for t in theta])
    phases = np.exp(1j * np.outer(m_values(n), phi))
    overlap = mags @ (state.amplitudes[:, None] * phases)
    q = np.clip(np.abs(overlap) ** 2, 0.0, 1.0)
    return QGrid(n, theta, phi, q, label)


def snapshot_sequence(params: CircuitParams, n_qubits: int, n_theta: int = 200, n_phi: int = 200) -> list[QGrid]:
    """Q grids of the initial CSS and of the state after every OAT and every rotation."""
    return [husimi_q(s, n_theta, n_phi, label) for label, s in circuit_stages(params, n_qubits)]


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def clenshaw_curtis_weights(n_nodes: int) -> np.ndarray:
    """Weights on ``u_j = cos(j pi / (n-1))`` for integrals over ``u`` in [-1, 1]."""
    n = n_nodes - 1
    if n < 1:
        raise DomainError("need at least 2 nodes")
    t = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    inner = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n ** 2 - 1)
        for k in range(1, n // 2):
            v -= 2 * np.cos(2 * k * t[inner]) / (4 * k ** 2 - 1)
        v -= np.cos(n * t[inner]) / (n ** 2 - 1)
    else:
        w[0] = w[n] = 1.0 / n ** 2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * t[inner]) / (4 * k ** 2 - 1)
    w[inner] = 2 * v / n
    return w


def normalization(grid: QGrid, rule: str = "clenshaw-curtis") -> float:
    """``(N+1)/(4 pi) * integral of Q over the sphere``; equals 1 for any state.

    ``rule="riemann"`` is the plain ``sum Q sin(theta) dtheta dphi``, whose
    O(dtheta^2) endpoint error is visible when Q is nonzero at a pole. The
    Clenshaw-Curtis rule in ``cos(theta)`` is exact once ``n_theta > N`` and
    ``n_phi > N``.
    """
    dphi = 2 * np.pi / grid.n_phi
    if rule == "riemann":
        dtheta = np.pi / (grid.n_theta - 1)
        integral = np.sum(grid.values * np.sin(grid.theta)[:, None]) * dtheta * dphi
    elif rule == "clenshaw-curtis":
        integral = clenshaw_curtis_weights(grid.n_theta) @ grid.values.sum(axis=1) * dphi
    else:
        raise DomainError(f"unknown quadrature rule {rule!r}")
    return float((grid.n_qubits + 1) / (4 * np.pi) * integral)


def ring_deviation(grid: QGrid) -> float:
    """Largest spread of Q along phi at fixed theta (zero for a Jz eigenstate)."""
    return float(np.max(grid.values.max(axis=1) - grid.values.min(axis=1)))


def ring_anisotropy(grid: QGrid) -> float:
    """Phi-variance of Q relative to its mean square, summed over theta rows."""
    var = np.var(grid.values, axis=1).sum()
    mean_sq = (grid.values.mean(axis=1) ** 2).sum()
    return float(var / mean_sq)


def min_quadrature_variance(state: SymmetricState, n_angles: int = 720) -> float:
    """Smallest variance of a spin component orthogonal to the mean spin."""
    n = state.n_qubits
    psi = state.amplitudes
    ops = [jx(n), jy(n), jz(n)]
    mean = np.array([np.vdot(psi, op @ psi).real for op in ops])
    axis = mean / np.linalg.norm(mean) if np.linalg.norm(mean) > 1e-12 else np.array([0.0, 0.0, 1.0])
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    best = np.inf
    for a in np.linspace(0.0, np.pi, n_angles, endpoint=False):
        u = np.cos(a) * e1 + np.sin(a) * e2
        op = sum(c * o for c, o in zip(u, ops))
        phi = op @ psi
        best = min(best, float(np.vdot(phi, phi).real - np.vdot(psi, phi).real ** 2))
    return best
