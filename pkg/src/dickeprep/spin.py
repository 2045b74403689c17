"""Linear algebra of the J = N/2 symmetric subspace.

Basis index ``k = 0..N`` corresponds to ``M = k - N/2`` (ascending), so index 0
is the all-down state ``|0...0> = |J, -J>``.

Rotation conventions: ``R_z(t) = exp(-i t Jz)``, ``R_y(t) = exp(-i t Jy)``,
one-axis twisting ``U(phi) = exp(+i phi Jz^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, xlogy

NORM_TOL = 1e-12
FULL_SPACE_MAX_QUBITS = 12


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(RuntimeError):
    """Raised when a request would exceed the supported problem size."""


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """Normalized amplitudes over the N+1 symmetric Dicke states."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size != self.n_qubits + 1:
            raise DomainError(
                f"expected {self.n_qubits + 1} amplitudes for N={self.n_qubits}, got shape {amps.shape}"
            )
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized: sum |a|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "SymmetricState":
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(amps.size - 1, amps)

    @property
    def j(self) -> float:
        return self.n_qubits / 2

    @property
    def m_values(self) -> np.ndarray:
        return m_values(self.n_qubits)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"SymmetricState(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True)
class CssAngles:
    """Polar angle ``theta`` measured from the -z pole and azimuth ``phi``."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise DomainError("CSS angles must be finite")


def m_values(n_qubits: int) -> np.ndarray:
    return np.arange(n_qubits + 1) - n_qubits / 2


def _check_n(n_qubits: int) -> None:
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise DomainError(f"n_qubits must be a positive integer, got {n_qubits!r}")


# ---------------------------------------------------------------------------
# collective operators
# ---------------------------------------------------------------------------

def _ladder_elements(n_qubits: int) -> np.ndarray:
    """<M+1|J+|M> for M = -J..J-1."""
    j = n_qubits / 2
    m = m_values(n_qubits)[:-1]
    return np.sqrt(j * (j + 1) - m * (m + 1))


def jz(n_qubits: int) -> np.ndarray:
    return np.diag(m_values(n_qubits)).astype(float)


def jplus(n_qubits: int) -> np.ndarray:
    return np.diag(_ladder_elements(n_qubits), -1)


def jminus(n_qubits: int) -> np.ndarray:
    return jplus(n_qubits).T.copy()


def jx(n_qubits: int) -> np.ndarray:
    jp = jplus(n_qubits)
    return (jp + jp.T) / 2


def jy(n_qubits: int) -> np.ndarray:
    jp = jplus(n_qubits)
    return (jp - jp.T) / 2j


def jz_power(n_qubits: int, power: int) -> np.ndarray:
    return np.diag(m_values(n_qubits) ** power)


def collective_operator(n_qubits: int, kind: str, power: int = 1) -> np.ndarray:
    """Matrix of a collective operator in the Dicke basis.

    ``kind`` is one of ``"Jz", "Jplus", "Jminus", "Jx", "Jy", "JzPower"``.
    """
    _check_n(n_qubits)
    builders = {"Jz": jz, "Jplus": jplus, "Jminus": jminus, "Jx": jx, "Jy": jy}
    if kind == "JzPower":
        return jz_power(n_qubits, power)
    try:
        return builders[kind](n_qubits)
    except KeyError:
        raise DomainError(f"unknown collective operator {kind!r}") from None


@lru_cache(maxsize=64)
def _jx_eigensystem(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    off = _ladder_elements(n_qubits) / 2
    evals, evecs = eigh_tridiagonal(np.zeros(n_qubits + 1), off)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def ry_eigensystem(n_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factors of ``Jy = D V diag(lam) V^T D^dagger``.

    ``V`` is the real orthogonal eigenbasis of Jx and ``D = R_z(pi/2)`` is a
    diagonal phase, returned as the vector ``d``.
    """
    lam, vecs = _jx_eigensystem(n_qubits)
    d = np.exp(-0.5j * np.pi * m_values(n_qubits))
    return lam, vecs, d


def ry_matrix(n_qubits: int, xi: float) -> np.ndarray:
    lam, vecs, d = ry_eigensystem(n_qubits)
    core = (vecs * np.exp(-1j * xi * lam)) @ vecs.T
    return d[:, None] * core * d.conj()[None, :]


def rz_diagonal(n_qubits: int, theta: float) -> np.ndarray:
    return np.exp(-1j * theta * m_values(n_qubits))


def oat_diagonal(n_qubits: int, phi: float) -> np.ndarray:
    return np.exp(1j * phi * m_values(n_qubits) ** 2)


# ---------------------------------------------------------------------------
# states and gates
# ---------------------------------------------------------------------------

def valid_m_values(n_qubits: int) -> list[Fraction]:
    return [Fraction(2 * k - n_qubits, 2) for k in range(n_qubits + 1)]


def dicke_basis_state(n_qubits: int, m) -> SymmetricState:
    """Dicke state ``|N/2, m>``; ``m`` may be given as a float or Fraction."""
    _check_n(n_qubits)
    k = m + Fraction(n_qubits, 2) if isinstance(m, Fraction) else m + n_qubits / 2
    if k != int(k) or not 0 <= k <= n_qubits:
        allowed = ", ".join(str(v) for v in valid_m_values(n_qubits))
        raise DomainError(f"M={m} is not a valid magnetic number for N={n_qubits}; valid: {{{allowed}}}")
    amps = np.zeros(n_qubits + 1, dtype=complex)
    amps[int(k)] = 1.0
    return SymmetricState(n_qubits, amps)


def css_amplitudes(n_qubits: int, theta: float, phi: float) -> np.ndarray:
    """Amplitudes of ``R_z(phi) R_y(theta) |J,-J>`` evaluated in log space."""
    k = np.arange(n_qubits + 1)
    c, s = np.cos(theta / 2), -np.sin(theta / 2)
    log_mag = 0.5 * (gammaln(n_qubits + 1) - gammaln(k + 1) - gammaln(n_qubits - k + 1))
    log_mag = log_mag + xlogy(n_qubits - k, abs(c)) + xlogy(k, abs(s))
    sign = np.where((c < 0) & ((n_qubits - k) % 2 == 1), -1.0, 1.0)
    sign = sign * np.where((s < 0) & (k % 2 == 1), -1.0, 1.0)
    return sign * np.exp(log_mag) * np.exp(-1j * phi * m_values(n_qubits))


def coherent_spin_state(n_qubits: int, angles: CssAngles) -> SymmetricState:
    _check_n(n_qubits)
    amps = css_amplitudes(n_qubits, angles.theta, angles.phi)
    # log-space evaluation leaves ~1e-15 relative drift; renormalize
    return SymmetricState(n_qubits, amps / np.linalg.norm(amps))


def apply_oat(state: SymmetricState, phi: float) -> SymmetricState:
    return SymmetricState(state.n_qubits, oat_diagonal(state.n_qubits, phi) * state.amplitudes)


def apply_rotation(state: SymmetricState, theta: float, xi: float) -> SymmetricState:
    """Apply ``R_z(theta) R_y(xi)``."""
    n = state.n_qubits
    lam, vecs, d = ry_eigensystem(n)
    psi = d.conj() * state.amplitudes
    psi = vecs @ (np.exp(-1j * xi * lam) * (vecs.T @ psi))
    psi = rz_diagonal(n, theta) * d * psi
    return SymmetricState(n, psi)


def fidelity(a: SymmetricState, b: SymmetricState) -> float:
    if a.n_qubits != b.n_qubits:
        raise DomainError(f"fidelity between states of different size: N={a.n_qubits} vs N={b.n_qubits}")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def spin_flip(state: SymmetricState) -> SymmetricState:
    """Global flip ``a_M -> (-1)^(J+M) a_{-M}``, which is exactly ``R_y(pi)``."""
    k = np.arange(state.n_qubits + 1)
    return SymmetricState(state.n_qubits, (-1.0) ** k * state.amplitudes[::-1])


# ---------------------------------------------------------------------------
# full 2^N oracle
# ---------------------------------------------------------------------------
# Qubit basis |0> = spin down (sigma_z = -1), |1> = spin up. Built from Pauli
# matrices and dense matrix exponentials, independent of the eigenbasis route above.

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)  # in (down, up) ordering
_SZ = np.array([[-1, 0], [0, 1]], dtype=complex)


def pauli(axis: str) -> np.ndarray:
    return {"x": _SX, "y": _SY, "z": _SZ}[axis].copy()


def excitation_counts(n_qubits: int) -> np.ndarray:
    """Number of up spins for every computational basis index (qubit 0 most significant)."""
    idx = np.arange(2 ** n_qubits)
    return np.array([bin(i).count("1") for i in idx])


def apply_single_qubit_all(psi: np.ndarray, gate: np.ndarray, n_qubits: int) -> np.ndarray:
    """Apply ``gate`` to every qubit of a 2^N statevector."""
    t = psi.reshape((2,) * n_qubits)
    for q in range(n_qubits):
        t = np.moveaxis(np.tensordot(gate, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def symmetric_projection(psi: np.ndarray, n_qubits: int) -> tuple[np.ndarray, float]:
    """Project a 2^N vector on the Dicke basis; returns (amplitudes, leakage norm)."""
    from math import comb

    counts = excitation_counts(n_qubits)
    norms = np.sqrt([comb(n_qubits, k) for k in range(n_qubits + 1)])
    amps = np.array([psi[counts == k].sum() for k in range(n_qubits + 1)]) / norms
    # residual taken directly; a difference of squared norms would cancel to ~1e-8
    leakage = float(np.linalg.norm(psi - (amps / norms)[counts]))
    return amps, leakage


def dicke_full_space(n_qubits: int, k: int) -> np.ndarray:
    """Dicke state with ``k`` excitations as an explicit 2^N vector."""
    counts = excitation_counts(n_qubits)
    v = (counts == k).astype(complex)
    return v / np.linalg.norm(v)


def symmetric_embedding(state: SymmetricState) -> np.ndarray:
    """2^N statevector of a symmetric state."""
    n = state.n_qubits
    if n > FULL_SPACE_MAX_QUBITS:
        raise ResourceLimitError(f"full-space embedding limited to N <= {FULL_SPACE_MAX_QUBITS}")
    from math import comb

    counts = excitation_counts(n)
    coeff = np.array([state.amplitudes[k] / np.sqrt(comb(n, k)) for k in range(n + 1)])
    return coeff[counts]


def full_space_oracle(params, n_qubits: int, leakage_tol: float = 1e-10) -> SymmetricState:
    """Run a circuit on the explicit 2^N Hilbert space and project back.

    ``params`` is a :class:`dickeprep.circuit.CircuitParams`.
    """
    from scipy.linalg import expm

    if n_qubits > FULL_SPACE_MAX_QUBITS:
        raise ResourceLimitError(f"full-space oracle limited to N <= {FULL_SPACE_MAX_QUBITS}, got {n_qubits}")
    _check_n(n_qubits)

    def ry1(t):
        return expm(-0.5j * t * _SY)

    def rz1(t):
        return expm(-0.5j * t * _SZ)

    jz_diag = (excitation_counts(n_qubits) - n_qubits / 2).astype(float)
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[0] = 1.0
    psi = apply_single_qubit_all(psi, rz1(params.css.phi) @ ry1(params.css.theta), n_qubits)
    for phi, theta, xi in params.layers:
        psi = np.exp(1j * phi * jz_diag ** 2) * psi
        psi = apply_single_qubit_all(psi, rz1(theta) @ ry1(xi), n_qubits)
    amps, leakage = symmetric_projection(psi, n_qubits)
    if leakage > leakage_tol:
        raise ResourceLimitError(f"symmetric-subspace leakage {leakage:.3e} exceeds {leakage_tol:.0e}")
    return SymmetricState(n_qubits, amps / np.linalg.norm(amps))
