"""Permutation-invariant measurement theory and a simulated shot sampler.

Conventions: excitation number ``k`` counts qubits found in the up state
(``sigma_z = +1``), so ``M = k - N/2``. A PI monomial means the normalized
average over qubit orderings of ``sigma_x^k sigma_y^l sigma_z^m 1^n``; on a
symmetric state its expectation equals that of any single ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .spin import DomainError, SymmetricState, apply_rotation, m_values

MAX_CONDITION = 1e12


class ConditioningError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ExcitationHistogram:
    n_qubits: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.n_qubits + 1,):
            raise DomainError(f"need N+1={self.n_qubits + 1} counts, got shape {counts.shape}")
        if np.any(counts < 0):
            raise DomainError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_shots(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_shots


@dataclass(frozen=True)
class MeasurementSetting:
    """Global observable ``A = a_x sigma_x + a_y sigma_y + a_z sigma_z`` on every qubit."""

    direction: tuple[float, float, float]

    def __post_init__(self):
        a = tuple(float(v) for v in self.direction)
        if len(a) != 3 or abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise DomainError(f"setting direction must be a unit 3-vector, got {a}")
        object.__setattr__(self, "direction", a)

    @classmethod
    def from_vector(cls, v) -> "MeasurementSetting":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def angles(self) -> tuple[float, float]:
        ax, ay, az = self.direction
        return float(np.arccos(np.clip(az, -1.0, 1.0))), float(np.arctan2(ay, ax))


def random_settings(count: int, seed: int) -> list[MeasurementSetting]:
    rng = np.random.default_rng(seed)
    return [MeasurementSetting.from_vector(v) for v in rng.normal(size=(count, 3))]


def setting_count(n_qubits: int) -> int:
    if n_qubits < 1:
        raise DomainError("N must be >= 1")
    return (n_qubits ** 2 + 3 * n_qubits + 2) // 2


# ---------------------------------------------------------------------------
# sampling and the single-setting proxy
# ---------------------------------------------------------------------------

def sample_excitation_histogram(state: SymmetricState, n_shots: int, seed: int) -> ExcitationHistogram:
    """Coincidence counts of ``sigma_z^N``, drawn directly in excitation number."""
    if n_shots < 1:
        raise DomainError("n_shots must be >= 1")
    p = state.populations
    rng = np.random.default_rng(seed)
    return ExcitationHistogram(state.n_qubits, rng.multinomial(n_shots, p / p.sum()))


def _real_target_weights(target: SymmetricState) -> np.ndarray:
    b = target.amplitudes
    # a global phase is harmless, so align the largest amplitude first
    b = b * np.exp(-1j * np.angle(b[np.argmax(np.abs(b))]))
    if np.max(np.abs(b.imag)) > 1e-10:
        raise DomainError("fidelity proxy assumes a target with real Dicke coefficients")
    return np.abs(b) ** 2


def fidelity_proxy(exp_populations, target: SymmetricState) -> float:
    """``sum_M p_exp(M) |b_M|^2`` for a target with real coefficients ``b_M``."""
    p = np.asarray(exp_populations, dtype=float)
    if p.shape != (target.n_qubits + 1,):
        raise DomainError("population vector must have N+1 entries")
    if p.sum() > 1 + 1e-9 or np.any(p < -1e-12):
        raise DomainError("populations must be non-negative and sum to at most 1")
    return float(p @ _real_target_weights(target))


def proxy_standard_error(populations, target: SymmetricState, n_shots: int) -> float:
    """Multinomial standard error of the plug-in proxy at ``n_shots``."""
    p = np.asarray(populations, dtype=float)
    w = _real_target_weights(target)
    var = p @ w ** 2 - (p @ w) ** 2
    return float(np.sqrt(max(var, 0.0) / n_shots))


@dataclass(frozen=True)
class ProxyReport:
    n_shots: int
    proxy: float
    std_error: float
    exact_proxy: float | None = None

    def to_dict(self) -> dict:
        return {"n_shots": self.n_shots, "proxy": self.proxy, "std_error": self.std_error,
                "exact_proxy": self.exact_proxy}


def proxy_report(hist: ExcitationHistogram, target: SymmetricState,
                 exact_state: SymmetricState | None = None) -> ProxyReport:
    freq = hist.frequencies
    exact = None if exact_state is None else fidelity_proxy(exact_state.populations, target)
    return ProxyReport(hist.n_shots, fidelity_proxy(freq, target),
                       proxy_standard_error(freq, target, hist.n_shots), exact)


# ---------------------------------------------------------------------------
# Dicke projectors as polynomials in Jz
# ---------------------------------------------------------------------------

def _bjorck_pereyra(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Monomial coefficients of the polynomial interpolating ``(x_j, f_j)``.

    Newton divided differences followed by the nested conversion to the
    monomial basis; O(n^2) and, for ordered nodes, typically far more
    accurate than a dense solve of the Vandermonde system.
    """
    n = x.size
    c = np.array(f, dtype=float)
    for k in range(n - 1):
        c[k + 1:] = (c[k + 1:] - c[k:-1]) / (x[k + 1:] - x[:n - k - 1])
    for k in range(n - 2, -1, -1):
        for j in range(k, n - 1):
            c[j] -= x[k] * c[j + 1]
    return c


def vandermonde_condition(n_qubits: int) -> float:
    x = m_values(n_qubits).astype(float)
    return float(np.linalg.cond(np.vander(x, increasing=True)))


def dicke_projector_coefficients(n_qubits: int, m) -> np.ndarray:
    """``c_i`` with ``|J,m><J,m| = sum_{i=0}^{N} c_i Jz^i``."""
    x = m_values(n_qubits).astype(float)
    shifted = Fraction(m) + Fraction(n_qubits, 2)
    if shifted.denominator != 1 or not 0 <= shifted <= n_qubits:
        raise DomainError(f"m={m} is not a valid M for N={n_qubits}")
    k = int(shifted)
    cond = vandermonde_condition(n_qubits)
    if cond > MAX_CONDITION:
        raise ConditioningError(f"Jz Vandermonde system for N={n_qubits} has condition {cond:.2e} > {MAX_CONDITION:.0e}")
    return _bjorck_pereyra(x, np.eye(n_qubits + 1)[k])


def projector_residual(n_qubits: int, m, coeffs) -> float:
    """Max-norm distance between ``sum c_i Jz^i`` and the Dicke projector."""
    x = m_values(n_qubits).astype(float)
    diag = np.vander(x, increasing=True) @ np.asarray(coeffs, dtype=float)
    target = (x == float(m)).astype(float)
    return float(np.max(np.abs(diag - target)))


def jz_moment_from_histogram(hist: ExcitationHistogram, power: int) -> float:
    if not 0 <= power <= hist.n_qubits:
        raise DomainError(f"power must lie in [0, {hist.n_qubits}]")
    return float(hist.frequencies @ m_values(hist.n_qubits).astype(float) ** power)


def populations_from_moments(n_qubits: int, moments) -> np.ndarray:
    """Dicke populations ``Tr(rho rho_{J,m}) = sum_i c_{i,m} <Jz^i>``."""
    mom = np.asarray(moments, dtype=float)
    return np.array([dicke_projector_coefficients(n_qubits, m) @ mom for m in m_values(n_qubits)])


# ---------------------------------------------------------------------------
# collective powers as PI sums
# ---------------------------------------------------------------------------

def _series_coeff(i: int, rest: int, order: int) -> Fraction:
    """``[x^order] sinh(x)^i cosh(x)^rest`` as an exact fraction."""
    sinh = [Fraction(1, factorial(d)) if d % 2 else Fraction(0) for d in range(order + 1)]
    cosh = [Fraction(0) if d % 2 else Fraction(1, factorial(d)) for d in range(order + 1)]
    poly = [Fraction(1)] + [Fraction(0)] * order
    for factor, times in ((sinh, i), (cosh, rest)):
        for _ in range(times):
            poly = [sum(poly[a] * factor[d - a] for a in range(d + 1)) for d in range(order + 1)]
    return poly[order]


def collective_power_expansion(power: int, n_qubits: int, axis: str = "z") -> tuple[Fraction, ...]:
    """``d_i`` with ``J_a^n = sum_i d_i S_i``, ``S_i`` the sum of ``sigma_a`` products over i-subsets.

    The coefficient counts qubit-label sequences of length n whose odd
    multiplicities hit a fixed i-subset: ``n! [x^n] sinh^i cosh^(N-i) / 2^n``.
    The expansion does not depend on the axis.
    """
    if axis not in ("x", "y", "z"):
        raise DomainError(f"axis must be x, y or z, got {axis!r}")
    if power < 0 or n_qubits < 1:
        raise DomainError("need power >= 0 and N >= 1")
    if power > n_qubits:
        raise DomainError(f"power n={power} exceeds N={n_qubits}")
    scale = Fraction(factorial(power), 2 ** power)
    return tuple(scale * _series_coeff(i, n_qubits - i, power) for i in range(power + 1))


def elementary_symmetric_signs(n_qubits: int, weight: int) -> np.ndarray:
    """``e_w`` of N values +-1 with k of them equal to +1, for every k."""
    k = np.arange(n_qubits + 1)
    return np.array([sum(comb(int(kk), j) * comb(n_qubits - int(kk), weight - j) * (-1) ** (weight - j)
                         for j in range(weight + 1)) for kk in k], dtype=float)


def pi_sum_expectations(populations, n_qubits: int) -> np.ndarray:
    """``<S_i>`` for i = 0..N from excitation populations of one setting."""
    p = np.asarray(populations, dtype=float)
    return np.array([p @ elementary_symmetric_signs(n_qubits, w) for w in range(n_qubits + 1)])


# ---------------------------------------------------------------------------
# general settings
# ---------------------------------------------------------------------------

def setting_populations(state: SymmetricState, setting: MeasurementSetting) -> np.ndarray:
    """Distribution of the number of +1 outcomes when measuring ``A^N``."""
    theta, phi = setting.angles
    # R_z(phi) R_y(theta) takes z to the setting axis; undo it and read out z
    rotated = apply_rotation(apply_rotation(state, -phi, 0.0), 0.0, -theta)
    return rotated.populations


def setting_expectations(populations, n_qubits: int) -> np.ndarray:
    """``<(A^(w) 1^(N-w))_PI>`` for w = 0..N, from one setting's counts."""
    s = pi_sum_expectations(populations, n_qubits)
    return s / np.array([comb(n_qubits, w) for w in range(n_qubits + 1)])


def monomial_labels(weight: int) -> list[tuple[int, int, int]]:
    return [(k, l, weight - k - l) for k in range(weight, -1, -1) for l in range(weight - k, -1, -1)]


@dataclass(frozen=True)
class SettingDecomposition:
    """Per weight w: ``coeffs[w][(k,l,m)]`` is the row ``c_j^{(k,l,m)}`` over settings."""

    n_qubits: int
    settings: tuple[MeasurementSetting, ...]
    coeffs: tuple[dict, ...]
    residual: float

    def monomial_expectations(self, setting_exps: np.ndarray) -> dict:
        """Map ``setting_exps[j, w]`` to ``<(sx^k sy^l sz^m 1^n)_PI>`` keyed by (k, l, m)."""
        out = {}
        for w, table in enumerate(self.coeffs):
            for label, row in table.items():
                out[label] = float(row @ setting_exps[:, w])
        return out


def pi_setting_decomposition(n_qubits: int, settings) -> SettingDecomposition:
    """Coefficients expressing every PI monomial through the settings' PI expectations."""
    settings = tuple(settings)
    need = setting_count(n_qubits)
    if len(settings) < need:
        raise DomainError(f"N={n_qubits} needs at least {need} settings, got {len(settings)}")
    a = np.array([s.direction for s in settings])
    coeffs, worst = [], 0.0
    for w in range(n_qubits + 1):
        labels = monomial_labels(w)
        # multinomial weight of each Pauli string that collapses onto the monomial
        b = np.column_stack([factorial(w) / (factorial(k) * factorial(l) * factorial(m))
                             * a[:, 0] ** k * a[:, 1] ** l * a[:, 2] ** m for (k, l, m) in labels])
        rank = np.linalg.matrix_rank(b, tol=1e-10 * max(1.0, np.abs(b).max()))
        if rank < len(labels):
            raise DomainError(f"settings are degenerate at weight {w} (rank {rank} < {len(labels)}); "
                              "choose settings in general position")
        c = np.linalg.pinv(b)
        worst = max(worst, float(np.max(np.abs(c @ b - np.eye(len(labels))))))
        coeffs.append({lab: c[i] for i, lab in enumerate(labels)})
    if worst > 1e-8:
        raise DomainError(f"setting decomposition residual {worst:.1e} exceeds 1e-8")
    return SettingDecomposition(n_qubits, settings, tuple(coeffs), worst)


def histogram_rows(hist: ExcitationHistogram) -> list[tuple[int, int]]:
    return [(k, int(c)) for k, c in enumerate(hist.counts)]
