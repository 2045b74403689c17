"""Named target states: Dicke, W, GHZ, Ruskai and Gross codewords, Haar-random."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .spin import DomainError, SymmetricState, dicke_basis_state, spin_flip

KINDS = ("dicke", "w", "ghz", "ruskai-r0", "ruskai-r1", "gross-g0", "gross-g1", "haar")
_REQUIRED_N = {"ruskai-r0": 9, "ruskai-r1": 9, "gross-g0": 13, "gross-g1": 13}

# Gross code building blocks on M = 13/2, 5/2, -3/2, -11/2
_GROSS_SUPPORT = (Fraction(13, 2), Fraction(5, 2), Fraction(-3, 2), Fraction(-11, 2))
_GROSS_TILDE_0 = (sqrt(910) / 56, -3 * sqrt(154) / 56, -sqrt(770) / 56, sqrt(70) / 56)
_GROSS_TILDE_1 = (sqrt(231) / 84, sqrt(1365) / 84, -sqrt(273) / 28, -sqrt(3003) / 84)
_GROSS_MIX = (sqrt(105) / 14, sqrt(91) / 14)


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    n_qubits: int
    m: Fraction | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown target kind {self.kind!r}; expected one of {KINDS}")
        if self.n_qubits < 1:
            raise DomainError("n_qubits must be >= 1")
        required = _REQUIRED_N.get(self.kind)
        if required is not None and self.n_qubits != required:
            raise DomainError(f"target {self.kind} requires N={required}, got N={self.n_qubits}")
        if self.kind == "dicke":
            if self.m is None:
                raise DomainError("dicke target needs m")
            object.__setattr__(self, "m", Fraction(self.m))
            k = self.m + Fraction(self.n_qubits, 2)
            if k.denominator != 1 or not 0 <= k <= self.n_qubits:
                raise DomainError(f"M={self.m} is not valid for N={self.n_qubits}")
        if self.kind == "haar" and self.seed is None:
            raise DomainError("haar target needs a seed")

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "TargetSpec":
        """Parse ``dicke:M``, ``w``, ``ghz``, ``ruskai-r0|r1``, ``gross-g0|g1``, ``haar:SEED``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "dicke":
            try:
                return cls("dicke", n_qubits, m=Fraction(arg))
            except (ValueError, ZeroDivisionError):
                raise DomainError(f"cannot parse Dicke magnetic number {arg!r}") from None
        if kind == "haar":
            try:
                return cls("haar", n_qubits, seed=int(arg))
            except ValueError:
                raise DomainError(f"haar target needs an integer seed, got {arg!r}") from None
        if arg:
            raise DomainError(f"target {kind!r} takes no argument")
        return cls(kind, n_qubits)

    def label(self) -> str:
        if self.kind == "dicke":
            return f"dicke:{self.m}"
        if self.kind == "haar":
            return f"haar:{self.seed}"
        return self.kind

    @property
    def resizable(self) -> bool:
        return self.kind in ("dicke", "w", "ghz")

    def resized(self, n_qubits: int) -> "TargetSpec":
        """Member of the same family at a different qubit number.

        Dicke targets keep M (so M=0 needs even N); W and GHZ are defined for any N.
        """
        if not self.resizable:
            raise DomainError(f"target {self.kind} has no family over N")
        return TargetSpec(self.kind, n_qubits, m=self.m, seed=self.seed)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n_qubits}
        if self.m is not None:
            out["m"] = str(self.m)
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TargetSpec":
        m = data.get("m")
        return cls(data["kind"], int(data["n"]), m=None if m is None else Fraction(m), seed=data.get("seed"))


def haar_random_symmetric(n_qubits: int, seed: int) -> SymmetricState:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n_qubits + 1) + 1j * rng.standard_normal(n_qubits + 1)
    return SymmetricState(n_qubits, z / np.linalg.norm(z))


def _from_terms(n_qubits: int, terms) -> SymmetricState:
    amps = np.zeros(n_qubits + 1, dtype=complex)
    for m, c in terms:
        amps[int(m + Fraction(n_qubits, 2))] += c
    return SymmetricState(n_qubits, amps / np.linalg.norm(amps))


def gross_g0() -> SymmetricState:
    a, b = _GROSS_MIX
    coeffs = [a * c0 + b * c1 for c0, c1 in zip(_GROSS_TILDE_0, _GROSS_TILDE_1)]
    return _from_terms(13, zip(_GROSS_SUPPORT, coeffs))


def materialize(spec: TargetSpec) -> SymmetricState:
    n = spec.n_qubits
    j = Fraction(n, 2)
    if spec.kind == "dicke":
        return dicke_basis_state(n, spec.m)
    if spec.kind == "w":
        return dicke_basis_state(n, -j + 1)
    if spec.kind == "ghz":
        return _from_terms(n, [(-j, 1 / sqrt(2)), (j, 1 / sqrt(2))])
    if spec.kind == "ruskai-r0":
        return _from_terms(9, [(Fraction(-9, 2), 0.5), (Fraction(3, 2), sqrt(3 / 4))])
    if spec.kind == "ruskai-r1":
        return _from_terms(9, [(Fraction(9, 2), 0.5), (Fraction(-3, 2), sqrt(3 / 4))])
    if spec.kind == "gross-g0":
        return gross_g0()
    if spec.kind == "gross-g1":
        return spin_flip(gross_g0())
    return haar_random_symmetric(n, spec.seed)
