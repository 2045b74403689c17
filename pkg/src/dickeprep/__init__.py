"""Preparation of symmetric N-qubit states with global twisting circuits."""

__version__ = "0.1.0"

from .circuit import (
    CircuitParams,
    canonicalize,
    circuit_stages,
    infidelity,
    infidelity_and_gradient,
    run_circuit,
    total_twisting,
)
from .optimize import MultiStartBudget, OptimizationRecord, optimize
from .spin import (
    CssAngles,
    DomainError,
    ResourceLimitError,
    SymmetricState,
    coherent_spin_state,
    dicke_basis_state,
    fidelity,
    full_space_oracle,
)
from .targets import TargetSpec, materialize

__all__ = [
    "CircuitParams", "CssAngles", "DomainError", "MultiStartBudget", "OptimizationRecord",
    "ResourceLimitError", "SymmetricState", "TargetSpec", "canonicalize", "circuit_stages",
    "coherent_spin_state", "dicke_basis_state", "fidelity", "full_space_oracle", "infidelity",
    "infidelity_and_gradient", "materialize", "optimize", "run_circuit", "total_twisting",
]
