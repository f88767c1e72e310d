"""Determinant witnesses for the dimension of prepare-and-measure devices."""

from .analysis import (
    DecompositionResult,
    RandomnessPoint,
    find_bit_decomposition,
    guessing_probability,
    min_entropy,
    randomness_curve,
)
from .linalg import GellMannBasis, cross_product, determinant, gellmann_basis, is_psd
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    maximize_guessing_probability,
    maximize_witness_classical_bruteforce,
    maximize_witness_classical_seesaw,
    maximize_witness_quantum,
)
from .scenario import (
    Behavior,
    ClassicalStrategy,
    QuantumStrategy,
    apply_noise,
    behavior_from_classical,
    behavior_from_quantum,
    bloch_to_state,
    vector_to_effect,
)
from .witness import WitnessReport, witness_matrix, witness_relabeling_scan, witness_value

__version__ = "0.1.0"

__all__ = [
    "DecompositionResult",
    "RandomnessPoint",
    "find_bit_decomposition",
    "guessing_probability",
    "min_entropy",
    "randomness_curve",
    "GellMannBasis",
    "cross_product",
    "determinant",
    "gellmann_basis",
    "is_psd",
    "OptimizationResult",
    "OptimizerConfig",
    "maximize_guessing_probability",
    "maximize_witness_classical_bruteforce",
    "maximize_witness_classical_seesaw",
    "maximize_witness_quantum",
    "Behavior",
    "ClassicalStrategy",
    "QuantumStrategy",
    "apply_noise",
    "behavior_from_classical",
    "behavior_from_quantum",
    "bloch_to_state",
    "vector_to_effect",
    "WitnessReport",
    "witness_matrix",
    "witness_relabeling_scan",
    "witness_value",
]
