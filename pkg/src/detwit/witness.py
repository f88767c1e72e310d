"""Determinant witnesses W_k and the preparation relabeling scan."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .linalg import determinant
from .scenario import Behavior

NULL_TOL = 1e-9

# The three ways of splitting preparations {0,1,2,3} into two difference pairs.
PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


@dataclass(frozen=True, eq=False)
class WitnessReport:
    k: int
    matrix: np.ndarray
    signed_det: float
    relabeling_max: float | None = None

    @property
    def value(self) -> float:
        return abs(self.signed_det)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "matrix": np.asarray(self.matrix).tolist(),
            "det": self.signed_det,
            "value": self.value,
            "relabeling_max": self.relabeling_max,
        }


def _check_shape(behavior: Behavior, k: int) -> None:
    if k < 1:
        raise ValueError("k must be positive")
    shape = (behavior.num_preparations, behavior.num_measurements)
    if shape != (2 * k, k):
        raise ValueError(f"W_{k} needs {2 * k} preparations and {k} measurements, got {shape}")


def witness_matrix(behavior: Behavior, k: int) -> np.ndarray:
    """W[i, j] = p0(2j, i) - p0(2j+1, i)."""
    _check_shape(behavior, k)
    p = behavior.p0
    return (p[0::2, :] - p[1::2, :]).T.copy()


def witness_value(behavior: Behavior, k: int) -> WitnessReport:
    w = witness_matrix(behavior, k)
    return WitnessReport(k, w, determinant(w))


def _pairing_matrix(p: np.ndarray, pairing: tuple[tuple[int, int], ...]) -> np.ndarray:
    return np.column_stack([p[a] - p[b] for a, b in pairing])


def witness_relabeling_scan(behavior: Behavior) -> WitnessReport:
    """|det W_2| maximised over the three preparation pairings.

    Any permutation of the four preparations maps to one of these pairings up
    to within-pair and pair swaps, which only flip the determinant's sign.
    """
    _check_shape(behavior, 2)
    p = behavior.p0
    values = [abs(determinant(_pairing_matrix(p, pr))) for pr in PAIRINGS]
    base = witness_value(behavior, 2)
    return WitnessReport(2, base.matrix, base.signed_det, max(values))
