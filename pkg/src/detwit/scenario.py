"""Prepare-and-measure data model: behaviors, strategies, noise, JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .linalg import PSD_TOL, GellMannBasis, hermitian, is_psd

STOCHASTIC_TOL = 1e-12
CLAMP_LIMIT = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Behavior:
    """Table p0[x, y] = p(b=0 | x, y) of a binary-outcome experiment."""

    p0: np.ndarray

    def __post_init__(self) -> None:
        p0 = np.array(self.p0, dtype=float)
        if p0.ndim != 2 or min(p0.shape) < 1:
            raise ValueError(f"p0 must be a non-empty 2-D table, got shape {p0.shape}")
        if not np.all(np.isfinite(p0)) or p0.min() < 0 or p0.max() > 1:
            raise ValueError("p0 entries must lie in [0, 1]")
        object.__setattr__(self, "p0", _frozen(p0))

    @property
    def num_preparations(self) -> int:
        return self.p0.shape[0]

    @property
    def num_measurements(self) -> int:
        return self.p0.shape[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "preparations": self.num_preparations,
            "measurements": self.num_measurements,
            "p0": self.p0.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Behavior:
        b = cls(np.asarray(data["p0"], dtype=float))
        if (b.num_preparations, b.num_measurements) != (
            int(data["preparations"]),
            int(data["measurements"]),
        ):
            raise ValueError("declared shape does not match p0")
        return b


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    """States rho_x and binary effects M_{0|y} acting on C^dim."""

    states: np.ndarray
    effects: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        states = np.array([hermitian(r) for r in self.states])
        effects = np.array([hermitian(m) for m in self.effects])
        if states.ndim != 3 or effects.ndim != 3:
            raise ValueError("need at least one state and one effect")
        d = states.shape[1]
        if effects.shape[1] != d:
            raise ValueError("states and effects act on different dimensions")
        eye = np.eye(d)
        for x, rho in enumerate(states):
            if abs(np.trace(rho).real - 1) > PSD_TOL or not is_psd(rho):
                raise ValueError(f"state {x} is not a density matrix")
        for y, m in enumerate(effects):
            if not (is_psd(m) and is_psd(eye - m)):
                raise ValueError(f"effect {y} violates 0 <= M <= I")
        object.__setattr__(self, "states", _frozen(states))
        object.__setattr__(self, "effects", _frozen(effects))
        object.__setattr__(self, "dim", d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "states": [_matrix_to_json(r) for r in self.states],
            "effects": [_matrix_to_json(m) for m in self.effects],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> QuantumStrategy:
        strat = cls(
            np.array([_matrix_from_json(m) for m in data["states"]]),
            np.array([_matrix_from_json(m) for m in data["effects"]]),
        )
        if strat.dim != int(data["dim"]):
            raise ValueError("declared dim does not match matrices")
        return strat


@dataclass(frozen=True, eq=False)
class ClassicalStrategy:
    """Message distributions s[m, x] = s(m|x) and responses t0[m, y] = t(b=0|m, y)."""

    s: np.ndarray
    t0: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=float)
        t0 = np.array(self.t0, dtype=float)
        if s.ndim != 2 or t0.ndim != 2 or s.shape[0] != t0.shape[0]:
            raise ValueError("s and t0 must be 2-D with the same number of messages")
        if s.min() < 0 or s.max() > 1:
            raise ValueError("s entries must lie in [0, 1]")
        if np.max(np.abs(s.sum(axis=0) - 1)) > STOCHASTIC_TOL:
            raise ValueError("columns of s must sum to 1")
        if t0.min() < 0 or t0.max() > 1:
            raise ValueError("t0 entries must lie in [0, 1]")
        object.__setattr__(self, "s", _frozen(s))
        object.__setattr__(self, "t0", _frozen(t0))
        object.__setattr__(self, "dim", s.shape[0])

    def to_dict(self) -> dict[str, Any]:
        return {"dim": self.dim, "s": self.s.tolist(), "t0": self.t0.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ClassicalStrategy:
        strat = cls(np.asarray(data["s"], dtype=float), np.asarray(data["t0"], dtype=float))
        if strat.dim != int(data["dim"]):
            raise ValueError("declared dim does not match s")
        return strat


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _matrix_from_json(rows: Sequence) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("matrix must be encoded as [[[re, im], ...], ...]")
    return a[..., 0] + 1j * a[..., 1]


def _clamp(p: np.ndarray) -> np.ndarray:
    if p.min() < -CLAMP_LIMIT or p.max() > 1 + CLAMP_LIMIT:
        raise ValueError("probabilities drift outside [0, 1] beyond clamping range")
    return np.clip(p, 0.0, 1.0)


def behavior_from_quantum(strategy: QuantumStrategy) -> Behavior:
    # Tr(rho M) = sum_ab rho_ab M_ba
    p0 = np.real(np.einsum("xab,yba->xy", strategy.states, strategy.effects))
    return Behavior(_clamp(p0))


def behavior_from_classical(strategy: ClassicalStrategy) -> Behavior:
    return Behavior(_clamp(strategy.s.T @ strategy.t0))


def bloch_to_state(v: Sequence[float] | np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """rho = (I + phi_d v.lambda) / d.

    Only |v| <= 2/d is guaranteed to give a positive matrix; check larger
    vectors with :func:`is_psd`.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (len(basis),):
        raise ValueError(f"Bloch vector must have length {len(basis)}")
    if np.linalg.norm(v) > 1 + 1e-12:
        raise ValueError("Bloch vector norm exceeds 1")
    d = basis.dim
    return (np.eye(d) + basis.phi * basis.combine(v)) / d


def state_to_bloch(rho: np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """Inverse of :func:`bloch_to_state`."""
    return basis.dim * basis.coefficients(rho) / basis.phi


def vector_to_effect(c: float, v: Sequence[float] | np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """M = c I + (phi_d / d) v.lambda. Validity of 0 <= M <= I is not checked."""
    v = np.asarray(v, dtype=float)
    if v.shape != (len(basis),):
        raise ValueError(f"effect vector must have length {len(basis)}")
    if abs(c) > 1 or np.linalg.norm(v) > 1 + 1e-12:
        raise ValueError("need |c| <= 1 and |v| <= 1")
    d = basis.dim
    return c * np.eye(d) + basis.phi / d * basis.combine(v)


def apply_noise(behavior: Behavior, eta: float, p_noise: Sequence[float] | np.ndarray) -> Behavior:
    """Mix a behavior with preparation-independent noise: eta p + (1 - eta) p_N(y)."""
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    pn = np.asarray(p_noise, dtype=float)
    if pn.shape != (behavior.num_measurements,):
        raise ValueError("need one noise probability per measurement")
    if pn.min() < 0 or pn.max() > 1:
        raise ValueError("noise probabilities must lie in [0, 1]")
    return Behavior(np.clip(eta * behavior.p0 + (1 - eta) * pn[None, :], 0.0, 1.0))


def strategy_from_dict(data: dict[str, Any]) -> QuantumStrategy | ClassicalStrategy:
    if "states" in data:
        return QuantumStrategy.from_dict(data)
    if "s" in data:
        return ClassicalStrategy.from_dict(data)
    raise ValueError("not a strategy document")


def load_behavior(path: str | Path) -> Behavior:
    with open(path, encoding="utf-8") as fh:
        return Behavior.from_dict(json.load(fh))


def dump_json(obj: Any) -> str:
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(data, indent=2)
