"""Certifiable randomness and classical-bit decompositions of behaviors."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .scenario import Behavior, ClassicalStrategy, behavior_from_classical

log = logging.getLogger(__name__)

RANK_TOL = 1e-7


@dataclass(frozen=True)
class RandomnessPoint:
    q: float
    p_bar: float
    h_min: float


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    found: bool
    strategy: ClassicalStrategy | None
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "found": self.found,
            "strategy": None if self.strategy is None else self.strategy.to_dict(),
            "residual": self.residual,
        }


def guessing_probability(behavior: Behavior) -> float:
    """Average over x, y in {0, 1} of the probability of the likelier outcome."""
    if behavior.num_preparations < 2 or behavior.num_measurements < 2:
        raise ValueError("need at least 2 preparations and 2 measurements")
    sub = behavior.p0[:2, :2]
    return float(np.maximum(sub, 1 - sub).mean())


def min_entropy(p_bar: float) -> float:
    if not 0.5 <= p_bar <= 1:
        raise ValueError("guessing probability must lie in [1/2, 1]")
    return 0.0 if p_bar == 1 else -math.log2(p_bar)


@dataclass(frozen=True)
class RandomnessCurve:
    points: list[RandomnessPoint]
    raw: list[RandomnessPoint]
    failed: list[float]

    @property
    def partial(self) -> bool:
        return bool(self.failed)


def monotonize(q_grid: Sequence[float], p_bars: Sequence[float]) -> list[float]:
    """Make p_bar nonincreasing in Q by taking the max over all larger Q.

    A strategy with |W_2| >= Q' >= Q can be mixed down to exactly Q, so the
    bound at Q may use every point to its right.
    """
    out = list(p_bars)
    for i in range(len(out) - 2, -1, -1):
        out[i] = max(out[i], out[i + 1])
    return out


def randomness_curve(q_grid: Sequence[float], cfg=None) -> RandomnessCurve:
    from .optimize import ConstraintError, OptimizerConfig, maximize_guessing_probability

    grid = [float(q) for q in q_grid]
    if any(not 0 < q <= 1 for q in grid):
        raise ValueError("grid values must lie in (0, 1]")
    if grid != sorted(grid):
        raise ValueError("grid must be sorted ascending")
    cfg = cfg or OptimizerConfig(restarts=16, max_iterations=4000)
    raw, ok_q, failed = [], [], []
    for q in grid:
        try:
            res = maximize_guessing_probability(q, 2, cfg)
        except ConstraintError as exc:
            log.warning("Q=%g: %s", q, exc)
            failed.append(q)
            continue
        raw.append(RandomnessPoint(q, res.best_value, min_entropy(res.best_value)))
        ok_q.append(q)
    mono = monotonize(ok_q, [p.p_bar for p in raw])
    points = [RandomnessPoint(q, pb, min_entropy(pb)) for q, pb in zip(ok_q, mono)]
    return RandomnessCurve(points, raw, failed)


def curve_csv(points: Sequence[RandomnessPoint]) -> str:
    lines = ["Q,p_bar,h_min_bits"]
    lines += [f"{p.q:.12g},{p.p_bar:.12g},{p.h_min:.12g}" for p in points]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# classical-bit decomposition


def _feasible_point(rows: np.ndarray, rhs: np.ndarray, slack: float) -> np.ndarray | None:
    """A point of {z in R^2 : rows @ z <= rhs + slack}, or None if empty.

    Exact 2-D vertex enumeration: a nonempty bounded polygon has a vertex at
    the intersection of two constraint lines. Returns the centroid of the
    feasible vertices.
    """
    verts = []
    for a, b in itertools.combinations(range(len(rows)), 2):
        m = rows[[a, b]]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < 1e-14:
            continue
        z = np.linalg.solve(m, rhs[[a, b]])
        if np.all(rows @ z <= rhs + slack * (1 + np.abs(rhs))):
            verts.append(z)
    if not verts:
        return None
    return np.mean(verts, axis=0)


def find_bit_decomposition(behavior: Behavior, tol: float = RANK_TOL) -> DecompositionResult:
    """Search for p(x,y) = s(0|x) T_y + t(0|1,y) with a one-bit message.

    The differences D[x, y] = p(x,y) - p(0,y) must have rank <= 1, D = a b^T.
    Writing s(0|x) = (a_x + v) / u turns every probability bound into a
    linear inequality in (u, v); each sign of u is decided by vertex
    enumeration.
    """
    p = behavior.p0
    nx, ny = p.shape
    diff = p - p[0:1, :]
    sv = np.linalg.svd(diff, compute_uv=False) if min(diff.shape) > 0 else np.zeros(1)
    if len(sv) > 1 and sv[1] > tol:
        return DecompositionResult(False, None, float(sv[1]))
    u_, sig, vt = np.linalg.svd(diff)
    a = u_[:, 0] * sig[0]
    b = vt[0]
    p_ref = p[0] - a[0] * b  # baseline so that p = p_ref + a b^T on the rank-1 part

    if sig[0] <= tol:
        # preparation independent: T = 0, t(0|m,y) = p(y)
        t_col = p.mean(axis=0)
        s = np.zeros((2, nx))
        s[0] = 1.0
        return _finish(behavior, s, np.vstack([t_col, t_col]), tol)

    # constraints on z = (u, v):
    #   s_x = (a_x + v)/u in [0,1]
    #   t(0|1,y) = p_ref_y - v b_y in [0,1]
    #   t(0|0,y) = p_ref_y + (u - v) b_y in [0,1]
    box = 1e6
    base_rows, base_rhs = [], []
    for y in range(ny):
        base_rows += [[0, b[y]], [0, -b[y]], [-b[y], b[y]], [b[y], -b[y]]]
        base_rhs += [p_ref[y], 1 - p_ref[y], p_ref[y], 1 - p_ref[y]]
    base_rows += [[1, 0], [-1, 0], [0, 1], [0, -1]]
    base_rhs += [box, box, box, box]
    for sign in (1.0, -1.0):
        rows, rhs = list(base_rows), list(base_rhs)
        for x in range(nx):
            if sign > 0:  # 0 <= a_x + v <= u
                rows += [[0, -1], [-1, 1]]
                rhs += [a[x], -a[x]]
            else:  # u <= a_x + v <= 0
                rows += [[0, 1], [1, -1]]
                rhs += [-a[x], a[x]]
        rows.append([-sign, 0])  # sign * u >= tol
        rhs.append(-tol)
        z = _feasible_point(np.array(rows, float), np.array(rhs, float), tol)
        if z is None:
            continue
        u, v = z
        s0 = np.clip((a + v) / u, 0, 1)
        t_one = np.clip(p_ref - v * b, 0, 1)
        t_zero = np.clip(p_ref + (u - v) * b, 0, 1)
        s = np.vstack([s0, 1 - s0])
        return _finish(behavior, s, np.vstack([t_zero, t_one]), tol)
    return DecompositionResult(False, None, float("inf"))


def _finish(behavior: Behavior, s: np.ndarray, t0: np.ndarray, tol: float) -> DecompositionResult:
    strategy = ClassicalStrategy(s, np.clip(t0, 0, 1))
    residual = float(np.max(np.abs(behavior_from_classical(strategy).p0 - behavior.p0)))
    if residual > tol:
        return DecompositionResult(False, None, residual)
    return DecompositionResult(True, strategy, residual)
