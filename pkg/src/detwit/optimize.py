"""Nonconvex maximisation of determinant witnesses and guessing probability.

The determinant is linear in every effect (one row of W_k) and in every pair
of preparations feeding one column, so each block has a closed-form exact
maximiser. Alternating over the blocks gives a monotone see-saw.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np
from scipy.optimize import minimize

from .analysis import guessing_probability
from .linalg import cofactor_matrix, determinant
from .scenario import (
    Behavior,
    ClassicalStrategy,
    QuantumStrategy,
    behavior_from_classical,
    behavior_from_quantum,
)
from .witness import witness_value

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 10**8
PENALTY_WEIGHTS = (1e1, 1e2, 1e3, 1e4)
RESIDUAL_TOL = 1e-4
POLISH_BAND = 1e-6

T = TypeVar("T")


class InfeasibleError(ValueError):
    """Raised when an instance exceeds a hard computational guard."""


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    max_iterations: int = 500
    convergence_tol: float = 1e-12
    seed: int = 0
    threads: int = 1

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def restart_rngs(self) -> list[np.random.Generator]:
        """One independent stream per restart, derived from the master seed."""
        children = np.random.SeedSequence(self.seed).spawn(self.restarts)
        return [np.random.default_rng(c) for c in children]


@dataclass
class OptimizationResult:
    best_value: float
    best_strategy: QuantumStrategy | ClassicalStrategy
    iterations_used: int
    converged: bool
    restart_values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_strategy": self.best_strategy.to_dict(),
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "restart_values": list(self.restart_values),
        }


def _run_restarts(cfg: OptimizerConfig, job: Callable[[np.random.Generator], T]) -> list[T]:
    rngs = cfg.restart_rngs()
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(job, rngs))
    return [job(rng) for rng in rngs]


# ---------------------------------------------------------------------------
# quantum see-saw


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """c I + (phi_d/d) T.lambda with the radius of T small enough for 0 <= M <= I.

    The traceless part has spectral radius at most (d-1)/d |T|.
    """
    c = rng.uniform(0.25, 0.75)
    radius = min(1.0, d / (d - 1) * min(c, 1 - c))
    # random Hermitian traceless direction, normalised in the Gell-Mann metric
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (g + g.conj().T) / 2
    h -= np.trace(h).real / d * np.eye(d)
    t_norm = np.sqrt(np.real(np.trace(h @ h)) / 2)
    n = d * d - 1
    r = radius * rng.uniform() ** (1 / n)
    phi = np.sqrt(d * (d - 1) / 2)
    return c * np.eye(d) + phi / d * r * h / t_norm


def quantum_witness_matrix(states: np.ndarray, effects: np.ndarray) -> np.ndarray:
    diff = states[0::2] - states[1::2]
    return np.real(np.einsum("jab,iba->ij", diff, effects))


def _projector(vecs: np.ndarray) -> np.ndarray:
    return vecs @ vecs.conj().T


def seesaw_quantum(
    states: np.ndarray,
    effects: np.ndarray,
    max_iterations: int = 500,
    tol: float = 1e-12,
    history: list[float] | None = None,
) -> tuple[np.ndarray, np.ndarray, float, int, bool]:
    """Alternate exact effect and state updates that never decrease |det W_k|.

    Returns ``(states, effects, |det|, sweeps, converged)``. When ``history``
    is given, |det| after every single block update is appended to it.
    """
    states = np.array(states, dtype=complex)
    effects = np.array(effects, dtype=complex)
    k = effects.shape[0]
    if states.shape[0] != 2 * k:
        raise ValueError("need 2k states for k effects")
    value = abs(determinant(quantum_witness_matrix(states, effects)))
    converged = False
    sweep = 0
    for sweep in range(1, max_iterations + 1):
        before = value
        for i in range(k):
            w = quantum_witness_matrix(states, effects)
            cof = cofactor_matrix(w)
            a = np.tensordot(cof[i], states[0::2] - states[1::2], axes=1)
            ev, vec = np.linalg.eigh((a + a.conj().T) / 2)
            gain_pos = ev[ev > 0].sum()
            gain_neg = -ev[ev < 0].sum()
            if max(gain_pos, gain_neg) >= abs(determinant(w)):
                mask = ev > 0 if gain_pos >= gain_neg else ev < 0
                effects[i] = _projector(vec[:, mask])
            value = abs(determinant(quantum_witness_matrix(states, effects)))
            if history is not None:
                history.append(value)
        for j in range(k):
            w = quantum_witness_matrix(states, effects)
            cof = cofactor_matrix(w)
            b = np.tensordot(cof[:, j], effects, axes=1)
            ev, vec = np.linalg.eigh((b + b.conj().T) / 2)
            top, bottom = _projector(vec[:, -1:]), _projector(vec[:, :1])
            if determinant(w) >= 0:
                states[2 * j], states[2 * j + 1] = top, bottom
            else:
                states[2 * j], states[2 * j + 1] = bottom, top
            value = abs(determinant(quantum_witness_matrix(states, effects)))
            if history is not None:
                history.append(value)
        if abs(value - before) < tol:
            converged = True
            break
    return states, effects, value, sweep, converged


def maximize_witness_quantum(d: int, k: int, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    cfg = cfg or OptimizerConfig()

    def job(rng: np.random.Generator):
        states = np.array([random_pure_state(d, rng) for _ in range(2 * k)])
        effects = np.array([random_effect(d, rng) for _ in range(k)])
        return seesaw_quantum(states, effects, cfg.max_iterations, cfg.convergence_tol)

    runs = _run_restarts(cfg, job)
    values = [r[2] for r in runs]
    best = int(np.argmax(values))
    states, effects, _, sweeps, converged = runs[best]
    strategy = QuantumStrategy(states, effects)
    value = witness_value(behavior_from_quantum(strategy), k).value
    log.debug("quantum d=%d k=%d best=%.12g", d, k, value)
    return OptimizationResult(value, strategy, sweeps, converged, values)


# ---------------------------------------------------------------------------
# classical strategies


def _deterministic_strategy(messages: Sequence[int], t0: np.ndarray) -> ClassicalStrategy:
    s = np.zeros((t0.shape[0], len(messages)))
    s[list(messages), np.arange(len(messages))] = 1
    return ClassicalStrategy(s, t0)


def brute_force_size(d: int, k: int) -> int:
    return d ** (2 * k) * 2 ** (d * k)


def maximize_witness_classical_bruteforce(d: int, k: int) -> OptimizationResult:
    """Exact maximum of |det W_k| over deterministic d-message strategies.

    det W_k is multilinear in the message distribution of each preparation
    and in each response row, so the maximum over the product of simplices
    and cubes is attained at a deterministic vertex.
    """
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    if brute_force_size(d, k) > BRUTE_FORCE_LIMIT:
        raise InfeasibleError(
            f"brute force over d={d}, k={k} needs {brute_force_size(d, k)} evaluations"
        )
    # every response table t0 in {0,1}^(d x k)
    tables = np.array(list(itertools.product((0.0, 1.0), repeat=d * k))).reshape(-1, d, k)
    # a column of W_k is t0[m_even] - t0[m_odd]; enumerate ordered message pairs
    pairs = np.array(list(itertools.product(range(d), repeat=2)))
    cols = tables[:, pairs[:, 0], :] - tables[:, pairs[:, 1], :]  # (n_tables, d^2, k)
    choice = np.array(list(itertools.product(range(len(pairs)), repeat=k)))  # (d^(2k), k)
    best_val, best_t, best_c = -1.0, 0, 0
    chunk = max(1, 2_000_000 // (len(choice) * k * k))
    for start in range(0, len(tables), chunk):
        block = cols[start:start + chunk]
        # mats[n, c] has columns block[n, choice[c, j]]; W[i, j] = column j entry i
        mats = np.swapaxes(block[:, choice, :], -1, -2)
        dets = np.abs(np.linalg.det(mats)) if k > 1 else np.abs(mats[..., 0, 0])
        n, c = np.unravel_index(int(np.argmax(dets)), dets.shape)
        if dets[n, c] > best_val + 1e-9:
            best_val, best_t, best_c = float(dets[n, c]), start + n, c
    messages = pairs[choice[best_c]].reshape(-1)
    strategy = _deterministic_strategy(messages, tables[best_t])
    value = witness_value(behavior_from_classical(strategy), k).value
    # entries are in {-1, 0, 1}, so the determinant is an integer
    value = float(np.rint(value))
    return OptimizationResult(value, strategy, 1, True, [value])


def seesaw_classical(
    s: np.ndarray,
    t0: np.ndarray,
    max_iterations: int = 500,
    tol: float = 1e-12,
    history: list[float] | None = None,
) -> tuple[np.ndarray, np.ndarray, float, int, bool]:
    """Classical analogue of :func:`seesaw_quantum`; updates land on vertices."""
    s = np.array(s, dtype=float)
    t0 = np.array(t0, dtype=float)
    d, k = t0.shape

    def matrix() -> np.ndarray:
        return t0.T @ (s[:, 0::2] - s[:, 1::2])

    value = abs(determinant(matrix()))
    converged = False
    sweep = 0
    for sweep in range(1, max_iterations + 1):
        before = value
        for i in range(k):
            w = matrix()
            a = (s[:, 0::2] - s[:, 1::2]) @ cofactor_matrix(w)[i]
            gain_pos, gain_neg = a[a > 0].sum(), -a[a < 0].sum()
            if max(gain_pos, gain_neg) >= abs(determinant(w)):
                t0[:, i] = (a > 0) if gain_pos >= gain_neg else (a < 0)
            value = abs(determinant(matrix()))
            if history is not None:
                history.append(value)
        for j in range(k):
            w = matrix()
            b = t0 @ cofactor_matrix(w)[:, j]
            hi, lo = int(np.argmax(b)), int(np.argmin(b))
            if determinant(w) < 0:
                hi, lo = lo, hi
            s[:, 2 * j] = 0
            s[hi, 2 * j] = 1
            s[:, 2 * j + 1] = 0
            s[lo, 2 * j + 1] = 1
            value = abs(determinant(matrix()))
            if history is not None:
                history.append(value)
        if abs(value - before) < tol:
            converged = True
            break
    return s, t0, value, sweep, converged


def maximize_witness_classical_seesaw(d: int, k: int, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    cfg = cfg or OptimizerConfig()

    def job(rng: np.random.Generator):
        s = rng.dirichlet(np.ones(d), size=2 * k).T
        t0 = rng.uniform(size=(d, k))
        return seesaw_classical(s, t0, cfg.max_iterations, cfg.convergence_tol)

    runs = _run_restarts(cfg, job)
    values = [r[2] for r in runs]
    best = int(np.argmax(values))
    s, t0, _, sweeps, converged = runs[best]
    strategy = ClassicalStrategy(s, t0)
    value = witness_value(behavior_from_classical(strategy), k).value
    return OptimizationResult(value, strategy, sweeps, converged, values)


# ---------------------------------------------------------------------------
# guessing probability at fixed witness value (qubits, k = 2)

_N_PARAMS = 16
_LOWER = np.array([0.0, 0.0] * 4 + [0.0, 0.0, 0.0, 0.0] * 2)
_UPPER = np.array([np.pi, 2 * np.pi] * 4 + [1.0, 1.0, np.pi, 2 * np.pi] * 2)


def _unit(theta: float, phi: float) -> np.ndarray:
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def _unpack(params: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pure-state Bloch vectors (4, 3), effect offsets c (2,), effect vectors T (2, 3).

    Effect y has eigenvalues (l1, l2) in [0, 1] along direction n_y, so
    M = c I + T.sigma/2 with c = (l1 + l2)/2 and T = (l1 - l2) n_y.
    """
    bloch = np.array([_unit(params[2 * x], params[2 * x + 1]) for x in range(4)])
    c = np.empty(2)
    t = np.empty((2, 3))
    for y in range(2):
        l1, l2, th, ph = params[8 + 4 * y: 12 + 4 * y]
        c[y] = (l1 + l2) / 2
        t[y] = (l1 - l2) * _unit(th, ph)
    return bloch, c, t


def _qubit_table(params: np.ndarray) -> np.ndarray:
    bloch, c, t = _unpack(params)
    return c[None, :] + bloch @ t.T / 2


def _pbar(p0: np.ndarray) -> float:
    sub = p0[:2, :2]
    return float(np.maximum(sub, 1 - sub).mean())


def _w2(p0: np.ndarray) -> float:
    return float((p0[0, 0] - p0[1, 0]) * (p0[2, 1] - p0[3, 1]) - (p0[2, 0] - p0[3, 0]) * (p0[0, 1] - p0[1, 1]))


def _qubit_strategy(params: np.ndarray) -> QuantumStrategy:
    from .constructions import qubit_operator

    bloch, c, t = _unpack(params)
    states = np.array([qubit_operator(0.5, s) for s in bloch])
    effects = np.array([qubit_operator(c[y], t[y]) for y in range(2)])
    return QuantumStrategy(states, effects)


def _restore_by_noise(strategy: QuantumStrategy, q: float) -> QuantumStrategy | None:
    """Shrink |W_2| exactly to q by mixing each effect with a trivial effect.

    M_y -> eta M_y + (1 - eta) b_y I scales W_2 by eta^2; b_y in {0, 1} is
    picked to maximise the guessing probability.
    """
    w = abs(witness_value(behavior_from_quantum(strategy), 2).signed_det)
    if w < q:
        return None
    eta = np.sqrt(q / w)
    best, best_pbar = None, -1.0
    for bits in itertools.product((0.0, 1.0), repeat=2):
        effects = np.array([eta * m + (1 - eta) * b * np.eye(2) for m, b in zip(strategy.effects, bits)])
        cand = QuantumStrategy(strategy.states, effects)
        pb = guessing_probability(behavior_from_quantum(cand))
        if pb > best_pbar:
            best, best_pbar = cand, pb
    return best


def _guess_one_start(q: float, rng: np.random.Generator, max_iterations: int) -> tuple[float, float, QuantumStrategy]:
    x = rng.uniform(_LOWER, _UPPER)
    bounds = list(zip(_LOWER, _UPPER))
    for mu in PENALTY_WEIGHTS:
        def objective(p: np.ndarray, mu: float = mu) -> float:
            table = _qubit_table(p)
            return -_pbar(table) + mu * (abs(_w2(table)) - q) ** 2

        res = minimize(objective, x, method="Powell", bounds=bounds,
                       options={"maxiter": max_iterations, "xtol": 1e-8, "ftol": 1e-12})
        x = np.clip(res.x, _LOWER, _UPPER)

    # polish with the max() branches frozen at the current point; the band
    # keeps the constraint gradient nonzero at Q = 1, where |W_2| is maximal
    for _ in range(2):
        table = _qubit_table(x)
        sign = 1.0 if _w2(table) >= 0 else -1.0
        upper = (table[:2, :2] >= 0.5).astype(float)

        def branch_objective(p: np.ndarray, upper: np.ndarray = upper) -> float:
            sub = _qubit_table(p)[:2, :2]
            return -float(np.where(upper > 0, sub, 1 - sub).mean())

        def signed_w(p: np.ndarray, sign: float = sign) -> float:
            return sign * _w2(_qubit_table(p))

        res = minimize(
            branch_objective, x, method="SLSQP", bounds=bounds,
            constraints=[
                {"type": "ineq", "fun": lambda p: signed_w(p) - (q - POLISH_BAND)},
                {"type": "ineq", "fun": lambda p: (q + POLISH_BAND) - signed_w(p)},
            ],
            options={"maxiter": 300, "ftol": 1e-13},
        )
        if not res.success:
            break
        x = np.clip(res.x, _LOWER, _UPPER)
    best: tuple[float, float, QuantumStrategy] | None = None
    strategy = _qubit_strategy(x)
    options = [strategy]
    restored = _restore_by_noise(strategy, q)
    if restored is not None:
        options.append(restored)
    for st in options:
        behavior = behavior_from_quantum(st)
        residual = abs(witness_value(behavior, 2).value - q)
        pb = guessing_probability(behavior)
        if best is None or _rank(pb, residual) > _rank(*best[:2]):
            best = (pb, residual, st)
    assert best is not None
    return best


def _rank(pbar: float, residual: float) -> tuple[bool, float]:
    """Feasible candidates first, by guessing probability; others by residual."""
    ok = residual <= RESIDUAL_TOL
    return ok, pbar if ok else -residual


class ConstraintError(RuntimeError):
    """No restart met the witness constraint to the required residual."""


def maximize_guessing_probability(q: float, d: int = 2, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Largest average guessing probability of a qubit strategy with |W_2| = q.

    Exterior penalty with escalating weights, Powell direct search over a
    bounded parametrisation (pure states, two-eigenvalue effects), then an
    SLSQP polish on the equality constraint.
    """
    if d != 2:
        raise ValueError("guessing-probability optimisation is implemented for qubits only")
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    cfg = cfg or OptimizerConfig(restarts=16, max_iterations=4000)
    runs = _run_restarts(cfg, lambda rng: _guess_one_start(q, rng, cfg.max_iterations))
    feasible = [r for r in runs if r[1] <= RESIDUAL_TOL]
    values = [r[0] if r[1] <= RESIDUAL_TOL else float("nan") for r in runs]
    if not feasible:
        raise ConstraintError(
            f"no restart reached |W_2| = {q} within {RESIDUAL_TOL}; "
            f"best residual {min(r[1] for r in runs):.3g}"
        )
    pb, _, strategy = max(feasible, key=lambda r: r[0])
    return OptimizationResult(pb, strategy, cfg.max_iterations, True, values)


def behavior_of(strategy: QuantumStrategy | ClassicalStrategy) -> Behavior:
    if isinstance(strategy, QuantumStrategy):
        return behavior_from_quantum(strategy)
    return behavior_from_classical(strategy)
