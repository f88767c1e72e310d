"""Named strategies and behaviors: BB84, classical identity, MUBs and friends."""

from __future__ import annotations

import numpy as np

from .linalg import gellmann_basis
from .scenario import (
    Behavior,
    ClassicalStrategy,
    QuantumStrategy,
    behavior_from_classical,
    bloch_to_state,
    vector_to_effect,
)

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def qubit_operator(c: float, t: np.ndarray) -> np.ndarray:
    """c I + t.sigma / 2."""
    return c * np.eye(2) + np.tensordot(np.asarray(t, dtype=float), PAULI, axes=1) / 2


def _xyz(x: float = 0.0, y: float = 0.0, z: float = 0.0) -> np.ndarray:
    return np.array([x, y, z])


def bb84_strategy(theta: float = 0.0) -> QuantumStrategy:
    z, x = _xyz(z=1), _xyz(x=1)
    states = [qubit_operator(0.5, s) for s in (z, -z, x, -x)]
    t0 = np.cos(theta) * z + np.sin(theta) * x
    t1 = np.sin(theta) * z - np.cos(theta) * x
    effects = [qubit_operator(0.5, t) for t in (t0, t1)]
    return QuantumStrategy(np.array(states), np.array(effects))


def classical_identity_strategy(k: int) -> ClassicalStrategy:
    """d = k+1 strategy: even x sends x/2, odd x sends the sink message k.

    The receiver outputs 0 iff the message equals the measurement label, so
    W_k is the identity.
    """
    if k < 1:
        raise ValueError("k must be positive")
    d = k + 1
    s = np.zeros((d, 2 * k))
    for x in range(2 * k):
        s[x // 2 if x % 2 == 0 else k, x] = 1
    t0 = np.zeros((d, k))
    t0[np.arange(k), np.arange(k)] = 1
    return ClassicalStrategy(s, t0)


def _deterministic(messages: list[int], t0: np.ndarray) -> ClassicalStrategy:
    s = np.zeros((t0.shape[0], len(messages)))
    s[messages, np.arange(len(messages))] = 1
    return ClassicalStrategy(s, t0)


def correlated_mixture_behavior() -> Behavior:
    """Equal mixture of two deterministic bit strategies (needs shared randomness).

    (i) x in {0, 3} sends m=0, outcome b = m + y mod 2;
    (ii) x in {0, 2} sends m=0, outcome b = m.
    """
    m = np.arange(2)[:, None]
    y = np.arange(2)[None, :]
    first = _deterministic([0, 1, 1, 0], ((m + y) % 2 == 0).astype(float))
    second = _deterministic([0, 1, 0, 1], np.broadcast_to(m == 0, (2, 2)).astype(float))
    p0 = (behavior_from_classical(first).p0 + behavior_from_classical(second).p0) / 2
    return Behavior(p0)


def _effect_offset_interval(traceless: np.ndarray) -> tuple[float, float]:
    ev = np.linalg.eigvalsh(traceless)
    return -ev[0], 1 - ev[-1]


def parallel_gellmann_strategy(d: int, k: int) -> QuantumStrategy:
    """States +-r e_j and effects along the same Gell-Mann axes e_j, j < k.

    r is the largest radius <= 2/d for which both +-r e_j are positive; for
    d >= 3 some axes need less than 2/d. Effect offsets sit at the midpoint of
    the interval keeping 0 <= M <= I, halving the effect vector if that
    interval is empty.
    """
    basis = gellmann_basis(d)
    if not 1 <= k <= len(basis):
        raise ValueError(f"need 1 <= k <= d^2-1 = {len(basis)}")
    states, effects = [], []
    for j in range(k):
        spread = np.max(np.abs(np.linalg.eigvalsh(basis.matrices[j])))
        axis = np.zeros(len(basis))
        axis[j] = min(2 / d, 1 / (basis.phi * spread))
        states += [bloch_to_state(axis, basis), bloch_to_state(-axis, basis)]
        t = axis.copy()
        for _ in range(21):
            lo, hi = _effect_offset_interval(vector_to_effect(0.0, t, basis))
            if lo <= hi:
                break
            t /= 2
        else:
            raise ValueError(f"no valid effect offset along axis {j}")
        effects.append(vector_to_effect((lo + hi) / 2, t, basis))
    return QuantumStrategy(np.array(states), np.array(effects))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


def mub_bases(d: int) -> list[np.ndarray]:
    """Complete set of d+1 mutually unbiased bases for prime d.

    Each basis is a (d, d) array whose columns are the basis vectors. The
    computational basis comes first, followed by the Fourier-type bases
    indexed by a = 0, ..., d-1.
    """
    if not is_prime(d):
        raise ValueError(f"MUB construction is implemented for prime d only, got {d}")
    n = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        cols = []
        for r in range(d):
            if d == 2:
                amp = 1j ** (a * n * n) * (-1.0) ** (r * n)
            else:
                amp = np.exp(2j * np.pi * ((a * n * n + r * n) % d) / d)
            cols.append(amp / np.sqrt(d))
        bases.append(np.array(cols).T)
    return bases


def mub_strategy(d: int, k: int) -> QuantumStrategy:
    """Preparations are adjacent state pairs inside each MUB; effects project on the first member.

    Pair j lives in basis j // (d-1) and uses vectors (r, r+1) with
    r = j % (d-1). Cross-basis entries of W_k vanish, and each within-basis
    block is unit lower triangular, so W_k = 1.
    """
    bases = mub_bases(d)
    if not 1 <= k <= d * d - 1:
        raise ValueError(f"need 1 <= k <= d^2-1 = {d * d - 1}")
    states, effects = [], []
    for j in range(k):
        basis = bases[j // (d - 1)]
        r = j % (d - 1)
        e, f = basis[:, r], basis[:, r + 1]
        states += [np.outer(e, e.conj()), np.outer(f, f.conj())]
        effects.append(np.outer(e, e.conj()))
    return QuantumStrategy(np.array(states), np.array(effects))


def classical_hadamard_strategy() -> ClassicalStrategy:
    """d=4 deterministic strategy whose W_2 is the 2x2 Hadamard matrix."""
    t0 = np.array([[1, 1], [0, 0], [1, 0], [0, 1]], dtype=float)
    return ClassicalStrategy(np.eye(4), t0)
