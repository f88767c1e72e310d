import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from detwit.scenario import ClassicalStrategy, QuantumStrategy  # noqa: E402


def random_classical(rng: np.random.Generator, d: int, x: int, y: int) -> ClassicalStrategy:
    s = rng.dirichlet(np.ones(d), size=x).T
    return ClassicalStrategy(s, rng.uniform(size=(d, y)))


def random_density(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_qubit_effect(rng: np.random.Generator) -> np.ndarray:
    ev = rng.uniform(size=2)
    u, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return u @ np.diag(ev) @ u.conj().T


def random_quantum(rng: np.random.Generator, d: int, x: int, y: int) -> QuantumStrategy:
    states = np.array([random_density(rng, d) for _ in range(x)])
    effects = []
    for _ in range(y):
        u, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        effects.append(u @ np.diag(rng.uniform(size=d)) @ u.conj().T)
    return QuantumStrategy(states, np.array(effects))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
