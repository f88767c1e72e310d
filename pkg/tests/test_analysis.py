import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_classical, random_quantum
from detwit.analysis import (
    curve_csv,
    find_bit_decomposition,
    guessing_probability,
    min_entropy,
    monotonize,
    randomness_curve,
)
from detwit.constructions import bb84_strategy, correlated_mixture_behavior
from detwit.optimize import OptimizerConfig
from detwit.scenario import Behavior, ClassicalStrategy, behavior_from_classical, behavior_from_quantum
from detwit.witness import witness_relabeling_scan

PBAR_Q1_ORACLE = 0.8535533464105594
COS2_PI8 = math.cos(math.pi / 8) ** 2


def test_guessing_examples():
    assert guessing_probability(Behavior([[1, 0], [0, 1], [1, 1]])) == 1
    assert guessing_probability(Behavior(np.full((4, 2), 0.5))) == 0.5
    b = behavior_from_quantum(bb84_strategy(math.pi / 4))
    assert guessing_probability(b) == pytest.approx(COS2_PI8, abs=1e-12)


def test_guessing_rejects_small_behavior():
    with pytest.raises(ValueError):
        guessing_probability(Behavior([[0.5, 0.5]]))


def test_deterministic_strategies_fully_guessable(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        s = np.zeros((d, 4))
        s[rng.integers(0, d, size=4), range(4)] = 1
        t0 = rng.integers(0, 2, size=(d, 2)).astype(float)
        assert guessing_probability(behavior_from_classical(ClassicalStrategy(s, t0))) == 1


def test_min_entropy_examples():
    assert min_entropy(1.0) == 0
    assert min_entropy(0.5) == 1
    # -log2(cos^2(pi/8)) = 0.2284466966...
    assert min_entropy(COS2_PI8) == pytest.approx(0.2284466966, abs=1e-9)
    assert min_entropy(COS2_PI8) == pytest.approx(0.22855, abs=2e-4)
    with pytest.raises(ValueError):
        min_entropy(0.4)


def test_monotonize_takes_right_max():
    assert monotonize([0.1, 0.2, 0.3], [0.9, 0.95, 0.8]) == [0.95, 0.95, 0.8]


def test_curve_csv_format():
    from detwit.analysis import RandomnessPoint

    text = curve_csv([RandomnessPoint(0.5, 0.98296298786, 0.0247910000279976)])
    assert text.splitlines() == ["Q,p_bar,h_min_bits", "0.5,0.98296298786,0.024791000028"]


def test_curve_near_zero():
    curve = randomness_curve([1e-6], OptimizerConfig(restarts=4, max_iterations=4000))
    assert curve.points[0].h_min <= 0.01


@pytest.mark.slow
def test_curve_three_points():
    curve = randomness_curve([0.1, 0.5, 1.0], OptimizerConfig(restarts=16, max_iterations=4000))
    assert [p.q for p in curve.points] == [0.1, 0.5, 1.0]
    assert all(p.h_min > 0 for p in curve.points)
    assert all(a.h_min <= b.h_min for a, b in zip(curve.points, curve.points[1:]))
    for p in curve.points:
        assert p.h_min == pytest.approx(-math.log2(p.p_bar), abs=1e-12)
    assert curve.points[-1].h_min == pytest.approx(-math.log2(PBAR_Q1_ORACLE), abs=0.01)


def test_curve_rejects_bad_grid():
    with pytest.raises(ValueError):
        randomness_curve([0.0])
    with pytest.raises(ValueError):
        randomness_curve([0.5, 0.1])


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), x=st.integers(2, 8), y=st.integers(1, 5))
def test_decomposition_round_trip(seed, x, y):
    strat = random_classical(np.random.default_rng(seed), 2, x, y)
    b = behavior_from_classical(strat)
    res = find_bit_decomposition(b)
    assert res.found
    assert res.residual <= 1e-8
    rebuilt = behavior_from_classical(res.strategy)
    assert np.max(np.abs(rebuilt.p0 - b.p0)) <= res.residual + 1e-15


def test_decomposition_of_deterministic_bit():
    s = np.array([[1, 0, 1, 1], [0, 1, 0, 0]], dtype=float)
    t0 = np.array([[1, 0], [0, 0]], dtype=float)
    res = find_bit_decomposition(behavior_from_classical(ClassicalStrategy(s, t0)))
    assert res.found and res.residual <= 1e-12


def test_decomposition_negative_cases():
    assert not find_bit_decomposition(behavior_from_quantum(bb84_strategy(0.0))).found
    assert not find_bit_decomposition(correlated_mixture_behavior()).found


def test_decomposition_constant_behavior():
    b = Behavior(np.tile([0.2, 0.7, 0.4], (5, 1)))
    res = find_bit_decomposition(b)
    assert res.found and res.residual <= 1e-15
    np.testing.assert_allclose(res.strategy.t0, [[0.2, 0.7, 0.4]] * 2)


def test_decomposition_never_raises(rng):
    for shape in [(1, 1), (1, 3), (4, 1), (4, 2), (7, 3)]:
        res = find_bit_decomposition(Behavior(rng.uniform(size=shape)))
        assert isinstance(res.found, bool)


def test_decomposition_agrees_with_relabeling_scan(rng):
    for i in range(600):
        kind = i % 3
        if kind == 0:
            b = behavior_from_classical(random_classical(rng, 2, 4, 2))
        elif kind == 1:
            b = behavior_from_quantum(random_quantum(rng, 2, 4, 2))
        else:
            b = Behavior(rng.uniform(size=(4, 2)))
        null = witness_relabeling_scan(b).relabeling_max <= 1e-7
        assert find_bit_decomposition(b, 1e-7).found == null
