import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_classical, random_quantum
from detwit.constructions import bb84_strategy, classical_identity_strategy, correlated_mixture_behavior
from detwit.scenario import Behavior, apply_noise, behavior_from_classical, behavior_from_quantum
from detwit.witness import witness_matrix, witness_relabeling_scan, witness_value

HALF = Behavior(np.full((4, 2), 0.5))


def test_bb84_matrix_and_value():
    b = behavior_from_quantum(bb84_strategy(0.0))
    np.testing.assert_allclose(witness_matrix(b, 2), [[1, 0], [0, -1]], atol=1e-15)
    report = witness_value(b, 2)
    assert report.value == pytest.approx(1, abs=1e-12)
    assert report.signed_det == pytest.approx(-1, abs=1e-12)
    assert report.relabeling_max is None


def test_uniform_behavior_zero():
    np.testing.assert_array_equal(witness_matrix(HALF, 2), np.zeros((2, 2)))
    assert witness_relabeling_scan(HALF).relabeling_max == 0


def test_classical_identity_matrix_k3():
    b = behavior_from_classical(classical_identity_strategy(3))
    np.testing.assert_array_equal(witness_matrix(b, 3), np.eye(3))


def test_correlated_mixture():
    b = correlated_mixture_behavior()
    np.testing.assert_array_equal(witness_matrix(b, 2), np.eye(2))
    assert witness_value(b, 2).value == 1


def test_shape_errors():
    with pytest.raises(ValueError):
        witness_matrix(Behavior(np.zeros((3, 2))), 2)
    with pytest.raises(ValueError):
        witness_relabeling_scan(Behavior(np.zeros((6, 3))))


def test_random_bit_strategies_null(rng):
    for _ in range(200):
        b = behavior_from_classical(random_classical(rng, 2, 4, 2))
        assert witness_value(b, 2).value <= 1e-10
        assert witness_relabeling_scan(b).relabeling_max <= 1e-10


def test_bb84_relabeling_scan():
    b = behavior_from_quantum(bb84_strategy(0.0))
    # pairings (0,1)(2,3): det -1; (0,2)(1,3): columns (1/2, 1/2),(-1/2,-1/2): 0; (0,3)(1,2): 0
    report = witness_relabeling_scan(b)
    assert report.relabeling_max == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(report.matrix, witness_matrix(b, 2))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_all_24_permutations_reduce_to_three_pairings(seed):
    p0 = np.random.default_rng(seed).uniform(size=(4, 2))
    base = witness_relabeling_scan(Behavior(p0)).relabeling_max
    dets = {round(abs(witness_value(Behavior(p0[list(perm)]), 2).signed_det), 12)
            for perm in itertools.permutations(range(4))}
    assert len(dets) <= 3
    assert max(dets) == pytest.approx(base, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_swaps_negate_determinant(seed):
    p0 = np.random.default_rng(seed).uniform(size=(4, 2))
    det = witness_value(Behavior(p0), 2).signed_det
    for perm in ([1, 0, 2, 3], [0, 1, 3, 2], [2, 3, 0, 1]):
        assert witness_value(Behavior(p0[perm]), 2).signed_det == pytest.approx(-det, abs=1e-14)


def test_column_affine_in_mixture(rng):
    pa, pb = rng.uniform(size=(4, 2)), rng.uniform(size=(4, 2))
    pb[2:] = pa[2:]
    cols = []
    for alpha in (0.0, 0.25, 0.5, 1.0):
        cols.append(witness_matrix(Behavior(alpha * pa + (1 - alpha) * pb), 2)[:, 0])
    c0, c1 = cols[0], cols[-1]
    for alpha, c in zip((0.0, 0.25, 0.5, 1.0), cols):
        np.testing.assert_allclose(c, (1 - alpha) * c0 + alpha * c1, atol=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_noise_scaling_general_k(rng, k):
    for _ in range(20):
        b = behavior_from_quantum(random_quantum(rng, 3, 2 * k, k))
        eta = rng.uniform()
        noisy = witness_value(apply_noise(b, eta, rng.uniform(size=k)), k).value
        assert noisy == pytest.approx(eta**k * witness_value(b, k).value, abs=1e-9)


def test_quantum_nullity_qubit_k4(rng):
    for _ in range(100):
        b = behavior_from_quantum(random_quantum(rng, 2, 8, 4))
        assert witness_value(b, 4).value <= 1e-9


@pytest.mark.parametrize("d,k", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)])
def test_classical_nullity(rng, d, k):
    for _ in range(50):
        b = behavior_from_classical(random_classical(rng, d, 2 * k, k))
        assert witness_value(b, k).value <= 1e-9


def test_report_json():
    report = witness_relabeling_scan(HALF)
    assert set(report.to_dict()) == {"k", "matrix", "det", "value", "relabeling_max"}
