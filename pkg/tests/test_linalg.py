import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from detwit.linalg import cross_product, determinant, gellmann_basis, is_psd
from oracles import cofactor_det

PAULI = {
    "x": np.array([[0, 1], [1, 0]]),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
}


def test_gellmann_d2_is_pauli():
    mats = gellmann_basis(2).matrices
    for m, p in zip(mats, (PAULI["x"], PAULI["y"], PAULI["z"])):
        np.testing.assert_array_equal(m, p)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_gellmann_invariants(d):
    basis = gellmann_basis(d)
    mats = basis.matrices
    assert len(basis) == d * d - 1
    assert np.max(np.abs(np.trace(mats, axis1=1, axis2=2))) <= 1e-12
    gram = np.einsum("iab,jba->ij", mats, mats)
    np.testing.assert_allclose(gram, 2 * np.eye(d * d - 1), atol=1e-12)
    for m in mats:
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
    assert basis.phi == pytest.approx(np.sqrt(d * (d - 1) / 2))


def test_gellmann_ordering_d3():
    mats = gellmann_basis(3).matrices
    assert np.allclose(mats[0], [[0, 1, 0], [1, 0, 0], [0, 0, 0]])  # symmetric (0,1)
    assert np.allclose(mats[3], [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]])  # antisymmetric (0,1)
    assert np.allclose(mats[6], np.diag([1, -1, 0]))
    assert np.allclose(mats[7], np.diag([1, 1, -2]) / np.sqrt(3))


def test_gellmann_rejects_small_d():
    with pytest.raises(ValueError):
        gellmann_basis(1)


def test_is_psd_examples():
    assert is_psd(np.eye(3), 1e-9)
    assert not is_psd(np.diag([1.0, -0.5]), 1e-9)
    assert is_psd((np.eye(2) + PAULI["z"]) / 2, 1e-9)


def test_determinant_examples(rng):
    assert determinant(np.eye(2)) == 1
    assert determinant([[1, 0], [0, -1]]) == -1
    m = rng.normal(size=(5, 5))
    assert determinant(m) == pytest.approx(cofactor_det(m), abs=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_determinant_matches_cofactor_oracle(rng, k):
    for _ in range(20):
        m = rng.normal(size=(k, k))
        assert determinant(m) == pytest.approx(cofactor_det(m), rel=1e-10, abs=1e-12)


def test_determinant_rejects_non_square():
    with pytest.raises(ValueError):
        determinant(np.zeros((2, 3)))


def _check_identity(s, v):
    u = cross_product(s)
    full = np.vstack([s, v])
    return float(v @ u), cofactor_det(full)


def test_cross_product_k2_is_ordinary():
    e = np.eye(3)
    u = cross_product([e[0], e[1]])
    np.testing.assert_allclose(u, np.cross(e[0], e[1]))
    for v in e:
        lhs, rhs = _check_identity(e[:2], v)
        assert lhs == pytest.approx(rhs)


def test_cross_product_k3_standard_basis():
    e = np.eye(4)
    u = cross_product(e[:3])
    assert np.count_nonzero(u[:3]) == 0 and abs(u[3]) == 1
    for v in e:
        lhs, rhs = _check_identity(e[:3], v)
        assert lhs == pytest.approx(rhs)


def test_cross_product_dependent_inputs_vanish():
    e = np.eye(4)
    np.testing.assert_allclose(cross_product([e[0], e[1], e[0] + e[1]]), 0, atol=1e-15)


def test_cross_product_rejects_bad_lengths():
    with pytest.raises(ValueError):
        cross_product(np.zeros((2, 4)))


@settings(max_examples=200, deadline=None)
@given(k=st.integers(1, 5), data=st.data())
def test_cross_product_determinant_identity(k, data):
    elems = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
    s = data.draw(arrays(float, (k, k + 1), elements=elems))
    v = data.draw(arrays(float, (k + 1,), elements=elems))
    lhs, rhs = _check_identity(s, v)
    scale = max(1.0, np.abs(s).max() ** k * max(1.0, np.abs(v).max()))
    assert abs(lhs - rhs) <= 1e-9 * scale


@pytest.mark.parametrize("k", [2, 3, 4])
def test_det_of_gram_equals_dot_of_crosses(rng, k):
    for _ in range(50):
        s = rng.normal(size=(k, k + 1))
        t = rng.normal(size=(k, k + 1))
        w = t @ s.T  # W[i, j] = S_j . T_i
        lhs = determinant(w)
        rhs = cross_product(s) @ cross_product(t)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
