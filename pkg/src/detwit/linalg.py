"""Small dense linear algebra used throughout the package.

Everything here works on plain numpy arrays. Matrices are at most 16x16 in
practice, so clarity beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def hermitian(m: Sequence | np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex Hermitian array, symmetrising away round-off.

    Raises ``ValueError`` if ``m`` is not square or deviates from Hermiticity
    by more than ``tol``.
    """
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not is_hermitian(arr, tol):
        raise ValueError("matrix is not Hermitian")
    return (arr + arr.conj().T) / 2


def is_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of the Hermitian matrix ``m`` is >= -tol."""
    return bool(np.linalg.eigvalsh(m)[0] >= -tol)


@dataclass(frozen=True)
class GellMannBasis:
    """Generalised Gell-Mann matrices for dimension ``dim``.

    ``matrices`` has shape ``(dim**2 - 1, dim, dim)``. Ordering is fixed:
    symmetric pairs (j < k), antisymmetric pairs (j < k), then diagonal.
    """

    dim: int
    matrices: np.ndarray

    @property
    def phi(self) -> float:
        """Scale factor sqrt(d(d-1)/2) used by the Bloch parametrisation."""
        return float(np.sqrt(self.dim * (self.dim - 1) / 2))

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def combine(self, v: np.ndarray) -> np.ndarray:
        """Return sum_i v_i * lambda_i."""
        return np.tensordot(np.asarray(v, dtype=float), self.matrices, axes=1)

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        """Real components Tr(m lambda_i) / 2 of a Hermitian matrix."""
        return np.real(np.einsum("ij,kji->k", m, self.matrices)) / 2


_BASIS_CACHE: dict[int, GellMannBasis] = {}


def gellmann_basis(d: int) -> GellMannBasis:
    if int(d) != d or d < 2:
        raise ValueError(f"Gell-Mann basis needs an integer d >= 2, got {d}")
    d = int(d)
    if d in _BASIS_CACHE:
        return _BASIS_CACHE[d]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    mats = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(complex))
    stack = np.array(mats)
    stack.setflags(write=False)
    basis = GellMannBasis(d, stack)
    _BASIS_CACHE[d] = basis
    return basis


def determinant(m: Sequence | np.ndarray) -> float:
    """Determinant of a real square matrix.

    Closed forms for k <= 3, LU with partial pivoting (LAPACK) above that.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k == 1:
        return float(a[0, 0])
    if k == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if k == 3:
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    return float(np.linalg.det(a))


def cofactor_matrix(m: np.ndarray) -> np.ndarray:
    """Matrix C with C[i, j] = (-1)^(i+j) * minor(i, j), so det = sum_j m[i, j] C[i, j]."""
    a = np.asarray(m, dtype=float)
    k = a.shape[0]
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        return np.array([[a[1, 1], -a[1, 0]], [-a[0, 1], a[0, 0]]])
    idx = np.arange(k)
    keep = np.array([np.delete(idx, i) for i in range(k)])
    minors = a[keep[:, None, :, None], keep[None, :, None, :]]
    sign = (-1.0) ** (idx[:, None] + idx[None, :])
    return sign * np.linalg.det(minors)


def cross_product(vectors: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """Generalised cross product of k vectors in R^(k+1).

    Returns the vector u with V . u = det(S_0, ..., S_{k-1}, V) for every V,
    the determinant taken with V as the last row.
    """
    s = np.asarray(vectors, dtype=float)
    if s.ndim != 2 or s.shape[1] != s.shape[0] + 1:
        raise ValueError(
            f"need k vectors of length k+1, got array of shape {s.shape}"
        )
    k = s.shape[0]
    u = np.empty(k + 1)
    for i in range(k + 1):
        minor = np.delete(s, i, axis=1)
        u[i] = (-1) ** (k + i) * (determinant(minor) if k else 1.0)
    return u
