from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gnatlab.eigen import eigvec_residual, hessenberg, jacobi_eigh, qr_eigvals

mats = arrays(np.float64, (4, 4), elements=st.floats(-10, 10))


def _sorted_complex(v):
    v = np.asarray(v, dtype=complex)
    return v[np.lexsort((v.imag.round(9), v.real.round(9)))]


@given(mats)
def test_jacobi_matches_lapack(A):
    S = A + A.T
    res = jacobi_eigh(S)
    assert res.converged
    ref = np.linalg.eigvalsh(S)
    assert np.allclose(np.sort(res.values), ref, atol=1e-10 * max(1.0, np.abs(ref).max()))
    # eigenvectors are orthonormal and diagonalise
    V = res.vectors
    assert np.allclose(V.T @ V, np.eye(4), atol=1e-10)
    assert np.allclose(V.T @ S @ V, np.diag(res.values), atol=1e-9 * max(1.0, np.abs(ref).max()))


@given(mats)
def test_qr_matches_lapack(A):
    res = qr_eigvals(A)
    assert res.converged
    ref = np.linalg.eigvals(A)
    scale = max(1.0, np.abs(ref).max())
    got = _sorted_complex(res.values)
    # compare as multisets by greedy matching
    remaining = list(ref)
    for lam in got:
        j = int(np.argmin([abs(lam - r) for r in remaining]))
        assert abs(lam - remaining[j]) < 1e-6 * scale
        remaining.pop(j)


@given(mats)
def test_hessenberg_is_similar(A):
    H = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0.0)
    # similar matrices share the power traces (hence the characteristic polynomial)
    for k in range(1, 5):
        a, h = np.trace(np.linalg.matrix_power(A, k)), np.trace(np.linalg.matrix_power(H, k))
        assert np.isclose(h, a, rtol=1e-10, atol=1e-9 * max(1.0, np.abs(A).max()) ** k)


def test_triangular_and_zero_matrices():
    T = np.triu(np.arange(1.0, 17.0).reshape(4, 4))
    assert np.allclose(np.sort(qr_eigvals(T).values.real), [1, 6, 11, 16])
    assert np.allclose(jacobi_eigh(np.zeros((4, 4))).values, 0)
    assert np.allclose(qr_eigvals(np.zeros((4, 4))).values, 0)


def test_rotation_block_gives_complex_pair():
    R = np.zeros((4, 4))
    R[0, 1], R[1, 0] = -2.0, 2.0
    R[2, 2], R[3, 3] = 1.0, 3.0
    vals = qr_eigvals(R).values
    assert np.allclose(sorted(vals.imag), [-2, 0, 0, 2])


def test_eigvec_residual():
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    assert eigvec_residual(A, 3.0) == 0.0
    assert np.isclose(eigvec_residual(A, 2.5), 0.5)
