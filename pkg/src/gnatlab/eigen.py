"""Eigenvalues of small dense matrices.

Cyclic Jacobi rotations for symmetric input, Householder Hessenberg
reduction followed by double-shift QR iteration otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_SWEEPS = 200
MAX_QR_STEPS = 200
OFFDIAG_TOL = 1e-12
DEFLATE_EPS = 1e-15


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray | None
    converged: bool
    iterations: int


def jacobi_eigh(A, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenResult:
    """Cyclic Jacobi method; input is symmetrised first."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return EigenResult(np.zeros(n), V, True, 0)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            return EigenResult(np.diag(A).copy(), V, True, sweep)
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * scale:
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(n)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
                A[p, q] = A[q, p] = 0.0
                V = V @ R
    return EigenResult(np.diag(A).copy(), V, False, max_sweeps)


def _householder(x):
    v = np.array(x, dtype=float)
    alpha = np.linalg.norm(v)
    if alpha == 0.0:
        return None
    v[0] += np.copysign(alpha, v[0]) if v[0] != 0 else alpha
    return v / np.linalg.norm(v)


def hessenberg(A) -> np.ndarray:
    H = np.array(A, dtype=float)
    n = H.shape[0]
    for k in range(n - 2):
        v = _householder(H[k + 1:, k])
        if v is None:
            continue
        H[k + 1:, :] -= 2.0 * np.outer(v, v @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v)
        H[k + 2:, k] = 0.0
    return H


def householder_q(M) -> np.ndarray:
    """Orthogonal factor of a QR decomposition by Householder reflections."""
    R = np.array(M, dtype=float)
    n = R.shape[0]
    Q = np.eye(n)
    for k in range(n - 1):
        v = _householder(R[k:, k])
        if v is None:
            continue
        R[k:, :] -= 2.0 * np.outer(v, v @ R[k:, :])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v)
    return Q


def _eig2(a, b, c, d):
    tr, det = a + d, a * d - b * c
    disc = 0.25 * (a - d) ** 2 + b * c
    if disc >= 0:
        r = np.sqrt(disc)
        m = 0.5 * tr
        l1 = m + r if m >= 0 else m - r
        l2 = det / l1 if l1 != 0 else m - r if m >= 0 else m + r
        return [complex(l1), complex(l2)]
    r = np.sqrt(-disc)
    return [complex(0.5 * tr, r), complex(0.5 * tr, -r)]


def qr_eigvals(A, max_steps: int = MAX_QR_STEPS) -> EigenResult:
    """Eigenvalues of a general real matrix (possibly complex), unsorted."""
    H = hessenberg(A)
    n = H.shape[0]
    norm = np.linalg.norm(H)
    eigs: list[complex] = []
    hi = n - 1
    steps = 0
    stall = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(H[0, 0]))
            break
        lo = hi
        while lo > 0:
            s = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if abs(H[lo, lo - 1]) <= DEFLATE_EPS * max(s, norm):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(H[hi, hi]))
            hi -= 1
            stall = 0
            continue
        if lo == hi - 1:
            eigs.extend(_eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]))
            hi -= 2
            stall = 0
            continue
        if steps >= max_steps:
            rest = [complex(v) for v in np.diag(H)[lo:hi + 1]]
            return EigenResult(np.array(eigs + rest), None, False, steps)
        steps += 1
        stall += 1
        blk = H[lo:hi + 1, lo:hi + 1]
        m = blk.shape[0]
        if stall % 11 == 0:
            # exceptional shift breaks cycles
            w = abs(blk[-1, -2]) + abs(blk[-2, -3])
            s, t = 1.5 * w, w * w
        else:
            s = blk[-2, -2] + blk[-1, -1]
            t = blk[-2, -2] * blk[-1, -1] - blk[-2, -1] * blk[-1, -2]
        M = blk @ blk - s * blk + t * np.eye(m)
        Q = householder_q(M)
        blk = Q.T @ blk @ Q
        blk[np.tril_indices(m, -2)] = 0.0
        H[lo:hi + 1, lo:hi + 1] = blk
        H[:lo, lo:hi + 1] = H[:lo, lo:hi + 1] @ Q
        H[lo:hi + 1, hi + 1:] = Q.T @ H[lo:hi + 1, hi + 1:]
    return EigenResult(np.array(eigs), None, True, steps)


def eigvec_residual(A, lam) -> float:
    """min_|v|=1 |(A - lam I) v|, i.e. the smallest singular value."""
    A = np.asarray(A)
    M = A - lam * np.eye(A.shape[0])
    return float(np.linalg.svd(M, compute_uv=False)[-1])
