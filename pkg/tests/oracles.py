"""Finite-difference oracles, independent of the jet arithmetic."""

from __future__ import annotations

import numpy as np

FD_STEP = 1e-4


def diff(f, x, h=FD_STEP):
    """Fourth-order central differences; result has the derivative axis first."""
    x = np.asarray(x, dtype=float)
    out = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out.append((-np.asarray(f(x + 2 * e)) + 8 * np.asarray(f(x + e))
                    - 8 * np.asarray(f(x - e)) + np.asarray(f(x - 2 * e))) / (12 * h))
    return np.array(out)


def christoffel(metric, x, h=FD_STEP):
    """Gamma[i, j, k] = Gamma^i_jk from finite differences of metric values."""
    g = np.asarray(metric(x))
    dg = diff(metric, x, h)  # dg[c, a, b] = d_c g_ab
    #[a, j, k] = 1/2 (d_j g_ak + d_k g_aj - d_a g_jk)
    lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    return np.einsum("ia,ajk->ijk", np.linalg.inv(g), lower)


def riemann(metric, x, h_outer=1e-3, h_inner=FD_STEP):
    """Components [l, i, j, k] of R(d_i, d_j) d_k = nabla_j nabla_i d_k - nabla_i nabla_j d_k."""
    gam = christoffel(metric, x, h_inner)
    dgam = diff(lambda y: christoffel(metric, y, h_inner), x, h_outer)  # [i, l, j, k] = d_i Gamma^l_jk
    std = (np.einsum("iljk->lijk", dgam) - np.einsum("jlik->lijk", dgam)
           + np.einsum("lim,mjk->lijk", gam, gam) - np.einsum("ljm,mik->lijk", gam, gam))
    return -std


def induced_gram(gen, chart, z):
    """Induced-coordinate Gram matrix of G assembled from the lift Gram and the frame change.

    Base Christoffel symbols come from finite differences of the base metric.
    """
    from gnatlab.base_geometry import eval_metric
    from gnatlab.bundle_metric import lift_gram

    z = np.asarray(z, dtype=float)
    m = z.size // 2
    x, u = z[:m], z[m:]

    def base(y):
        return eval_metric(chart, y, 0).val

    gam = christoffel(base, x)
    N = np.einsum("ijk,j->ik", gam, u)
    L = np.eye(2 * m)
    L[m:, :m] = N
    return L.T @ lift_gram(gen, base(x), u) @ L


def assert_rel_close(actual, expected, rtol, what=""):
    actual, expected = np.asarray(actual), np.asarray(expected)
    scale = max(float(np.abs(expected).max(initial=0.0)), 1e-300)
    err = float(np.abs(actual - expected).max(initial=0.0))
    assert err <= rtol * scale, f"{what}: max error {err:.3e} exceeds {rtol:g} x scale {scale:.3e}"
