"""Levi-Civita connection, curvature and Jacobi operators of (TM, G).

Everything is computed from the induced-coordinate Gram matrix of G and its
derivatives; the curvature sign convention is the one documented in
:mod:`gnatlab.base_geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base_geometry import MetricChart, eval_metric, levi_civita, riemann_from_christoffel
from .bundle_metric import (
    BundlePoint,
    DegenerateMetricError,
    LiftedVector,
    LiftFrame,
    induced_gram_jet,
    lift_frame,
    relative_determinant,
    DEGENERATE_REL_DET,
    ILL_CONDITIONED_REL_DET,
)
from .generators import GeneratorSet
from .jets import Jet


@dataclass(frozen=True)
class BundleCurvaturePack:
    """Connection and curvature of G at one point, indices over (x, u) coordinates."""

    point: BundlePoint
    gram: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    frame: LiftFrame
    christoffel_jet: Jet = field(repr=False)
    gram_jet: Jet = field(repr=False)
    flags: tuple = ()

    @property
    def riemann_lowered(self) -> np.ndarray:
        return np.einsum("ad,dbce->abce", self.gram, self.riemann)

    def to_induced(self, v: LiftedVector) -> np.ndarray:
        return self.frame.lift_to_induced @ v.components

    def jacobi(self, direction: LiftedVector, frame="lift") -> "JacobiMatrix":
        X = self.to_induced(direction)
        J_ind = np.einsum("lajb,a,b->lj", self.riemann, X, X)
        L, P = self.frame.induced_to_lift, self.frame.lift_to_induced
        if isinstance(frame, str) and frame == "induced":
            M, gram, kind = J_ind, self.gram, "induced"
        elif isinstance(frame, str) and frame == "lift":
            M, gram, kind = L @ J_ind @ P, P.T @ self.gram @ P, "lift"
        else:
            B = _basis_matrix(frame)
            Bi = P @ B
            if abs(np.linalg.det(Bi)) < 1e-14 * np.prod(np.linalg.norm(Bi, axis=0)):
                raise ValueError("supplied basis is singular")
            M = np.linalg.solve(Bi, J_ind @ Bi)
            gram, kind = Bi.T @ self.gram @ Bi, "basis"
        return JacobiMatrix(self.point, direction, kind, M, gram)


def _basis_matrix(basis) -> np.ndarray:
    if isinstance(basis, np.ndarray):
        return basis
    vectors = getattr(basis, "vectors", basis)
    return np.column_stack([v.components for v in vectors])


@dataclass(frozen=True)
class JacobiMatrix:
    point: BundlePoint
    direction: LiftedVector
    frame: str
    matrix: np.ndarray
    gram: np.ndarray = field(repr=False)

    def self_adjoint_residual(self) -> float:
        S = self.gram @ self.matrix
        scale = np.linalg.norm(S)
        return float(np.linalg.norm(S - S.T) / scale) if scale > 0 else 0.0


def _check(G: np.ndarray) -> tuple:
    rd = relative_determinant(G)
    if rd < DEGENERATE_REL_DET:
        raise DegenerateMetricError(f"G is degenerate here (relative determinant {rd:.3e})")
    return ("ill-conditioned",) if rd < ILL_CONDITIONED_REL_DET else ()


def bundle_christoffel(gen: GeneratorSet, chart: MetricChart, p: BundlePoint) -> Jet:
    """Christoffel symbols of G (order-1 jet), layout [A, B, C] = Gamma^A_BC."""
    G = induced_gram_jet(gen, chart, p, order=2)
    _check(G.val)
    return levi_civita(G)


def bundle_curvature(gen: GeneratorSet, chart: MetricChart, p: BundlePoint) -> BundleCurvaturePack:
    G = induced_gram_jet(gen, chart, p, order=2)
    flags = _check(G.val)
    gam = levi_civita(G)
    rm = riemann_from_christoffel(gam).val
    return BundleCurvaturePack(p, G.val, gam.val, rm, lift_frame(chart, p), gam, G, flags)


def bundle_riemann(gen: GeneratorSet, chart: MetricChart, p: BundlePoint) -> np.ndarray:
    """R^D_ABC of G at p (layout [D, A, B, C]: D-component of R(d_A, d_B) d_C)."""
    return bundle_curvature(gen, chart, p).riemann


def bundle_jacobi(gen: GeneratorSet, chart: MetricChart, p: BundlePoint, direction: LiftedVector,
                  frame="lift", pack: BundleCurvaturePack | None = None) -> JacobiMatrix:
    """Matrix of Y -> R(X, Y)X for X = ``direction`` in the requested frame.

    ``frame`` is "induced", "lift", a FrameBasis, a list of LiftedVectors or a
    matrix whose columns are lift-frame components.
    """
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    return pack.jacobi(direction, frame)


def covariant_derivative_lifted(gen: GeneratorSet, chart: MetricChart, x, X, Y, kind: str = "hh",
                                pack: BundleCurvaturePack | None = None) -> LiftedVector:
    """nabla-bar_{X^a} Y^b at (x, 0) for constant-coefficient extensions of X, Y.

    ``kind`` is two letters from {h, v}: lift of X then lift of Y.
    """
    if kind not in ("hh", "hv", "vh", "vv"):
        raise ValueError(f"unknown kind {kind!r}")
    m = chart.dim
    p = BundlePoint.at(chart, x, np.zeros(m))
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    zero = np.zeros(m)
    xa = np.concatenate([X, zero]) if kind[0] == "h" else np.concatenate([zero, X])
    yb = np.concatenate([Y, zero]) if kind[1] == "h" else np.concatenate([zero, Y])
    out = np.einsum("cab,a,b->c", pack.christoffel, xa, yb)
    if kind == "vh":
        # Y^h = Y^k d_k - Gamma^i_jk u^j Y^k d/du^i changes along the fibre
        gam = levi_civita(eval_metric(chart, p.x, 1)).val
        out[m:] -= np.einsum("iak,a,k->i", gam, X, Y)
    # at u = 0 the induced and lift frames coincide
    return LiftedVector.from_components(out)


def totally_geodesic_residual(gen: GeneratorSet, chart: MetricChart, x, X, Y,
                              pack: BundlePoint | None = None) -> float:
    """|vertical part of nabla-bar_{X^h} Y^h| + |horizontal part - nabla_X Y| at (x, 0)."""
    cov = covariant_derivative_lifted(gen, chart, x, X, Y, "hh", pack=pack)
    gam = levi_civita(eval_metric(chart, x, 1)).val
    nabla = np.einsum("iab,a,b->i", gam, np.asarray(X, float), np.asarray(Y, float))
    return float(np.linalg.norm(cov.V) + np.linalg.norm(cov.H - nabla))
