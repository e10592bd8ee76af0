"""Chart-based geometry of the base surface (M, g).

Curvature sign convention
-------------------------
Throughout the package the curvature operator is

    R(X, Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z + nabla_[X,Y] Z,

the opposite of the other common convention.  With it the surface identity
``R(X, Y)Z = k g(iX, Y) iZ`` holds with k > 0 on the round sphere, and the
Jacobi operator ``J_X(Y) = R(X, Y)X`` has the eigenvalue +k on ``iX``.
Arrays store ``R[l, i, j, k]`` = l-th component of ``R(d_i, d_j) d_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jets
from .jets import Jet

METRIC_ORDER = 3
POLE_MARGIN = 1e-3


class DomainError(ValueError):
    """Point outside the declared chart domain."""


class MetricError(ValueError):
    """Metric is singular or not positive definite where it was evaluated."""


class DimensionError(ValueError):
    """Operation only defined for a different base dimension."""


@dataclass(frozen=True)
class MetricChart:
    """A coordinate chart with metric components given as a jet-valued function.

    ``metric_fn`` receives the coordinate jet (shape (m,)) and returns the
    (m, m) metric as a jet of the same order.
    """

    name: str
    dim: int
    metric_fn: Callable[[Jet], Jet] = field(repr=False)
    domain: Callable[[np.ndarray], bool] = field(repr=False, default=lambda x: True)

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected {self.dim} coordinates, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or not self.domain(x):
            raise DomainError(f"{self.name}: point {x.tolist()} is outside the chart domain")
        return x


# ---------------------------------------------------------------------------- presets

def flat_chart() -> MetricChart:
    def metric(x: Jet) -> Jet:
        return Jet.constant(np.eye(2), x.nvars, x.order)

    return MetricChart("flat", 2, metric)


def sphere_chart(radius: float = 1.0) -> MetricChart:
    """Round sphere in spherical coordinates (theta, phi), away from the poles."""
    r2 = float(radius) ** 2
    if not r2 > 0:
        raise ValueError("sphere radius must be positive")

    def metric(x: Jet) -> Jet:
        s = x[0].sin()
        zero = Jet.constant(0.0, x.nvars, x.order)
        gpp = s * s * r2
        return jets.stack([jets.stack([zero + r2, zero]), jets.stack([zero, gpp])])

    def domain(x):
        return POLE_MARGIN < x[0] < np.pi - POLE_MARGIN

    return MetricChart(f"sphere:{radius:g}", 2, metric, domain)


def hyperbolic_chart() -> MetricChart:
    """Upper half-plane with g = (dx^2 + dy^2) / y^2."""

    def metric(x: Jet) -> Jet:
        w = x[1] ** -2
        zero = w * 0.0
        return jets.stack([jets.stack([w, zero]), jets.stack([zero, w])])

    def domain(x):
        return x[1] > POLE_MARGIN

    return MetricChart("hyperbolic", 2, metric, domain)


def stereographic_chart(radius: float = 1.0) -> MetricChart:
    """Round sphere in stereographic coordinates from the north pole."""
    r2 = float(radius) ** 2
    if not r2 > 0:
        raise ValueError("sphere radius must be positive")

    def metric(x: Jet) -> Jet:
        w = (x[0] * x[0] + x[1] * x[1] + 1.0) ** -2 * (4.0 * r2)
        zero = w * 0.0
        return jets.stack([jets.stack([w, zero]), jets.stack([zero, w])])

    return MetricChart(f"stereographic:{radius:g}", 2, metric)


def _term_jet(term: Mapping, x: Jet) -> Jet:
    """c * prod x_i^p_i * sin(x_i)^a_i * cos(x_i)^b_i."""
    m = x.shape[0]
    out = Jet.constant(float(term.get("c", 1.0)), x.nvars, x.order)
    for key, fn in (("x", None), ("sin", "sin"), ("cos", "cos")):
        powers = term.get(key, [0] * m)
        if len(powers) != m:
            raise ValueError(f"term exponent list {key!r} must have {m} entries")
        for i, p in enumerate(powers):
            if int(p) != p:
                raise ValueError("term exponents must be integers")
            if p == 0:
                continue
            base = x[i] if fn is None else getattr(x[i], fn)()
            out = out * base ** int(p)
    return out


def custom_chart(table: Mapping, name: str = "custom") -> MetricChart:
    """Surface metric from a coefficient table.

    ``{"components": {"g11": [term, ...], "g12": [...], "g22": [...]},
       "domain": {"lower": [..], "upper": [..]}}`` with each term
    ``{"c": coef, "x": [p1, p2], "sin": [a1, a2], "cos": [b1, b2]}``.
    Missing components are zero; exponents are integers (negative allowed
    for ``x``).
    """
    comps = table.get("components")
    if not isinstance(comps, Mapping):
        raise ValueError("custom chart needs a 'components' object")
    unknown = set(comps) - {"g11", "g12", "g22"}
    if unknown:
        raise ValueError(f"unknown metric components {sorted(unknown)}")
    for key, terms in comps.items():
        if not isinstance(terms, list) or not all(isinstance(t, Mapping) for t in terms):
            raise ValueError(f"component {key} must be a list of term objects")
    dom = table.get("domain", {})
    lower = np.asarray(dom.get("lower", [-np.inf, -np.inf]), dtype=float)
    upper = np.asarray(dom.get("upper", [np.inf, np.inf]), dtype=float)

    def entry(key, x):
        total = Jet.constant(0.0, x.nvars, x.order)
        for term in comps.get(key, []):
            total = total + _term_jet(term, x)
        return total

    def metric(x: Jet) -> Jet:
        g11, g12, g22 = entry("g11", x), entry("g12", x), entry("g22", x)
        return jets.stack([jets.stack([g11, g12]), jets.stack([g12, g22])])

    def domain(x):
        return bool(np.all(x > lower) and np.all(x < upper))

    return MetricChart(name, 2, metric, domain)


def chart_preset(spec) -> MetricChart:
    """Chart by name: ``"flat"``, ``"sphere:r"``, ``"hyperbolic"``, or a custom table."""
    if isinstance(spec, MetricChart):
        return spec
    if isinstance(spec, Mapping):
        if "custom" in spec:
            return custom_chart(spec["custom"])
        if "components" in spec:
            return custom_chart(spec)
        name = spec.get("preset")
        if name == "sphere" and "radius" in spec:
            return sphere_chart(float(spec["radius"]))
        return chart_preset(name)
    if not isinstance(spec, str):
        raise ValueError(f"unrecognised chart specification {spec!r}")
    name, _, arg = spec.strip().lower().partition(":")
    if name in ("flat", "torus", "flat-torus"):
        return flat_chart()
    if name == "sphere":
        return sphere_chart(float(arg) if arg else 1.0)
    if name in ("hyperbolic", "half-plane"):
        return hyperbolic_chart()
    raise ValueError(f"unknown chart preset {spec!r}")


# ---------------------------------------------------------------------------- geometry

def check_positive_definite(g: np.ndarray, what: str = "metric") -> None:
    if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise MetricError(f"{what} is not symmetric")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise MetricError(f"{what} is not positive definite: {g.tolist()}") from exc


def eval_metric(chart: MetricChart, x, order: int = METRIC_ORDER) -> Jet:
    """g_ij at x with all partials up to ``order`` (default 3)."""
    x = chart.check(x)
    g = chart.metric_fn(Jet.variables(x, order))
    if g.order < order:
        raise ValueError(f"chart {chart.name} returned a jet of order {g.order} < {order}")
    check_positive_definite(g.val, f"metric of chart {chart.name} at {x.tolist()}")
    return g


def levi_civita(metric: Jet) -> Jet:
    """Christoffel symbols Gamma^i_jk of a metric jet; result has one order less.

    Index layout of the result: ``[i, j, k]``.
    """
    if metric.order < 1:
        raise ValueError("need at least first derivatives of the metric")
    ginv = jets.inv(metric.truncate(metric.order - 1))
    dg = metric.gradient()  # dg[l, a, b] = d_l g_ab
    bracket = jets.einsum("jlk->ljk", dg) + jets.einsum("klj->ljk", dg) - dg
    return 0.5 * jets.einsum("il,ljk->ijk", ginv, bracket)


def riemann_from_christoffel(gamma: Jet) -> Jet:
    """R[l, i, j, k] in the package sign convention; one order less than ``gamma``."""
    dgam = gamma.gradient()  # dgam[i, l, j, k] = d_i Gamma^l_jk
    g0 = gamma.truncate(gamma.order - 1)
    std = (
        jets.einsum("iljk->lijk", dgam)
        - jets.einsum("jlik->lijk", dgam)
        + jets.einsum("lip,pjk->lijk", g0, g0)
        - jets.einsum("ljp,pik->lijk", g0, g0)
    )
    return -std


@dataclass(frozen=True)
class CurvaturePack:
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    riemann_lowered: np.ndarray
    gauss: float | None


def christoffel(chart: MetricChart, x) -> Jet:
    """Gamma^i_jk at x carried to second order."""
    return levi_civita(eval_metric(chart, x, METRIC_ORDER))


def riemann(chart: MetricChart, x) -> tuple[np.ndarray, np.ndarray]:
    """(R^l_ijk, R_lijk) at x; lowered index is the first one."""
    g = eval_metric(chart, x)
    rm = riemann_from_christoffel(levi_civita(g)).val
    return rm, np.einsum("al,lijk->aijk", g.val, rm)


def rotation_i(chart: MetricChart, x, X, metric: np.ndarray | None = None) -> np.ndarray:
    """Positive g-orthogonal quarter turn: (iX)^1 = -(gX)_2/sqrt(det g), (iX)^2 = (gX)_1/sqrt(det g)."""
    if chart.dim != 2:
        raise DimensionError("the rotation operator is only defined on surfaces")
    g = eval_metric(chart, x, 0).val if metric is None else np.asarray(metric)
    X = np.asarray(X, dtype=float)
    gx = g @ X
    return np.array([-gx[1], gx[0]]) / np.sqrt(np.linalg.det(g))


def gauss_curvature(chart: MetricChart, x) -> float:
    """k from g(R(X, iX)X, iX) / g(X, X)^2 with X = d_1."""
    if chart.dim != 2:
        raise DimensionError("Gauss curvature is computed for surfaces only")
    g = eval_metric(chart, x)
    rm = riemann_from_christoffel(levi_civita(g)).val
    X = np.array([1.0, 0.0])
    iX = rotation_i(chart, x, X, g.val)
    rxy = np.einsum("lijk,i,j,k->l", rm, X, iX, X)
    return float(iX @ g.val @ rxy / (X @ g.val @ X) ** 2)


def curvature_pack(chart: MetricChart, x) -> CurvaturePack:
    g = eval_metric(chart, x)
    gam = levi_civita(g)
    rm = riemann_from_christoffel(gam).val
    k = gauss_curvature(chart, x) if chart.dim == 2 else None
    return CurvaturePack(g.val, gam.val, rm, np.einsum("al,lijk->aijk", g.val, rm), k)


def curvature_operator(rm: np.ndarray, X, Y, Z) -> np.ndarray:
    return np.einsum("lijk,i,j,k->l", rm, X, Y, Z)


def base_jacobi(chart: MetricChart, x, X) -> np.ndarray:
    """Matrix of Y -> R(X, Y)X in the coordinate frame."""
    rm, _ = riemann(chart, x)
    X = np.asarray(X, dtype=float)
    return np.einsum("lajb,a,b->lj", rm, X, X)


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns form a g-orthonormal basis (Gram-Schmidt of the coordinate basis)."""
    L = np.linalg.cholesky(g)
    return np.linalg.inv(L).T


def sphere_embedding(x, radius: float = 1.0) -> np.ndarray:
    th, ph = x
    return radius * np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def sphere_embedding_jacobian(x, radius: float = 1.0) -> np.ndarray:
    th, ph = x
    return radius * np.array([
        [np.cos(th) * np.cos(ph), -np.sin(th) * np.sin(ph)],
        [np.cos(th) * np.sin(ph), np.sin(th) * np.cos(ph)],
        [-np.sin(th), 0.0],
    ])


def sphere_chart_coords(p: Sequence[float], radius: float = 1.0) -> np.ndarray:
    p = np.asarray(p, dtype=float) / radius
    return np.array([np.arccos(np.clip(p[2], -1.0, 1.0)), np.arctan2(p[1], p[0])])


def stereographic_embedding(x, radius: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Point on the sphere of the given radius and the 3x2 Jacobian of the parametrisation."""
    xj = Jet.variables(np.asarray(x, dtype=float), order=1)
    s = xj[0] * xj[0] + xj[1] * xj[1]
    inv = (s + 1.0) ** -1 * radius
    P = jets.stack([xj[0] * inv * 2.0, xj[1] * inv * 2.0, (s - 1.0) * inv])
    return P.val, P.d1.T


def stereographic_coords(p: Sequence[float], radius: float = 1.0) -> np.ndarray:
    p = np.asarray(p, dtype=float) / radius
    return p[:2] / (1.0 - p[2])
