"""The g-natural metric G on TM.

Coordinates on TM are ordered ``(x^1..x^m, u^1..u^m)`` everywhere.  Two
frames are used:

* induced: the coordinate frame {d/dx^k, d/du^k};
* lift: {(d_k)^h, (d_k)^v}, horizontal and vertical lifts of the base
  coordinate vectors.  A tangent vector of TM in this frame is a
  :class:`LiftedVector` with horizontal part ``H`` and vertical part ``V``.

The induced-coordinate Gram matrix, carried as an order-2 jet in all 2m
coordinates, is the only input to the curvature computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .base_geometry import MetricChart, MetricError, eval_metric, levi_civita
from .generators import GeneratorSet, derived_scalars
from .jets import Jet

DEGENERATE_REL_DET = 1e-12
ILL_CONDITIONED_REL_DET = 1e-8


class DegenerateMetricError(MetricError):
    """G is degenerate (relative determinant below threshold) where it is needed."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BundlePoint:
    x: np.ndarray
    u: np.ndarray
    t: float

    @classmethod
    def at(cls, chart: MetricChart, x, u) -> "BundlePoint":
        g = eval_metric(chart, x, 0).val
        u = np.asarray(u, dtype=float)
        if u.shape != (chart.dim,):
            raise ValueError(f"fibre vector must have {chart.dim} components")
        return cls(_frozen(x), _frozen(u), float(u @ g @ u))

    @classmethod
    def with_norm(cls, chart: MetricChart, x, direction, t: float) -> "BundlePoint":
        """Point over x with u parallel to ``direction`` and g(u, u) = t."""
        if t < 0:
            raise ValueError("t must be non-negative")
        g = eval_metric(chart, x, 0).val
        d = np.asarray(direction, dtype=float)
        n2 = d @ g @ d
        if not n2 > 0:
            raise ValueError("fibre direction must be non-zero")
        return cls.at(chart, x, d * np.sqrt(t / n2))

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([self.x, self.u])


@dataclass(frozen=True)
class LiftedVector:
    H: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "H", _frozen(self.H))
        object.__setattr__(self, "V", _frozen(self.V))

    @classmethod
    def horizontal(cls, X) -> "LiftedVector":
        X = np.asarray(X, dtype=float)
        return cls(X, np.zeros_like(X))

    @classmethod
    def vertical(cls, X) -> "LiftedVector":
        X = np.asarray(X, dtype=float)
        return cls(np.zeros_like(X), X)

    @classmethod
    def from_components(cls, c) -> "LiftedVector":
        c = np.asarray(c, dtype=float)
        m = c.shape[0] // 2
        return cls(c[:m], c[m:])

    @property
    def components(self) -> np.ndarray:
        return np.concatenate([self.H, self.V])

    def __add__(self, other: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.H + other.H, self.V + other.V)

    def __sub__(self, other: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.H - other.H, self.V - other.V)

    def __mul__(self, c: float) -> "LiftedVector":
        return LiftedVector(self.H * c, self.V * c)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "LiftedVector":
        return LiftedVector(self.H / c, self.V / c)


@dataclass(frozen=True)
class LiftFrame:
    """Change of frame at a point of TM.

    ``induced_to_lift`` maps induced-coordinate components to lift-frame
    components: d/dx^k = (d_k)^h + Gamma^i_jk u^j (d_i)^v and d/du^k = (d_k)^v.
    ``lift_to_induced`` is its inverse.
    """

    induced_to_lift: np.ndarray
    lift_to_induced: np.ndarray


def _connection_block(gamma: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,j->ik", gamma, u)


def lift_frame(chart: MetricChart, p: BundlePoint) -> LiftFrame:
    m = p.dim
    gam = levi_civita(eval_metric(chart, p.x, 1)).val
    N = _connection_block(gam, p.u)
    L = np.eye(2 * m)
    L[m:, :m] = N
    P = np.eye(2 * m)
    P[m:, :m] = -N
    return LiftFrame(L, P)


def _g_of(g: np.ndarray, X, Y) -> float:
    return float(np.asarray(X) @ g @ np.asarray(Y))


def metric_on_lifts(gen: GeneratorSet, chart: MetricChart, p: BundlePoint, X, Y, slot: str) -> float:
    """G(X^a, Y^b) for slot in {"hh", "hv", "vh", "vv"} from the block formulas."""
    g = eval_metric(chart, p.x, 0).val
    vals = gen.values(p.t)
    gxy, gxu, gyu = _g_of(g, X, Y), _g_of(g, X, p.u), _g_of(g, Y, p.u)
    if slot == "hh":
        a, b = vals["alpha1"] + vals["alpha3"], vals["beta1"] + vals["beta3"]
    elif slot in ("hv", "vh"):
        a, b = vals["alpha2"], vals["beta2"]
    elif slot == "vv":
        a, b = vals["alpha1"], vals["beta1"]
    else:
        raise ValueError(f"unknown slot {slot!r}")
    return float(a * gxy + b * gxu * gyu)


def lift_gram(gen: GeneratorSet, g: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Gram matrix of G in the lift frame at (x, u) given g_x."""
    t = float(u @ g @ u)
    v = gen.values(t)
    gu = g @ u
    uu = np.outer(gu, gu)
    A = (v["alpha1"] + v["alpha3"]) * g + (v["beta1"] + v["beta3"]) * uu
    B = v["alpha2"] * g + v["beta2"] * uu
    C = v["alpha1"] * g + v["beta1"] * uu
    return np.block([[A, B], [B, C]])


def induced_gram_jet(gen: GeneratorSet, chart: MetricChart, p: BundlePoint, order: int = 2) -> Jet:
    """Gram matrix of G in induced coordinates as a jet in (x, u).

    The connection term inside the frame change consumes one derivative of g,
    so an order-``order`` result needs the base metric to order ``order + 1``.
    """
    m = p.dim
    n = 2 * m
    g3 = eval_metric(chart, p.x, order + 1)
    if g3.order < order + 1:
        raise ValueError("base metric jet order too low for the requested bundle order")
    gam = levi_civita(g3).embed(n, range(m))
    g = g3.truncate(order).embed(n, range(m))
    # d1[var, a] = d u^a / d var
    uj = Jet(p.u, np.eye(n)[:, m:] if order >= 1 else None, order=order, nvars=n)

    gu = jets.einsum("ab,b->a", g, uj)
    t = jets.einsum("a,a->", uj, gu)
    curves = {}
    for name, curve in gen.curves().items():
        f = curve.derivatives(float(t.val), order=order)
        curves[name] = t.compose(*f)
    uu = jets.einsum("a,b->ab", gu, gu)
    A = (curves["alpha1"] + curves["alpha3"]) * g + (curves["beta1"] + curves["beta3"]) * uu
    B = curves["alpha2"] * g + curves["beta2"] * uu
    C = curves["alpha1"] * g + curves["beta1"] * uu
    N = jets.einsum("ijk,j->ik", gam, uj)  # N[i, k] = Gamma^i_jk u^j

    CN = jets.matmul(C, N)
    BN = jets.matmul(B, N)
    Gxx = A + BN + BN.T + jets.matmul(N.T, CN)
    Gxu = B + CN.T
    return jets.block([[Gxx, Gxu], [Gxu.T, C]])


def relative_determinant(G: np.ndarray) -> float:
    norms = np.linalg.norm(G, axis=1)
    if np.any(norms == 0):
        return 0.0
    return float(abs(np.linalg.det(G)) / np.prod(norms))


@dataclass(frozen=True)
class BundleMetricMatrix:
    frame: str
    gram: np.ndarray
    jet: Jet | None = field(default=None, repr=False)
    rel_det: float = 1.0
    flags: tuple = ()

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags


def _flags_for(rel_det: float) -> tuple:
    if rel_det < DEGENERATE_REL_DET:
        return ("degenerate",)
    if rel_det < ILL_CONDITIONED_REL_DET:
        return ("ill-conditioned",)
    return ()


def bundle_metric_matrix(gen: GeneratorSet, chart: MetricChart, p: BundlePoint,
                         frame: str = "induced") -> BundleMetricMatrix:
    if frame == "induced":
        jet = induced_gram_jet(gen, chart, p)
        G = 0.5 * (jet.val + jet.val.T)
        rd = relative_determinant(G)
        return BundleMetricMatrix("induced", G, jet, rd, _flags_for(rd))
    if frame == "lift":
        G = lift_gram(gen, eval_metric(chart, p.x, 0).val, p.u)
        rd = relative_determinant(G)
        return BundleMetricMatrix("lift", G, None, rd, _flags_for(rd))
    raise ValueError(f"unknown frame {frame!r}")


def lifted_inner(gen: GeneratorSet, chart: MetricChart, p: BundlePoint,
                 a: LiftedVector, b: LiftedVector) -> float:
    G = lift_gram(gen, eval_metric(chart, p.x, 0).val, p.u)
    return float(a.components @ G @ b.components)


def special_vectors(p: BundlePoint) -> dict:
    """Geodesic flow vector xi = u^h and canonical vertical vector U = u^v."""
    zero = np.zeros_like(p.u)
    return {"xi": LiftedVector(p.u, zero), "U": LiftedVector(zero, p.u)}


def zero_section_normal_basis(gen: GeneratorSet, chart: MetricChart, x) -> list[LiftedVector]:
    """G-orthogonal basis of the G-normal space of the zero section at (x, 0).

    Normal vectors H^h + V^v satisfy (alpha1 + alpha3)(0) H + alpha2(0) V = 0;
    we take H = -alpha2(0) e_i, V = (alpha1 + alpha3)(0) e_i over a
    g-orthonormal basis e_i, which makes them mutually G-orthogonal.
    """
    from .base_geometry import orthonormal_frame

    v = gen.values(0.0)
    a = float(v["alpha1"] + v["alpha3"])
    c = float(v["alpha2"])
    b = float(v["alpha1"])
    if a == 0.0 and c == 0.0:
        raise DegenerateMetricError("(alpha1 + alpha3)(0) and alpha2(0) both vanish")
    if a * (a * b - c * c) == 0.0:
        raise DegenerateMetricError("G is degenerate on the zero section")
    g = eval_metric(chart, x, 0).val
    E = orthonormal_frame(g)
    scale = np.hypot(a, c)
    return [LiftedVector(-c * E[:, i] / scale, a * E[:, i] / scale) for i in range(E.shape[1])]
