"""Jacobi spectra of (TM, G) over surfaces and Osserman diagnostics.

Frames used here (all at a point of TM, vectors given as lifts):

* ``zero_section``: (H^h, (iH)^h, H^v, (iH)^v) at (x, 0);
* ``lifted_u``: (u^h, (iu)^h, u^v, (iu)^v) for u != 0;
* ``orthonormal``: the G-orthonormal v1..v4 built from u^h, u^v, (iu)^h, (iu)^v.

Matrix entries are reported 1-indexed in docstrings (J_ij = coefficient of
basis vector i in the image of basis vector j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Sequence

import numpy as np

from .base_geometry import (
    MetricChart,
    base_jacobi,
    eval_metric,
    gauss_curvature,
    rotation_i,
)
from .bundle_curvature import BundleCurvaturePack, bundle_curvature
from .bundle_metric import BundlePoint, LiftedVector, lift_gram
from .eigen import eigvec_residual, jacobi_eigh, qr_eigvals
from .generators import GeneratorSet, classify, derived_scalars

ZERO_SECTION_PATTERN = {(1, 3), (2, 2), (2, 4), (3, 3), (4, 4)}
VERTICAL_ZERO_POSITIONS = ((1, 2), (1, 3), (1, 4), (2, 1), (2, 3), (3, 2), (3, 3), (3, 4), (4, 1), (4, 3))
COMPLEX_TOL = 1e-9
MEMBER_TOL = 1e-7


class FrameError(ValueError):
    """A distinguished frame cannot be built at this point."""


class NotRiemannianError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class FrameBasis:
    point: BundlePoint
    vectors: tuple
    kind: str
    orthonormality_residual: float | None = None

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([v.components for v in self.vectors])


def _require_surface(chart: MetricChart):
    if chart.dim != 2:
        raise FrameError("distinguished frames are defined for surfaces only")


def frame_zero_section(chart: MetricChart, x, H) -> FrameBasis:
    _require_surface(chart)
    H = np.asarray(H, dtype=float)
    if not np.any(H):
        raise FrameError("H must be non-zero")
    p = BundlePoint.at(chart, x, np.zeros(2))
    iH = rotation_i(chart, p.x, H)
    vecs = (LiftedVector.horizontal(H), LiftedVector.horizontal(iH),
            LiftedVector.vertical(H), LiftedVector.vertical(iH))
    return FrameBasis(p, vecs, "zero_section")


def frame_lifted_u(chart: MetricChart, p: BundlePoint) -> FrameBasis:
    _require_surface(chart)
    if p.t <= 0:
        raise FrameError("the lifted_u frame needs u != 0")
    iu = rotation_i(chart, p.x, p.u)
    vecs = (LiftedVector.horizontal(p.u), LiftedVector.horizontal(iu),
            LiftedVector.vertical(p.u), LiftedVector.vertical(iu))
    return FrameBasis(p, vecs, "lifted_u")


def _frame_scalars(gen: GeneratorSet, t: float) -> dict:
    d = derived_scalars(gen, t)
    a1, a2, a3 = float(d.alpha1.val), float(d.alpha2.val), float(d.alpha3.val)
    f1, f2, f3 = float(d.phi1.val), float(d.phi2.val), float(d.phi3.val)
    return {"alpha1": a1, "alpha2": a2, "alpha13": a1 + a3, "alpha": float(d.alpha.val),
            "phi1": f1, "phi2": f2, "phi13": f1 + f3, "phi": float(d.phi.val)}


def frame_orthonormal(gen: GeneratorSet, chart: MetricChart, p: BundlePoint) -> FrameBasis:
    """G-orthonormal frame v1..v4 at (x, u), u != 0."""
    _require_surface(chart)
    t = p.t
    if t <= 0:
        raise FrameError("the orthonormal frame needs u != 0")
    s = _frame_scalars(gen, t)
    for name, value in (("t*(phi1+phi3)", t * s["phi13"]), ("phi", s["phi"]),
                        ("alpha", s["alpha"]), ("alpha1+alpha3", s["alpha13"])):
        if not value > 0:
            raise FrameError(f"{name} = {value!r} is not positive at t = {t!r}")
    uh, iuh, uv, iuv = frame_lifted_u(chart, p).vectors
    v1 = uh / np.sqrt(t * s["phi13"])
    v2 = uv * np.sqrt(s["phi13"] / (t * s["phi"])) - uh * (s["phi2"] / np.sqrt(t * s["phi"] * s["phi13"]))
    v3 = iuh / np.sqrt(t * s["alpha13"])
    v4 = iuv * np.sqrt(s["alpha13"] / (t * s["alpha"])) - iuh * (s["alpha2"] / np.sqrt(t * s["alpha"] * s["alpha13"]))
    vecs = (v1, v2, v3, v4)
    B = np.column_stack([v.components for v in vecs])
    G = lift_gram(gen, eval_metric(chart, p.x, 0).val, p.u)
    resid = float(np.abs(B.T @ G @ B - np.eye(4)).max())
    return FrameBasis(p, vecs, "orthonormal", resid)


def jacobi_in_frame(gen: GeneratorSet, chart: MetricChart, p: BundlePoint, direction: LiftedVector,
                    basis: FrameBasis, pack: BundleCurvaturePack | None = None) -> np.ndarray:
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    return pack.jacobi(direction, basis).matrix


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    normalized: np.ndarray
    frame: str | None
    residuals: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.flags


def spectrum(matrix, symmetric_hint: bool = False, norm_sq: float = 1.0, frame: str | None = None,
             gram=None) -> SpectrumReport:
    """Sorted eigenvalues of a small Jacobi matrix with diagnostics.

    ``norm_sq`` is G(X, X) of the direction; ``normalized`` divides by it.
    """
    A = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    flags = []
    scale = max(np.linalg.norm(A), 1.0)
    if symmetric_hint:
        res = jacobi_eigh(A)
        vals = res.values
        recomposition = max((np.linalg.norm(A @ res.vectors[:, i] - vals[i] * res.vectors[:, i])
                             for i in range(len(vals))), default=0.0)
        nA = np.linalg.norm(A)
        self_adj = float(np.linalg.norm(A - A.T) / nA) if nA > 0 else 0.0
    else:
        res = qr_eigvals(A)
        if np.any(np.abs(res.values.imag) > COMPLEX_TOL * scale):
            flags.append("complex")
        vals = res.values.real
        recomposition = max((eigvec_residual(A, lam) for lam in res.values), default=0.0)
        self_adj = None
        if gram is not None:
            S = np.asarray(gram) @ A
            nS = np.linalg.norm(S)
            self_adj = float(np.linalg.norm(S - S.T) / nS) if nS > 0 else 0.0
    if not res.converged:
        flags.append("not-converged")
    order = np.argsort(vals, kind="stable")
    vals = np.asarray(vals)[order]
    residuals = {"recomposition": float(recomposition)}
    if self_adj is not None:
        residuals["self_adjoint"] = self_adj
    return SpectrumReport(vals, vals / norm_sq, frame, residuals, tuple(flags))


def _membership(values, target) -> float:
    return float(np.min(np.abs(np.asarray(values) - target)))


def zero_section_spectrum(gen: GeneratorSet, chart: MetricChart, x, H,
                          pack: BundleCurvaturePack | None = None) -> SpectrumReport:
    """Spectrum of J-bar of the G-unit horizontal lift of H at (x, 0)."""
    a = _zero_scalars(gen)["alpha13"]
    g = eval_metric(chart, x, 0).val
    H = np.asarray(H, dtype=float)
    n2 = a * (H @ g @ H)
    if not n2 > 0:
        raise FrameError("H^h has non-positive G-norm; cannot normalise")
    H = H / np.sqrt(n2)
    basis = frame_zero_section(chart, x, H)
    pack = bundle_curvature(gen, chart, basis.point) if pack is None else pack
    jm = pack.jacobi(basis.vectors[0], basis)
    rep = spectrum(jm.matrix, False, 1.0, "zero_section", jm.gram)
    k = gauss_curvature(chart, x)
    residuals = dict(rep.residuals)
    residuals["zero_member"] = _membership(rep.eigenvalues, 0.0)
    residuals["k_member"] = _membership(rep.eigenvalues, k / a)
    flags = list(rep.flags)
    if residuals["zero_member"] > MEMBER_TOL:
        flags.append("zero-not-member")
    if residuals["k_member"] > MEMBER_TOL:
        flags.append("k-not-member")
    return SpectrumReport(rep.eigenvalues, rep.normalized, rep.frame, residuals, tuple(flags))


def _zero_scalars(gen: GeneratorSet) -> dict:
    v = gen.values(0.0)
    return {"alpha1": float(v["alpha1"]), "alpha2": float(v["alpha2"]),
            "alpha13": float(v["alpha1"] + v["alpha3"])}


def zero_section_pattern_check(gen: GeneratorSet, chart: MetricChart, x, H,
                 pack: BundlePoint | None = None) -> dict:
    """Off-pattern residual of J-bar_{H^h} in the zero_section frame and the k/(alpha1+alpha3)(0) diagonal test."""
    a = _zero_scalars(gen)["alpha13"]
    g = eval_metric(chart, x, 0).val
    H = np.asarray(H, dtype=float)
    H = H / np.sqrt(abs(a) * (H @ g @ H))
    basis = frame_zero_section(chart, x, H)
    pack = bundle_curvature(gen, chart, basis.point) if pack is None else pack
    M = pack.jacobi(basis.vectors[0], basis).matrix
    off = max(abs(M[i - 1, j - 1]) for i in range(1, 5) for j in range(1, 5) if (i, j) not in ZERO_SECTION_PATTERN)
    k = gauss_curvature(chart, x)
    lam = k / a
    return {"matrix": M, "off_pattern": float(off), "k_over_alpha13": lam,
            "diagonal_k": _membership(np.diag(M), lam)}


def zero_section_vertical_matrix_pattern(gen: GeneratorSet, chart: MetricChart, x, V,
                                         pack: BundleCurvaturePack | None = None) -> float:
    """Max |entry| of J-bar_{V^v} at (x, 0) over the positions expected to vanish.

    V is rescaled so that g(V, V) = 1 / alpha1(0), which makes V^v G-unit.
    """
    a1 = _zero_scalars(gen)["alpha1"]
    if not a1 > 0:
        raise FrameError(f"alpha1(0) = {a1!r} must be positive")
    g = eval_metric(chart, x, 0).val
    V = np.asarray(V, dtype=float)
    V = V / np.sqrt(a1 * (V @ g @ V))
    basis = frame_zero_section(chart, x, V)
    pack = bundle_curvature(gen, chart, basis.point) if pack is None else pack
    M = pack.jacobi(basis.vectors[2], basis).matrix
    return float(max(abs(M[i - 1, j - 1]) for i, j in VERTICAL_ZERO_POSITIONS))


def entry_identities(gen: GeneratorSet, chart: MetricChart, p: BundlePoint,
                        pack: BundleCurvaturePack | None = None) -> tuple[float, float]:
    """Residuals of (phi1+phi3) J13 + phi2 J33 = 0 and alpha2 (J44 - J22) + (alpha1+alpha3) J24 = alpha1 J42."""
    J = _lifted_u_matrix(gen, chart, p, pack)
    s = _frame_scalars(gen, p.t)
    r1 = s["phi13"] * J[0, 2] + s["phi2"] * J[2, 2]
    r2 = s["alpha2"] * (J[3, 3] - J[1, 1]) + s["alpha13"] * J[1, 3] - s["alpha1"] * J[3, 1]
    return float(abs(r1)), float(abs(r2))


def _lifted_u_matrix(gen, chart, p, pack=None) -> np.ndarray:
    basis = frame_lifted_u(chart, p)
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    return pack.jacobi(basis.vectors[0], basis).matrix


@dataclass(frozen=True)
class ClosedFormSpectrum:
    formula: np.ndarray
    direct: np.ndarray
    deviation: float
    delta: float
    matrix: np.ndarray
    flags: tuple = ()


def closed_form_spectrum(gen: GeneratorSet, chart: MetricChart, p: BundlePoint,
                            pack: BundleCurvaturePack | None = None) -> ClosedFormSpectrum:
    """Closed-form spectrum {0, J33, (J22 + J44 +- sqrt(Delta)) / 2} of J-bar_{u^h} vs direct eigenvalues."""
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    J = _lifted_u_matrix(gen, chart, p, pack)
    s = _frame_scalars(gen, p.t)
    J22, J33, J44, J42 = J[1, 1], J[2, 2], J[3, 3], J[3, 1]
    a13 = s["alpha13"]
    delta = (J22 - J44 + 2 * s["alpha2"] / a13 * J42) ** 2 + 4 * s["alpha"] / a13**2 * J42**2
    flags = []
    if delta < 0:
        flags.append("negative-delta")
    root = np.sqrt(max(delta, 0.0))
    formula = np.sort([0.0, J33, 0.5 * (J22 + J44 + root), 0.5 * (J22 + J44 - root)])
    frame = frame_orthonormal(gen, chart, p)
    uh = LiftedVector.horizontal(p.u)
    M = pack.jacobi(uh, frame).matrix
    direct = spectrum(M, symmetric_hint=True).eigenvalues
    return ClosedFormSpectrum(formula, direct, float(np.abs(formula - direct).max()), float(delta), J, tuple(flags))


def base_embedding_check(gen: GeneratorSet, chart: MetricChart, x, X, tol: float = 1e-7,
                         pack: BundleCurvaturePack | None = None) -> tuple[bool, float]:
    """Is every eigenvalue of J_X an eigenvalue of J-bar_{X^h} at (x, 0)?"""
    base = qr_eigvals(base_jacobi(chart, x, X)).values.real
    p = BundlePoint.at(chart, x, np.zeros(chart.dim))
    pack = bundle_curvature(gen, chart, p) if pack is None else pack
    jm = pack.jacobi(LiftedVector.horizontal(X), "lift")
    bundle = qr_eigvals(jm.matrix).values
    resid = max(float(np.min(np.abs(bundle - lam))) for lam in base)
    return resid < tol, resid


def unit_direction_spectrum(gen: GeneratorSet, chart: MetricChart, x, direction, t: float) -> SpectrumReport:
    """Normalised spectrum of J-bar along u^h (or H^h on the zero section), u parallel to ``direction``."""
    p = BundlePoint.with_norm(chart, x, direction, t)
    pack = bundle_curvature(gen, chart, p)
    if p.t > 0:
        X = LiftedVector.horizontal(p.u)
        basis = frame_lifted_u(chart, p)
    else:
        X = LiftedVector.horizontal(np.asarray(direction, dtype=float))
        basis = frame_zero_section(chart, x, direction)
    jm = pack.jacobi(X, basis)
    G = lift_gram(gen, eval_metric(chart, p.x, 0).val, p.u)
    norm_sq = float(X.components @ G @ X.components)
    return spectrum(jm.matrix, False, norm_sq, basis.kind, jm.gram)


# ---------------------------------------------------------------------------- Osserman scans

def _design_600cell() -> np.ndarray:
    """60 antipodal representatives of the 600-cell vertices on S^3."""
    gr = (1 + 5**0.5) / 2
    pts = []
    for i in range(4):
        e = np.zeros(4)
        e[i] = 1.0
        pts.append(e)
    pts.extend(np.array(s) * 0.5 for s in product((1.0, -1.0), repeat=4))
    even = [pm for pm in permutations(range(4)) if _parity(pm) == 0]
    base = (gr, 1.0, 1 / gr, 0.0)
    for pm in even:
        for signs in product((1.0, -1.0), repeat=3):
            v = np.zeros(4)
            vals = [signs[0] * base[0], signs[1] * base[1], signs[2] * base[2], 0.0]
            for src, dst in enumerate(pm):
                v[dst] = vals[src]
            pts.append(0.5 * v)
    reps = []
    for v in pts:
        nz = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        w = v if nz > 0 else -v
        if not any(np.allclose(w, r) for r in reps):
            reps.append(w)
    return np.array(reps)


def _parity(perm) -> int:
    perm = list(perm)
    swaps = 0
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            swaps += 1
    return swaps % 2


def _halton(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def sphere_directions(n: int) -> np.ndarray:
    """Deterministic unit vectors in R^4: the 600-cell design, then Halton points."""
    design = _design_600cell()
    if n <= len(design):
        return design[:n]
    extra = []
    for i in range(1, n - len(design) + 1):
        s, a, b = _halton(i, 2), _halton(i, 3), _halton(i, 5)
        r1, r2 = np.sqrt(1 - s), np.sqrt(s)
        extra.append([r1 * np.cos(2 * np.pi * a), r1 * np.sin(2 * np.pi * a),
                      r2 * np.cos(2 * np.pi * b), r2 * np.sin(2 * np.pi * b)])
    return np.vstack([design, np.array(extra)])


def gram_schmidt(B: np.ndarray, G: np.ndarray) -> np.ndarray:
    """G-orthonormalise the columns of B (G positive definite)."""
    E = np.array(B, dtype=float)
    for i in range(E.shape[1]):
        for j in range(i):
            E[:, i] -= (E[:, j] @ G @ E[:, i]) * E[:, j]
        n2 = E[:, i] @ G @ E[:, i]
        if not n2 > 0:
            raise NotRiemannianError("G is not positive definite on the sampled frame")
        E[:, i] /= np.sqrt(n2)
    return E


@dataclass(frozen=True)
class OssermanVerdict:
    scope: str
    is_osserman: bool
    spectrum_spread: float
    witnesses: dict
    tolerance: float


@dataclass(frozen=True)
class OssermanReport:
    pointwise: OssermanVerdict
    global_: OssermanVerdict
    point_spreads: np.ndarray
    spectra: np.ndarray  # (points, directions, 4), normalised, sorted
    directions: np.ndarray


def _spread(S: np.ndarray) -> tuple[float, tuple]:
    """Sup-metric diameter of a set of sorted spectra and the pair realising it."""
    if len(S) <= 1:
        return 0.0, (0, 0)
    col = np.argmax(S.max(axis=0) - S.min(axis=0))
    hi, lo = int(np.argmax(S[:, col])), int(np.argmin(S[:, col]))
    return float(S[hi, col] - S[lo, col]), (lo, hi)


def point_frame(gen: GeneratorSet, chart: MetricChart, p: BundlePoint) -> np.ndarray:
    """G-orthonormal basis (columns, lift components) used for direction sampling at p."""
    if p.t > 0:
        B = frame_lifted_u(chart, p).matrix
    else:
        B = frame_zero_section(chart, p.x, np.array([1.0, 0.0])).matrix
    G = lift_gram(gen, eval_metric(chart, p.x, 0).val, p.u)
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NotRiemannianError(f"G is not positive definite at x={p.x.tolist()}, u={p.u.tolist()}",
                                 {"x": p.x.tolist(), "u": p.u.tolist()}) from exc
    return gram_schmidt(B, G)


def osserman_test(gen: GeneratorSet, chart: MetricChart, points: Sequence[BundlePoint],
                  directions_per_point: int = 60, tolerance: float = 1e-5) -> OssermanReport:
    """Sampled pointwise and global Osserman diagnostics over G-unit directions."""
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    if directions_per_point < 1:
        raise ValueError("need at least one direction per point")
    cls = classify(gen, sorted({p.t for p in points}))
    if not cls.riemannian:
        raise NotRiemannianError("generator set is not Riemannian on the sampled t values",
                                 cls.witnesses.get("not_riemannian"))
    dirs = sphere_directions(directions_per_point)
    spectra = np.zeros((len(points), len(dirs), 4))
    for ip, p in enumerate(points):
        E = point_frame(gen, chart, p)
        pack = bundle_curvature(gen, chart, p)
        for idir, c in enumerate(dirs):
            d = LiftedVector.from_components(E @ c)
            M = pack.jacobi(d, E).matrix
            spectra[ip, idir] = spectrum(M, symmetric_hint=True).eigenvalues
    spreads, pairs = zip(*(_spread(S) for S in spectra))
    worst = int(np.argmax(spreads))
    pointwise = OssermanVerdict(
        "pointwise_at_x", bool(max(spreads) < tolerance), float(max(spreads)),
        {"point": worst, "directions": pairs[worst]}, tolerance)
    flat = spectra.reshape(-1, 4)
    gspread, (lo, hi) = _spread(flat)
    nd = len(dirs)
    global_ = OssermanVerdict(
        "global", bool(gspread < tolerance), gspread,
        {"low": (lo // nd, lo % nd), "high": (hi // nd, hi % nd)}, tolerance)
    return OssermanReport(pointwise, global_, np.array(spreads), spectra, dirs)
