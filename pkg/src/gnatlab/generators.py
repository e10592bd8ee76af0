"""Generator functions of a g-natural metric and their classification.

A g-natural metric on TM is fixed by six curves alpha_1..3, beta_1..3 of the
squared fibre norm ``t = g(u, u)``.  Curves are rational functions of t so
that their t-derivatives are exact; they are evaluated through 1-variable
jets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .jets import Jet

GENERATOR_NAMES = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3")

DEFAULT_T_MAX = 10.0
DEFAULT_SAMPLES = 256
NONDEGENERACY_EPS = 1e-12


class GeneratorError(ValueError):
    """Invalid generator definition or evaluation request."""


def _horner(coeffs: Sequence[float], t: Jet) -> Jet:
    out = Jet.constant(np.full(t.shape, coeffs[-1]), t.nvars, t.order)
    for c in reversed(coeffs[:-1]):
        out = out * t + c
    return out


@dataclass(frozen=True)
class RationalCurve:
    """t -> num(t) / den(t); coefficient lists run from the constant term upward."""

    num: tuple
    den: tuple = (1.0,)

    def __post_init__(self):
        num = tuple(float(c) for c in self.num)
        den = tuple(float(c) for c in self.den)
        if not num or not den:
            raise GeneratorError("rational curve needs non-empty numerator and denominator")
        if not all(np.isfinite(num + den)):
            raise GeneratorError("rational curve coefficients must be finite")
        if all(c == 0.0 for c in den):
            raise GeneratorError("denominator polynomial is identically zero")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, c: float) -> "RationalCurve":
        return cls((c,), (1.0,))

    def jet(self, t, order: int = 2) -> Jet:
        """Jet in t (one variable) of the curve at ``t`` (scalar or array)."""
        tj = t if isinstance(t, Jet) else Jet(np.asarray(t, dtype=float),
                                               np.ones((1,) + np.shape(t)),
                                               order=order, nvars=1)
        p = _horner(self.num, tj)
        if self.den == (1.0,):
            return p
        q = _horner(self.den, tj)
        if np.any(q.val == 0):
            raise GeneratorError("rational curve has a pole at the requested t")
        return p / q

    def eval(self, t):
        """(value, d/dt, d2/dt2) at ``t``."""
        j = self.jet(t, order=2)
        return j.val, j.d1[0], j.d2[0, 0]

    def derivatives(self, t, order: int = 3) -> tuple:
        j = self.jet(t, order=order)
        out = [j.val]
        if order >= 1:
            out.append(j.d1[0])
        if order >= 2:
            out.append(j.d2[0, 0])
        if order >= 3:
            out.append(j.d3[0, 0, 0])
        return tuple(out)

    def to_json(self) -> dict:
        return {"kind": "rational", "num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_json(cls, obj) -> "RationalCurve":
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return cls.constant(float(obj))
        if not isinstance(obj, Mapping):
            raise GeneratorError(f"generator expression must be an object, got {obj!r}")
        kind = obj.get("kind")
        if kind == "constant":
            return cls.constant(float(obj["value"]))
        if kind != "rational":
            raise GeneratorError(f"unknown generator expression kind {kind!r}")
        try:
            num = [float(c) for c in obj["num"]]
            den = [float(c) for c in obj.get("den", [1.0])]
        except (KeyError, TypeError, ValueError) as exc:
            raise GeneratorError(f"malformed rational expression {obj!r}") from exc
        return cls(tuple(num), tuple(den))


@dataclass(frozen=True)
class GeneratorSet:
    alpha1: RationalCurve
    alpha2: RationalCurve
    alpha3: RationalCurve
    beta1: RationalCurve
    beta2: RationalCurve
    beta3: RationalCurve
    name: str = field(default="custom", compare=False)

    def curves(self) -> dict:
        return {n: getattr(self, n) for n in GENERATOR_NAMES}

    def values(self, t) -> dict:
        return {n: c.jet(t, order=0).val for n, c in self.curves().items()}

    def to_json(self) -> dict:
        return {n: c.to_json() for n, c in self.curves().items()}

    @classmethod
    def from_json(cls, obj, name: str = "custom") -> "GeneratorSet":
        if not isinstance(obj, Mapping):
            raise GeneratorError("generator table must be an object")
        missing = [n for n in GENERATOR_NAMES if n not in obj]
        if missing:
            raise GeneratorError(f"generator table is missing {missing}")
        extra = sorted(set(obj) - set(GENERATOR_NAMES))
        if extra:
            raise GeneratorError(f"unknown generator entries {extra}")
        return cls(**{n: RationalCurve.from_json(obj[n]) for n in GENERATOR_NAMES}, name=name)


def sasaki() -> GeneratorSet:
    one, zero = RationalCurve.constant(1.0), RationalCurve.constant(0.0)
    return GeneratorSet(one, zero, zero, zero, zero, zero, name="sasaki")


def cheeger_gromoll() -> GeneratorSet:
    inv = RationalCurve((1.0,), (1.0, 2.0))
    zero = RationalCurve.constant(0.0)
    return GeneratorSet(
        alpha1=inv,
        alpha2=zero,
        alpha3=RationalCurve((0.0, 2.0), (1.0, 2.0)),
        beta1=inv,
        beta2=zero,
        beta3=RationalCurve((-1.0,), (1.0, 2.0)),
        name="cheeger-gromoll",
    )


_PRESETS = {"sasaki": sasaki, "cheeger-gromoll": cheeger_gromoll}


def preset(name) -> GeneratorSet:
    """Named generator set, or a custom JSON table of six expression objects."""
    if isinstance(name, GeneratorSet):
        return name
    if isinstance(name, Mapping):
        if "preset" in name:
            return preset(name["preset"])
        return GeneratorSet.from_json(name)
    key = str(name).strip().lower().replace("_", "-")
    if key not in _PRESETS:
        raise GeneratorError(f"unknown generator preset {name!r}; known: {sorted(_PRESETS)}")
    return _PRESETS[key]()


@dataclass(frozen=True)
class DerivedScalars:
    """phi_i = alpha_i + t beta_i, alpha, phi and their first two t-derivatives.

    Each attribute is a 1-variable order-2 jet in t; ``.val`` gives the value.
    """

    t: np.ndarray
    phi1: Jet
    phi2: Jet
    phi3: Jet
    alpha: Jet
    phi: Jet
    alpha1: Jet
    alpha2: Jet
    alpha3: Jet

    def value(self, name: str):
        return getattr(self, name).val


def derived_scalars(gen: GeneratorSet, t) -> DerivedScalars:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise GeneratorError("t = g(u,u) must be finite and non-negative")
    tj = Jet(t, np.ones((1,) + t.shape), order=2, nvars=1)
    a1, a2, a3, b1, b2, b3 = (c.jet(tj) for c in gen.curves().values())
    phi1, phi2, phi3 = a1 + tj * b1, a2 + tj * b2, a3 + tj * b3
    alpha = a1 * (a1 + a3) - a2 * a2
    phi = phi1 * (phi1 + phi3) - phi2 * phi2
    return DerivedScalars(t, phi1, phi2, phi3, alpha, phi, a1, a2, a3)


def chebyshev_samples(t_max: float = DEFAULT_T_MAX, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Chebyshev-Lobatto nodes on [0, t_max]; t = 0 is always the first node."""
    if n < 1:
        raise GeneratorError("need at least one sample")
    if n == 1:
        return np.zeros(1)
    j = np.arange(n)
    return 0.5 * t_max * (1.0 - np.cos(np.pi * j / (n - 1)))


@dataclass
class Classification:
    t: np.ndarray
    nondegenerate_at: np.ndarray
    riemannian_at: np.ndarray
    scalars: dict
    nondegenerate: bool
    riemannian: bool
    witnesses: dict
    sampled: bool = True

    def rows(self) -> Iterable[dict]:
        for i, t in enumerate(self.t):
            yield {
                "t": float(t),
                **{k: float(v[i]) for k, v in self.scalars.items()},
                "nondegenerate": bool(self.nondegenerate_at[i]),
                "riemannian": bool(self.riemannian_at[i]),
            }


def classify(gen: GeneratorSet, t_samples=None) -> Classification:
    """Sampled nondegeneracy (alpha*phi != 0) and Riemannian test (alpha1, phi1, alpha, phi > 0).

    The verdict only covers the supplied samples; it is not a proof over all t >= 0.
    """
    if t_samples is None:
        t_samples = chebyshev_samples()
    t = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if t.size == 0:
        raise GeneratorError("classification needs a non-empty sample set")
    d = derived_scalars(gen, t)
    scalars = {
        "alpha1": d.alpha1.val,
        "phi1": d.phi1.val,
        "alpha": d.alpha.val,
        "phi": d.phi.val,
    }
    prod = d.alpha.val * d.phi.val
    nondeg = np.abs(prod) > NONDEGENERACY_EPS
    riem = (scalars["alpha1"] > 0) & (scalars["phi1"] > 0) & (scalars["alpha"] > 0) & (scalars["phi"] > 0)
    witnesses = {}
    if not nondeg.all():
        i = int(np.argmin(nondeg))
        witnesses["degenerate"] = {"t": float(t[i]), "alpha": float(d.alpha.val[i]),
                                   "phi": float(d.phi.val[i])}
    if not riem.all():
        i = int(np.argmin(riem))
        failing = [k for k, v in scalars.items() if not v[i] > 0]
        witnesses["not_riemannian"] = {"t": float(t[i]), "failing": failing,
                                       **{k: float(v[i]) for k, v in scalars.items()}}
    return Classification(t, nondeg, riem, scalars, bool(nondeg.all()), bool(riem.all()), witnesses)
