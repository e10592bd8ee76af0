from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnatlab.generators import (
    GeneratorError,
    GeneratorSet,
    RationalCurve,
    chebyshev_samples,
    cheeger_gromoll,
    classify,
    derived_scalars,
    preset,
    sasaki,
)

from conftest import custom_generators
from oracles import assert_rel_close, diff

coef = st.floats(-2.0, 2.0)


@given(st.lists(coef, min_size=1, max_size=4), st.floats(0.0, 5.0))
def test_rational_derivatives_match_finite_differences(num, t):
    curve = RationalCurve(tuple(num), (1.0, 0.5, 0.25))

    def f(s):
        return np.polyval(num[::-1], s[0]) / np.polyval([0.25, 0.5, 1.0], s[0])

    v, d1, d2 = curve.eval(t)
    assert v == pytest.approx(f([t]), abs=1e-13)
    assert d1 == pytest.approx(diff(f, [t])[0], abs=1e-8)
    assert d2 == pytest.approx(diff(lambda s: curve.eval(s[0])[1], [t])[0], abs=1e-7)


def test_cheeger_gromoll_values():
    v = cheeger_gromoll().values(2.0)
    assert v["alpha1"] == pytest.approx(0.2)
    assert v["beta1"] == pytest.approx(0.2)
    assert v["alpha3"] == pytest.approx(0.8)
    assert v["beta3"] == pytest.approx(-0.2)
    assert v["alpha2"] == v["beta2"] == 0.0


def test_derived_scalars_sasaki_and_cheeger_gromoll():
    d = derived_scalars(sasaki(), np.array([0.0, 3.0]))
    assert np.allclose(d.alpha.val, 1.0) and np.allclose(d.phi.val, 1.0)
    # Cheeger-Gromoll: phi1 = (1+t)/(1+2t), phi1 + phi3 = 1, phi2 = 0; alpha = 1/(1+2t)
    t = np.array([0.5, 4.0])
    d = derived_scalars(cheeger_gromoll(), t)
    assert np.allclose(d.phi1.val, (1 + t) / (1 + 2 * t))
    assert np.allclose((d.phi1 + d.phi3).val, 1.0)
    assert np.allclose(d.phi.val, (1 + t) / (1 + 2 * t))
    assert np.allclose(d.alpha.val, 1.0 / (1.0 + 2.0 * t))
    assert np.allclose(d.alpha.d1[0], -2.0 / (1.0 + 2.0 * t) ** 2)


def test_presets_are_riemannian():
    for gen in (sasaki(), cheeger_gromoll(), custom_generators()):
        c = classify(gen)
        assert c.nondegenerate and c.riemannian, gen.name
        assert len(c.t) == 256 and c.t[0] == 0.0 and c.t[-1] == pytest.approx(10.0)


def test_degenerate_witness():
    gen = GeneratorSet.from_json({"alpha1": 1, "alpha2": 0, "alpha3": -1, "beta1": 0, "beta2": 0, "beta3": 0})
    c = classify(gen)
    assert not c.nondegenerate
    assert not c.riemannian
    assert c.witnesses["degenerate"]["t"] == 0.0
    assert "alpha" in c.witnesses["not_riemannian"]["failing"]


def test_json_round_trip():
    gen = custom_generators()
    again = GeneratorSet.from_json(json.loads(json.dumps(gen.to_json())))
    assert again == gen
    assert preset("cheeger_gromoll") == cheeger_gromoll()
    assert preset({"preset": "sasaki"}) == sasaki()


@pytest.mark.parametrize("bad", [
    {"alpha1": 1},
    {"alpha1": {"kind": "spline"}, "alpha2": 0, "alpha3": 0, "beta1": 0, "beta2": 0, "beta3": 0},
    {"alpha1": {"kind": "rational", "num": "x"}, "alpha2": 0, "alpha3": 0, "beta1": 0, "beta2": 0, "beta3": 0},
    {"alpha1": 1, "alpha2": 0, "alpha3": 0, "beta1": 0, "beta2": 0, "beta3": 0, "gamma": 1},
    "nonexistent",
])
def test_malformed_generators_rejected(bad):
    with pytest.raises(GeneratorError):
        preset(bad)


def test_pole_and_negative_t_rejected():
    curve = RationalCurve((1.0,), (-1.0, 1.0))
    with pytest.raises(GeneratorError):
        curve.eval(1.0)
    with pytest.raises(GeneratorError):
        derived_scalars(sasaki(), -0.5)
    with pytest.raises(GeneratorError):
        classify(sasaki(), [])


def test_chebyshev_samples():
    t = chebyshev_samples(10.0, 256)
    assert t[0] == 0.0 and np.all(np.diff(t) > 0)
