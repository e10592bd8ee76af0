from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnatlab.base_geometry import flat_chart, gauss_curvature, hyperbolic_chart, rotation_i, sphere_chart
from gnatlab.bundle_curvature import (
    bundle_christoffel,
    bundle_curvature,
    bundle_jacobi,
    covariant_derivative_lifted,
    totally_geodesic_residual,
)
from gnatlab.bundle_metric import BundlePoint, DegenerateMetricError, LiftedVector
from gnatlab.generators import GeneratorSet, cheeger_gromoll, sasaki

from conftest import custom_generators
from oracles import christoffel as fd_christoffel, induced_gram, riemann as fd_riemann

CHARTS = [(flat_chart(), [0.2, 0.7]), (sphere_chart(1.0), [1.0, 0.3]),
          (sphere_chart(2.0), [2.0, -0.5]), (hyperbolic_chart(), [0.1, 1.3])]
FIBRE = np.array([0.4, -0.25])


@pytest.mark.parametrize("chart,x", CHARTS[1:])
def test_christoffel_matches_finite_differences(gen, chart, x):
    z = np.concatenate([x, FIBRE])
    gam = bundle_christoffel(gen, chart, BundlePoint.at(chart, x, FIBRE)).val
    ref = fd_christoffel(lambda w: induced_gram(gen, chart, w), z)
    assert np.abs(gam - ref).max() <= 1e-5 * np.abs(ref).max()


@pytest.mark.parametrize("case", [(sphere_chart(1.0), [1.0, 0.3], custom_generators),
                                  (hyperbolic_chart(), [0.1, 1.3], cheeger_gromoll),
                                  (sphere_chart(2.0), [2.0, -0.5], sasaki)])
def test_riemann_matches_finite_differences(case):
    chart, x, make = case
    gen = make()
    z = np.concatenate([x, FIBRE])
    rm = bundle_curvature(gen, chart, BundlePoint.at(chart, x, FIBRE)).riemann
    ref = fd_riemann(lambda w: induced_gram(gen, chart, w), z)
    assert np.abs(rm - ref).max() <= 1e-5 * np.abs(ref).max()


@pytest.mark.parametrize("chart,x", CHARTS)
def test_curvature_symmetries_and_bianchi(gen, chart, x):
    pack = bundle_curvature(gen, chart, BundlePoint.at(chart, x, FIBRE))
    rm, low = pack.riemann, pack.riemann_lowered
    scale = max(1.0, np.abs(low).max())
    assert np.abs(rm + rm.transpose(0, 2, 1, 3)).max() < 1e-8 * scale
    assert np.abs(low + low.transpose(3, 1, 2, 0)).max() < 1e-8 * scale
    assert np.abs(low - low.transpose(2, 3, 0, 1)).max() < 1e-8 * scale
    assert np.abs(rm + rm.transpose(0, 2, 3, 1) + rm.transpose(0, 3, 1, 2)).max() < 1e-8 * scale


def test_sasaki_over_flat_base_is_flat():
    pack = bundle_curvature(sasaki(), flat_chart(), BundlePoint.at(flat_chart(), [0.3, 0.1], FIBRE))
    assert np.abs(pack.riemann).max() == 0.0


@given(st.floats(0.1, 6.0), st.sampled_from([1.0, 2.0]))
def test_sasaki_horizontal_sectional_curvature(t, radius):
    # K(X^h, Y^h) = K(X, Y) - 3/4 |R(X, Y)u|^2 for orthonormal X, Y; with X along u this is k - 3/4 k^2 t
    chart = sphere_chart(radius)
    x = np.array([1.2, 0.4])
    p = BundlePoint.with_norm(chart, x, [0.6, 1.0], t)
    iu = rotation_i(chart, x, p.u)
    pack = bundle_curvature(sasaki(), chart, p)
    X, Y = LiftedVector.horizontal(p.u), LiftedVector.horizontal(iu)
    JY = pack.jacobi(X, "lift").matrix @ Y.components
    k = 1.0 / radius**2
    sec = (JY @ pack.jacobi(X, "lift").gram @ Y.components) / t**2
    assert sec == pytest.approx(k - 0.75 * k * k * t, abs=1e-10)


@pytest.mark.parametrize("chart,x", CHARTS)
def test_jacobi_self_adjoint_scaling_and_kernel(gen, chart, x):
    p = BundlePoint.at(chart, x, FIBRE)
    pack = bundle_curvature(gen, chart, p)
    rng = np.random.default_rng(11)
    for _ in range(4):
        X = LiftedVector.from_components(rng.normal(size=4))
        jm = bundle_jacobi(gen, chart, p, X, pack=pack)
        assert jm.self_adjoint_residual() < 1e-8
        assert np.abs(jm.matrix @ X.components).max() < 1e-10 * max(1.0, np.abs(jm.matrix).max())
        J2 = pack.jacobi(2.0 * X, "lift").matrix
        assert np.abs(J2 - 4.0 * jm.matrix).max() < 1e-10 * max(1.0, np.abs(jm.matrix).max())
        ji = pack.jacobi(X, "induced")
        assert ji.self_adjoint_residual() < 1e-8
        # the same operator in both frames
        L, P = pack.frame.induced_to_lift, pack.frame.lift_to_induced
        assert np.allclose(L @ ji.matrix @ P, jm.matrix, atol=1e-10 * max(1.0, np.abs(jm.matrix).max()))


@pytest.mark.parametrize("chart,x", CHARTS)
def test_zero_section_is_totally_geodesic(gen, chart, x):
    X, Y = np.array([1.0, 0.2]), np.array([-0.3, 0.9])
    pack = bundle_curvature(gen, chart, BundlePoint.at(chart, x, np.zeros(2)))
    for A in (X, Y):
        for B in (X, Y):
            assert totally_geodesic_residual(gen, chart, x, A, B, pack=pack) < 1e-8


def test_covariant_derivative_kinds():
    chart, x = CHARTS[1]
    with pytest.raises(ValueError):
        covariant_derivative_lifted(sasaki(), chart, x, [1, 0], [0, 1], "hx")
    # Sasaki: nabla_{X^v} Y^v = 0 on the zero section
    v = covariant_derivative_lifted(sasaki(), chart, x, [1.0, 0.5], [0.2, 1.0], "vv")
    assert np.abs(v.components).max() < 1e-12


def test_sphere_curvature_drives_bundle_curvature():
    chart, x = CHARTS[2]
    assert gauss_curvature(chart, x) == pytest.approx(0.25)
    p = BundlePoint.at(chart, x, FIBRE)
    assert np.abs(bundle_curvature(sasaki(), chart, p).riemann).max() > 0.01


def test_degenerate_metric_rejected():
    gen = GeneratorSet.from_json({"alpha1": 1, "alpha2": 0, "alpha3": -1, "beta1": 0, "beta2": 0, "beta3": 0})
    chart, x = CHARTS[1]
    with pytest.raises(DegenerateMetricError):
        bundle_curvature(gen, chart, BundlePoint.at(chart, x, FIBRE))
