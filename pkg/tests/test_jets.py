from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnatlab import jets
from gnatlab.jets import Jet

from oracles import assert_rel_close, diff

coords = st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2).map(np.array)


def sample_fn(x):
    """Scalar test function built from every jet primitive."""
    a, b = x[0], x[1]
    return (a * b + 2.0).sqrt() * a.sin() + (b * 0.5).exp() / (a * a + 1.0) + (a.cos() + 3.0).log() - b ** 3


def sample_np(x):
    a, b = x
    return np.sqrt(a * b + 2.0) * np.sin(a) + np.exp(0.5 * b) / (a * a + 1.0) + np.log(np.cos(a) + 3.0) - b**3


@given(coords)
def test_value_matches_numpy(x):
    j = sample_fn(Jet.variables(x, 3))
    assert j.val == pytest.approx(sample_np(x), rel=1e-13, abs=1e-13)


@given(coords)
def test_first_and_second_derivatives_match_finite_differences(x):
    j = sample_fn(Jet.variables(x, 3))
    assert_rel_close(j.d1, diff(sample_np, x), 1e-7, "gradient")
    assert_rel_close(j.d2, diff(lambda y: sample_fn(Jet.variables(y, 1)).d1, x), 1e-7, "hessian")


@given(coords)
def test_third_derivatives_match_finite_differences(x):
    j = sample_fn(Jet.variables(x, 3))
    fd = diff(lambda y: sample_fn(Jet.variables(y, 2)).d2, x)
    assert_rel_close(j.d3, fd, 1e-6, "third")
    # derivative tensors are symmetric
    assert np.allclose(j.d2, j.d2.T)
    for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        assert np.allclose(j.d3, j.d3.transpose(perm))


def test_matrix_inverse_matches_finite_differences():
    def mat(x):
        a, b = x[0], x[1]
        one = a * 0.0 + 1.0
        return jets.stack([jets.stack([a * a + 2.0, a * b]), jets.stack([b.sin(), one * 3.0 + b])])

    def inv_np(y):
        return np.linalg.inv(mat(Jet.variables(y, 0)).val)

    x = np.array([0.4, -0.7])
    M = mat(Jet.variables(x, 3))
    Mi = jets.inv(M)
    assert np.allclose(jets.matmul(M, Mi).val, np.eye(2))
    prod = jets.matmul(M, Mi)
    for d in prod.arrays()[1:]:
        assert np.abs(d).max() < 1e-12
    assert_rel_close(Mi.d1, diff(inv_np, x), 1e-7, "inverse gradient")


def test_einsum_follows_product_rule():
    x = np.array([0.3, 1.1])
    X = Jet.variables(x, 2)
    v = jets.stack([X[0] * X[1], X[1].sin()])
    w = jets.stack([X[0].exp(), X[0] + X[1]])
    dot = jets.einsum("a,a->", v, w)
    ref = (X[0] * X[1]) * X[0].exp() + X[1].sin() * (X[0] + X[1])
    for a, b in zip(dot.arrays(), ref.arrays()):
        assert np.allclose(a, b)


def test_order_truncation_and_mixing():
    x = Jet.variables(np.array([1.0, 2.0]), 3)
    y = Jet.variables(np.array([1.0, 2.0]), 1)
    z = x * y
    assert z.order == 1
    assert z.d2 is None


def test_pow_negative_and_fractional():
    x = Jet.variables(np.array([1.7]), 3)[0]
    for p in (-2, 0.5, 2.5):
        j = x ** p
        assert j.d1[0] == pytest.approx(p * 1.7 ** (p - 1))
        assert j.d3[0, 0, 0] == pytest.approx(p * (p - 1) * (p - 2) * 1.7 ** (p - 3))


def test_invalid_order_rejected():
    with pytest.raises(ValueError):
        Jet(1.0, order=4, nvars=1)
