import math

import numpy as np
import pytest

from okselect.kernels import (
    KernelSpec,
    feature_distance,
    feature_distance_column,
    gaussian,
    kernel_column,
    kernel_cross,
    kernel_eval,
    kernel_gram,
    polynomial,
    self_eval,
)


def test_gaussian_identity_is_one():
    x = np.array([0.3, -0.7])
    assert kernel_eval(gaussian(1.0), x, x) == 1.0
    assert self_eval(gaussian(1.0), x) == 1.0


def test_gaussian_closed_form():
    val = kernel_eval(gaussian(1.0), np.array([1.0, 0.0]), np.array([0.0, 0.0]))
    assert val == pytest.approx(math.exp(-0.5), abs=1e-12)


def test_polynomial_orthogonal_vectors():
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    assert kernel_eval(polynomial(2), e1, e2) == 0.0
    assert kernel_eval(polynomial(2), e1, e1) == 1.0


def test_bad_spec_rejected():
    with pytest.raises(ValueError):
        KernelSpec("triangle", 1.0)
    with pytest.raises(ValueError):
        gaussian(0.0)


def test_feature_distance_identity_and_formula():
    spec = gaussian(1.0)
    x = np.array([1.0, 0.0])
    z = np.array([0.0, 0.0])
    assert feature_distance(spec, x, x) == 0.0
    expect = math.sqrt(2.0 - 2.0 * math.exp(-0.5))
    assert feature_distance(spec, x, z) == pytest.approx(expect, abs=1e-12)


def test_feature_distance_far_limit():
    spec = gaussian(1.0)
    d = feature_distance(spec, np.array([1e4, 0.0]), np.array([-1e4, 0.0]))
    assert d == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_distance_squared_matches_expansion():
    rng = np.random.default_rng(7)
    spec = gaussian(0.8)
    for _ in range(1000):
        x, z = rng.normal(size=3), rng.normal(size=3)
        lhs = feature_distance(spec, x, z) ** 2
        rhs = self_eval(spec, x) + self_eval(spec, z) - 2.0 * kernel_eval(spec, x, z)
        assert abs(lhs - rhs) <= 1e-12


def test_triangle_inequality():
    rng = np.random.default_rng(8)
    for spec in (gaussian(0.5), gaussian(4.0), polynomial(2)):
        for _ in range(300):
            x, z, w = (rng.normal(size=4) for _ in range(3))
            dxz = feature_distance(spec, x, z)
            assert dxz <= feature_distance(spec, x, w) + feature_distance(spec, w, z) + 1e-9


def test_gaussian_range():
    rng = np.random.default_rng(9)
    spec = gaussian(2.0)
    for _ in range(500):
        v = kernel_eval(spec, rng.normal(size=5), rng.normal(size=5))
        assert 0.0 < v <= 1.0


def test_batched_column_matches_scalar():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(20, 6))
    sq = np.einsum("ij,ij->i", X, X)
    x = rng.normal(size=6)
    for spec in (gaussian(1.3), polynomial(3)):
        col = kernel_column(spec, X, sq, x)
        for j in range(20):
            assert col[j] == pytest.approx(kernel_eval(spec, X[j], x), rel=1e-10, abs=1e-12)
        dcol = feature_distance_column(spec, X, sq, x)
        for j in range(20):
            assert dcol[j] == pytest.approx(feature_distance(spec, X[j], x), rel=1e-9, abs=1e-9)


def test_gram_and_cross_match_scalar():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(8, 4))
    Z = rng.normal(size=(5, 4))
    sqx = np.einsum("ij,ij->i", X, X)
    sqz = np.einsum("ij,ij->i", Z, Z)
    for spec in (gaussian(0.7), polynomial(2)):
        G = kernel_gram(spec, X, sqx)
        C = kernel_cross(spec, X, sqx, Z, sqz)
        for a in range(8):
            for b in range(8):
                assert G[a, b] == pytest.approx(kernel_eval(spec, X[a], X[b]), rel=1e-10, abs=1e-12)
            for b in range(5):
                assert C[a, b] == pytest.approx(kernel_eval(spec, X[a], Z[b]), rel=1e-10, abs=1e-12)
        assert np.allclose(G, G.T)
