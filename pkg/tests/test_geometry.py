import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagembed.geometry import distance_gradient, hyperbolic_distance, pairwise_distances, project, rsgd_update


def ball_points(rng, n, d, max_norm=0.95):
    x = rng.normal(size=(n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * (max_norm * rng.random((n, 1)) ** (1 / d))


def mp_distance(u, v):
    mpmath.mp.dps = 50
    u = [mpmath.mpf(float(a)) for a in u]
    v = [mpmath.mpf(float(a)) for a in v]
    s = sum((a - b) ** 2 for a, b in zip(u, v))
    nu = sum(a * a for a in u)
    nv = sum(b * b for b in v)
    return mpmath.acosh(1 + 2 * s / ((1 - nu) * (1 - nv)))


class TestDistance:
    def test_identity(self):
        assert hyperbolic_distance([0.3, -0.2], [0.3, -0.2]) == 0.0

    def test_origin_to_half(self):
        assert abs(hyperbolic_distance([0, 0], [0.5, 0]) - math.log(3)) < 1e-9

    def test_antipodal(self):
        d = hyperbolic_distance([0.9, 0], [-0.9, 0])
        assert d == pytest.approx(math.acosh(1 + 2 * 3.24 / 0.0361), abs=1e-12)
        assert d == pytest.approx(5.8885, abs=5e-4)  # rounded literal; exact value 5.888878...
        assert abs(d - float(mp_distance([0.9, 0], [-0.9, 0]))) < 1e-12

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            hyperbolic_distance([1.0, 0.0], [0.0, 0.0])

    def test_tiny_separation_is_accurate(self):
        u = np.array([0.1, 0.2])
        v = u + 1e-9
        assert hyperbolic_distance(u, v) == pytest.approx(float(mp_distance(u, v)), rel=1e-6)

    def test_pairwise_matches_scalar(self):
        x = ball_points(np.random.default_rng(0), 6, 3)
        m = pairwise_distances(x, "hyperbolic")
        for i in range(6):
            for j in range(6):
                assert m[i, j] == pytest.approx(hyperbolic_distance(x[i], x[j]), abs=1e-9)
        e = pairwise_distances(x, "euclidean")
        assert e[1, 2] == pytest.approx(np.linalg.norm(x[1] - x[2]))

    @settings(max_examples=200)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 10))
    def test_metric_properties(self, seed, d):
        rng = np.random.default_rng(seed)
        u, v, w = ball_points(rng, 3, d)
        duv = hyperbolic_distance(u, v)
        assert duv == hyperbolic_distance(v, u)
        assert duv <= hyperbolic_distance(u, w) + hyperbolic_distance(w, v) + 1e-9
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        assert abs(hyperbolic_distance(q @ u, q @ v) - duv) < 1e-9


def fd_grad(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


class TestGradient:
    def test_mirror_symmetry(self):
        gu, gv = distance_gradient([0.4, 0.0], [-0.4, 0.0])
        assert gu == pytest.approx(-gv)
        assert gu[1] == 0.0 and gu[0] > 0

    @pytest.mark.parametrize("seed", range(20))
    def test_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        u, v = ball_points(rng, 2, 5, max_norm=0.9)
        gu, gv = distance_gradient(u, v)
        assert np.abs(gu - fd_grad(lambda x: hyperbolic_distance(x, v), u)).max() < 1e-5
        assert np.abs(gv - fd_grad(lambda x: hyperbolic_distance(u, x), v)).max() < 1e-5

    def test_near_origin(self):
        u = np.array([1e-4, -2e-4, 0.0])
        v = np.array([0.3, 0.1, -0.2])
        gu, _ = distance_gradient(u, v)
        assert np.abs(gu - fd_grad(lambda x: hyperbolic_distance(x, v), u)).max() < 1e-5
        # at the origin the metric factor is 2, so |grad| ~ 2 and points away from v
        assert np.dot(gu, v) < 0

    def test_coincident(self):
        with pytest.raises(ValueError):
            distance_gradient([0.1, 0.1], [0.1, 0.1])


class TestRSGD:
    def test_zero_gradient(self):
        x = np.array([0.3, -0.4])
        assert np.array_equal(rsgd_update(x, np.zeros(2), 0.1), x)

    def test_origin_scaling(self):
        g = np.array([0.8, -0.4])
        assert rsgd_update(np.zeros(2), g, 0.5) == pytest.approx(-0.5 * g / 4, abs=1e-15)

    def test_projection(self):
        x = rsgd_update(np.array([0.5, 0.0]), np.array([-1e6, 0.0]), 1.0, eps_ball=1e-5)
        assert np.linalg.norm(x) == pytest.approx(1 - 1e-5, abs=1e-15)
        assert np.linalg.norm(x) <= 1 - 1e-5

    @given(st.integers(0, 2**32 - 1))
    def test_project_bound(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=4) * 10
        eps = 10 ** rng.uniform(-12, -2)
        assert np.linalg.norm(project(x, eps)) <= 1 - eps
