import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from ivo.harness import arclength
from ivo.manifolds import SPD, Euclidean, Hyperbolic, ManifoldError, PositiveReals, from_record, minkowski

MODELS = [Euclidean(3), PositiveReals(), SPD(3), Hyperbolic(3)]


def _gap(a, b):
    return float(np.max(np.abs(np.ravel(a) - np.ravel(b))))


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_exp_log_round_trip(M, rng):
    for _ in range(200):
        x, y = M.sample_point(rng), M.sample_point(rng)
        assert _gap(M.exp(x, M.log(x, y)), y) <= 1e-9 * (1 + np.max(np.abs(y)))
        v = M.sample_tangent(rng, x, 2.0)
        assert _gap(M.log(x, M.exp(x, v)), v) <= 1e-9 * (1 + np.max(np.abs(v)))


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_tangent_basis_orthonormal(M, rng):
    x = M.sample_point(rng)
    B = M.tangent_basis(x)
    assert len(B) == M.dim
    G = np.array([[M.inner(x, a, b) for b in B] for a in B])
    assert np.allclose(G, np.eye(M.dim), atol=1e-10)


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_distance_symmetric_and_log_norm(M, rng):
    x, y = M.sample_point(rng), M.sample_point(rng)
    assert math.isclose(M.dist(x, y), M.dist(y, x), rel_tol=1e-9)
    assert math.isclose(M.dist(x, y), M.norm(x, M.log(x, y)), rel_tol=1e-9)


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_geodesic_endpoints_and_range(M, rng):
    x, y = M.sample_point(rng), M.sample_point(rng)
    assert _gap(M.geodesic(x, y, 0.0), x) == 0
    assert _gap(M.geodesic(x, y, 1.0), y) == 0
    with pytest.raises(ManifoldError):
        M.geodesic(x, y, 1.5)


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_geodesic_has_constant_speed_and_splits_distance(M, rng):
    x, y = M.sample_point(rng), M.sample_point(rng)
    d = M.dist(x, y)
    for t in (0.2, 0.5, 0.9):
        g = M.geodesic(x, y, t)
        assert math.isclose(M.dist(x, g), t * d, rel_tol=1e-7, abs_tol=1e-9)
        assert math.isclose(M.dist(g, y), (1 - t) * d, rel_tol=1e-7, abs_tol=1e-9)


def test_posreals_distance_against_simpson_arclength():
    M = PositiveReals()
    assert abs(M.dist(1.0, math.e**2) - 2.0) <= 1e-8
    assert abs(arclength(M, 1.0, math.e**2) - 2.0) <= 1e-8
    # independent oracle: the metric length of the straight parametrization x = 1 + s (e^2 - 1)
    s = np.linspace(0, 1, 4001)
    speed = (math.e**2 - 1) / (1 + s * (math.e**2 - 1))
    assert abs(simpson(speed, x=s) - 2.0) <= 1e-8


def test_hyperbolic_distance_matches_arccosh():
    M = Hyperbolic(2)
    rng = np.random.default_rng(0)
    for _ in range(100):
        x, y = M.sample_point(rng), M.sample_point(rng)
        assert math.isclose(M.dist(x, y), math.acosh(max(1.0, -minkowski(x, y))), rel_tol=1e-8, abs_tol=1e-7)


def test_hyperbolic_geodesic_solves_geodesic_equation():
    # on the hyperboloid geodesics satisfy gamma'' = |gamma'|^2 gamma
    M = Hyperbolic(3)
    rng = np.random.default_rng(1)
    x, y = M.sample_point(rng), M.sample_point(rng)
    h = 1e-3
    t = 0.4
    g = [M.geodesic(x, y, t + k * h) for k in (-2, -1, 0, 1, 2)]
    acc = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
    assert np.allclose(acc, M.dist(x, y) ** 2 * g[2], atol=1e-6)


def test_spd_known_values():
    M = SPD(2)
    assert np.allclose(M.exp(np.eye(2), np.diag([1.0, 0.0])), np.diag([math.e, 1.0]))
    assert np.allclose(M.geodesic(np.eye(2), 4 * np.eye(2), 0.5), 2 * np.eye(2))
    assert math.isclose(M.dist(np.eye(2), math.e * np.eye(2)), math.sqrt(2))


def test_spd_geodesic_determinant_identity(rng):
    M = SPD(3)
    for _ in range(100):
        P, Q = M.sample_point(rng), M.sample_point(rng)
        t = rng.uniform()
        G = M.geodesic(P, Q, t)
        want = np.linalg.det(P) ** (1 - t) * np.linalg.det(Q) ** t
        assert abs(np.linalg.det(G) - want) <= 1e-10 * want
        assert np.allclose(G, M.geodesic_closed_form(P, Q, t), rtol=1e-10, atol=1e-12)


def test_hyperboloid_drift_along_geodesics(rng):
    M = Hyperbolic(3)
    for _ in range(100):
        x, y = M.sample_point(rng), M.sample_point(rng)
        for t in np.linspace(0, 1, 7):
            g = M.geodesic(x, y, t)
            assert abs(minkowski(g, g) + 1) <= 1e-9


@pytest.mark.parametrize("M, bad", [
    (SPD(2), np.array([[1.0, 0.0], [0.0, -1.0]])),
    (SPD(2), np.array([[1.0, 0.5], [0.0, 1.0]])),
    (Hyperbolic(2), np.array([1.0, 1.0, 0.0])),
    (PositiveReals(), -1.0),
])
def test_validate_rejects_invalid_points(M, bad):
    assert M.validate(bad).failed
    with pytest.raises(ManifoldError):
        M.check_point(bad)


@pytest.mark.parametrize("M", MODELS, ids=lambda M: M.name)
def test_record_round_trip(M, rng):
    x = M.sample_point(rng)
    M2, y = from_record(M.to_record(x))
    assert type(M2) is type(M) and M2.params == M.params
    assert _gap(y, x) == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=1e-3, max_value=1e3))
def test_posreals_exp_closed_form(u, x):
    # u = v / x is the metric length of v
    M = PositiveReals()
    v = u * x
    assert math.isclose(M.exp(x, v), x * math.exp(v / x), rel_tol=1e-12)
    assert math.isclose(M.log(x, M.exp(x, v)), v, rel_tol=1e-9, abs_tol=1e-12)
