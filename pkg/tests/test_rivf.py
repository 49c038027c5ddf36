import math

import numpy as np
import pytest
from scipy.optimize import brentq

from ivo import catalog as cat
from ivo import interval as iv
from ivo import rivf
from ivo.interval import Interval
from ivo.manifolds import Euclidean, PositiveReals
from ivo.rivf import RIVF, DerivativeMismatch, DomainError, MalformedRIVF, NonConvergence


def test_evaluate_examples():
    assert cat.posreals_x_plus_inv()(2.0) == Interval(2.0, 2.5)
    v = cat.spd_logdet()(math.e * np.eye(2))
    assert v.lo == 0 and abs(v.hi - 2) < 1e-12
    assert cat.flat_r2_frac()(np.zeros(2)) == Interval(0, 0)


def test_evaluate_rejects_domain_and_malformed():
    with pytest.raises(DomainError):
        cat.spd_logdet()(np.eye(2))
    M = Euclidean(1)
    bad = RIVF(M, lambda x: (x[0] - 1) ** 2, lambda x: (x[0] + 1) ** 2)
    with pytest.raises(MalformedRIVF):
        bad(np.array([-2.0]))


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("v", [-2.0, -1.0, 1.0, 2.0])
def test_dir_deriv_posreals_closed_form(x, v):
    D = rivf.dir_deriv(cat.posreals_x_plus_inv(), x, v, cross_check=False).value
    want = iv.scale(v, Interval(1 - 1 / x**2, 1))
    assert iv.hausdorff(D, want) <= 1e-6


def test_dir_deriv_named_values():
    f = cat.posreals_x_plus_inv()
    assert iv.hausdorff(rivf.dir_deriv(f, 2.0, 1.0).value, Interval(0.75, 1)) <= 1e-6
    assert iv.hausdorff(rivf.dir_deriv(f, 1.0, -1.0).value, Interval(-1, 0)) <= 1e-6
    g = cat.flat_r2_frac()
    assert iv.hausdorff(rivf.dir_deriv(g, np.zeros(2), np.array([1.0, 1.0])).value, Interval(1, 2)) <= 1e-6
    assert rivf.dir_deriv(f, 2.0, 0.0).value == Interval(0, 0)


def test_dir_deriv_components_and_structure():
    res = rivf.dir_deriv(cat.posreals_x_plus_inv(), 2.0, -1.0)
    assert res.value == Interval.hull(res.component_lower, res.component_upper)
    assert res.steps_used >= 2 and res.closed_form_gap < 1e-6


def test_dir_deriv_errors():
    M = Euclidean(1)
    cusp = RIVF(M, lambda x: math.sqrt(abs(x[0])), lambda x: math.sqrt(abs(x[0])) + 1)
    with pytest.raises(NonConvergence):
        rivf.dir_deriv(cusp, np.zeros(1), np.ones(1))
    with pytest.raises(DomainError):
        rivf.dir_deriv(cat.posreals_neg_log(), 0.999, 1.0)
    lying = RIVF(M, lambda x: x[0], lambda x: x[0], derivative=lambda x, v: (2 * v[0], 2 * v[0]))
    with pytest.raises(DerivativeMismatch):
        rivf.dir_deriv(lying, np.zeros(1), np.ones(1))


def test_continuity_probe_verdicts(rng):
    assert rivf.gh_continuity_probe(cat.posreals_x_plus_inv(), 1.0, rng).passed
    assert rivf.gh_continuity_probe(cat.spd_logdet2(), np.eye(2), rng).passed
    M = Euclidean(1)
    step = RIVF(M, lambda x: float(x[0] > 0), lambda x: float(x[0] > 0) + 1)
    rep = rivf.gh_continuity_probe(step, np.zeros(1), rng)
    assert rep.failed and rep.witnesses


def test_flat_frac_is_continuous_at_origin(rng):
    # sup over |h| = r of |g(h)| is about r / 2, attained near h = (t, t^2)
    g = cat.flat_r2_frac()
    for r in (1e-2, 1e-4):
        t = brentq(lambda t: math.hypot(t, t * t) - r, 0, 1)
        assert g(np.array([t, t * t])).hi <= 2 * r
    rep = rivf.gh_continuity_probe(g, np.zeros(2), rng)
    assert rep.passed


def test_gateaux_check(rng):
    rep = rivf.gateaux_check(cat.flat_r2_frac(), np.zeros(2), rng)
    assert rep.passed
    assert rivf.gateaux_check(cat.spd_logdet2(), np.eye(2), rng).passed
    M = Euclidean(2)
    norm1 = RIVF(M, lambda x: abs(x[0]) + abs(x[1]), lambda x: abs(x[0]) + abs(x[1]) + 1)
    assert rivf.gateaux_check(norm1, np.zeros(2), rng).failed


@pytest.mark.parametrize("key", ["spd_logdet", "posreals_x_plus_inv", "euclid_quad", "euclid_split", "posreals_neg_log"])
def test_convexity_pass(key, rng):
    assert rivf.convexity_check(cat.rivf(key), rng, 100).passed


def test_convexity_detects_concave_lower_endpoint(rng):
    assert rivf.convexity_check(cat.spd_logdet2(), rng, 100).failed


def test_convexity_dense_grid_oracle():
    # independent of the sampled check: both endpoints of posreals_x_plus_inv along x e^(s t)
    x, ts = 0.7, np.linspace(0, 1, 201)
    for s in (-3.0, -0.5, 0.5, 3.0):
        path = x * np.exp(s * ts)
        for comp in (path, path + 1 / path):
            assert np.all(np.diff(comp, 2) >= -1e-12)


def test_sublevel_posreals_matches_root_finding_oracle(rng):
    f = cat.posreals_x_plus_inv()
    lo_root = brentq(lambda x: x + 1 / x - 3.5, 1e-3, 1.0)
    A = Interval(3.0, 3.5)
    rep = rivf.sublevel_convexity_check(f, A, rng, 400)
    assert rep.passed and not rep.details["vacuous"]
    for x in np.linspace(lo_root, 3.0, 50):
        assert iv.preceq(f(float(x)), A, 1e-12)
    assert not iv.preceq(f(lo_root * 0.99), A)
    assert not iv.preceq(f(3.01), A)


def test_sublevel_logdet(rng):
    assert rivf.sublevel_convexity_check(cat.spd_logdet(), Interval(0, 5), rng, 100).passed


def test_diffquot_monotone_and_gate():
    f = cat.posreals_x_plus_inv()
    rep = rivf.diffquot_monotone_check(f, 2.0, 1.0, (1, 0.5, 0.25, 0.1))
    assert rep.passed
    # direct evaluation oracle of phi(t) on the same grid
    phis = [((2 * math.exp(t / 2) - 2) / t, (2 * math.exp(t / 2) + math.exp(-t / 2) / 2 - 2.5) / t) for t in (0.1, 0.25, 0.5, 1)]
    got = rep.details["phi"]
    for (a, b), I in zip(phis, got):
        assert abs(I.lo - min(a, b)) < 1e-12 and abs(I.hi - max(a, b)) < 1e-12
    gate = rivf.diffquot_monotone_check(cat.flat_r2_frac(), np.zeros(2), np.ones(2))
    assert gate.verdict == "inconclusive"


def test_thm33_inequality(rng):
    for key in ("posreals_x_plus_inv", "spd_logdet"):
        rep = rivf.thm33_inequality_check(cat.rivf(key), rng, 200)
        assert rep.passed and rep.details["max_excess"] <= 1e-8


def test_thm33_logdet_equality_case(rng):
    f = cat.spd_logdet()
    M = f.manifold
    X, Y = f.sample(rng, 2)
    if np.linalg.det(Y) < np.linalg.det(X):
        X, Y = Y, X
    D = rivf.dir_deriv(f, X, M.log(X, Y)).value
    want = Interval(0, math.log(np.linalg.det(Y @ np.linalg.inv(X))))
    assert iv.hausdorff(D, want) <= 1e-6
    assert iv.hausdorff(D, iv.gh_diff(f(Y), f(X))) <= 1e-6


def test_existence_for_convex(rng):
    assert rivf.existence_check(cat.posreals_x_plus_inv(), rng, 30).passed


def test_shifted_keeps_derivative():
    f = cat.posreals_x_plus_inv().shifted(3.0)
    assert f(1.0) == Interval(4.0, 5.0)
    assert iv.hausdorff(rivf.dir_deriv(f, 2.0, 1.0).value, Interval(0.75, 1)) <= 1e-6
