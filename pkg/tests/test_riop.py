import math

import numpy as np
import pytest

from ivo import catalog as cat
from ivo import riop
from ivo.interval import Interval


@pytest.fixture
def posreals():
    return cat.problem("posreals_x_plus_inv")


def test_settings_validation():
    with pytest.raises(ValueError):
        riop.SolverSettings(0.0, 1.0)
    with pytest.raises(ValueError):
        riop.SolverSettings(1.0, -1.0)


@pytest.mark.parametrize("lam, want", [((1e-9, 1.0), 1.0), ((1.0, 1.0), 1 / math.sqrt(2))])
def test_solve_scalarized(posreals, lam, want):
    for x_init in (0.1, 3.0, 10.0):
        res = riop.solve_scalarized(posreals, riop.SolverSettings(*lam), x_init)
        assert abs(res.point - want) <= 1e-4
        assert res.iters < 200
        assert res.grad_norm <= 1e-6


def test_solve_oracle_general_weights(posreals):
    # h = l1 x + l2 (x + 1/x) has h' = 0 at x = sqrt(l2 / (l1 + l2))
    for l1, l2 in ((0.3, 1.7), (2.0, 0.5)):
        res = riop.solve_scalarized(posreals, riop.SolverSettings(l1, l2), 1.0)
        assert abs(res.point - math.sqrt(l2 / (l1 + l2))) <= 1e-4


def test_solver_failures():
    p = cat.problem("posreals_neg_log")
    with pytest.raises(riop.SolverError):
        riop.solve_scalarized(p, riop.SolverSettings(max_iters=20), 0.5)
    q = cat.problem("euclid_quad")
    with pytest.raises(riop.MaxItersExceeded) as err:
        riop.solve_scalarized(q, riop.SolverSettings(max_iters=1, alpha0=1e-3), np.array([5.0, 5.0]))
    assert err.value.trace


def test_efficiency(posreals, rng):
    assert riop.is_efficient_sampled(posreals, 1.0, rng, 2000).passed
    rep = riop.is_efficient_sampled(posreals, 2.0, rng, 200)
    assert rep.failed
    rep = riop.is_efficient_sampled(posreals, 2.0, points=[1.0])
    assert rep.witnesses[0]["f(x)"] == Interval(1, 2)


def test_logdet_has_no_efficient_point(rng):
    p = cat.problem("spd_logdet_riop")
    for X in p.sample(rng, 20):
        rep = riop.is_efficient_sampled(p, X, rng, 100)
        assert rep.failed
        Y = p.manifold.point_from_coords(rep.witnesses[0]["x"]["coords"])
        assert np.linalg.det(Y) < np.linalg.det(X)


def test_prop41(posreals, rng):
    rep = riop.check_prop41(posreals, rng, 500, x_init=3.0)
    assert rep.passed
    assert rep.details["components"]["lower"]["status"] == "MaxItersExceeded"
    assert rep.details["prop41b"] == {"upper": "pass"}
    rep = riop.check_prop41(cat.problem("euclid_split"), rng, 500, x_init=np.array([2.0]))
    assert rep.passed and rep.details["prop41a"] == "inconclusive"


def test_certify_necessary_41(posreals, rng):
    rep = riop.certify_necessary_41(posreals, 1.0, rng)
    assert rep.passed and rep.details["branches"]["a0"] > 0
    rep = riop.certify_necessary_41(posreals, 2.0, rng)
    assert rep.failed
    # closed form at x0 = 2 toward x = 1: v = 2 ln(1/2), D = v [3/4, 1]
    rep = riop.certify_necessary_41(posreals, 2.0, points=[1.0])
    v = 2 * math.log(0.5)
    D = rep.witnesses[0]["deriv"]
    assert abs(D.lo - v) < 1e-6 and abs(D.hi - 0.75 * v) < 1e-6


def test_certify_necessary_41_cannot_refute_logdet(rng):
    p = cat.problem("spd_logdet_riop")
    X = p.sample(rng, 1)[0]
    rep = riop.certify_necessary_41(p, X, rng, 100)
    assert rep.passed
    assert riop.is_efficient_sampled(p, X, rng, 100).failed


def test_certify_sufficient_41(posreals, rng):
    assert riop.certify_sufficient_41(posreals, 1.0, rng).verdict == "inconclusive"
    assert riop.certify_sufficient_41(posreals, 2.0, rng).failed
    assert riop.certify_sufficient_41(cat.problem("euclid_quad"), np.zeros(2), rng).passed
    nonconvex = riop.RIOProblem(cat.spd_logdet2())
    gated = riop.certify_sufficient_41(nonconvex, np.eye(2), rng)
    assert gated.verdict == "inconclusive" and "gate" in gated.details


def test_certify_42(posreals, rng):
    assert riop.certify_42(posreals, 1.0, rng, variant="necessary").passed
    rep = riop.certify_42(posreals, 1.0, rng, variant="sufficient")
    assert rep.verdict == "inconclusive" and rep.details["excluded_endpoint_sole_blocker"]
    assert riop.certify_42(posreals, 2.0, rng, variant="necessary").failed
    with pytest.raises(ValueError):
        riop.certify_42(posreals, 1.0, rng, variant="other")


def test_replay_of_necessary_witness(posreals):
    assert riop.replay_necessary_witness(posreals, 2.0, 1.0)
    assert not riop.replay_necessary_witness(posreals, 1.0, 0.5)


@pytest.mark.parametrize("key", cat.PROBLEMS)
def test_consistency(key, rng):
    rep = riop.consistency_check(cat.problem(key), rng, n_points=4, n=100)
    assert rep.passed, rep.witnesses
