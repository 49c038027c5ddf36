import numpy as np
import pytest

from ivo import catalog as cat
from ivo import interval as iv
from ivo import riop, rivf, rivi
from ivo.interval import Interval
from ivo.manifolds import Euclidean


def test_linear_map_properties(rng):
    M = Euclidean(3)
    x = np.zeros(3)
    T = rivi.LinearIntervalMap(M, x, rng.standard_normal(3), rng.standard_normal(3))
    for _ in range(50):
        v = rng.standard_normal(3)
        lam = rng.uniform(-3, 3)
        assert iv.hausdorff(T(lam * v), iv.scale(lam, T(v))) <= 1e-12 * (1 + iv.norm(T(v)))
        h = 1e-3 * rng.standard_normal(3)
        assert iv.hausdorff(T(v + h), T(v)) <= T.lipschitz * np.linalg.norm(h) * (1 + 1e-12)
    assert T(np.zeros(3)) == Interval(0, 0)
    p = rng.standard_normal(3)
    S = rivi.LinearIntervalMap(M, x, p, p)
    v = rng.standard_normal(3)
    assert S(v).is_degenerate


def test_apply_example():
    T = cat.field("posreals_grad")
    assert rivi.apply(T, 1.0, 1.0) == Interval(0, 1)
    assert T(1.0).base == 1.0


def test_stampacchia(rng):
    E = cat.field("euclid_quad_grad")
    assert rivi.stampacchia_residual(E, np.zeros(2), rng).passed
    P = cat.field("posreals_grad")
    rep = rivi.stampacchia_residual(P, 1.0, rng)
    assert rep.failed and all(w["a0_form"] for w in rep.witnesses)
    assert rivi.stampacchia_residual(P, 2.0, rng).failed


def test_minty(rng):
    E = cat.field("euclid_quad_grad")
    assert rivi.minty_residual(E, np.zeros(2), rng).passed
    rep = rivi.minty_residual(E, np.array([1.0, 0.0]), ys=[np.zeros(2), np.array([0.5, 0.0])])
    assert rep.failed and len(rep.witnesses) == 1
    assert iv.hausdorff(rep.witnesses[0]["value"], Interval(-1, -0.5)) <= 1e-12
    Z = cat.field("zero_r2")
    assert rivi.minty_residual(Z, np.array([3.0, -1.0]), rng).passed


def test_pseudomonotone(rng):
    assert rivi.pseudomonotone_check(cat.field("euclid_quad_grad"), rng).passed
    assert rivi.pseudomonotone_check(cat.field("zero_r2"), rng).passed
    grid = [np.array([a]) for a in (-2.0, -1.0, 1.0, 2.0)]
    pairs = [(x, y) for x in grid for y in grid if x[0] != y[0]]
    rep = rivi.pseudomonotone_check(cat.field("sign_flip_r1"), None, pairs=pairs)
    assert rep.failed
    found = {(w["x"]["coords"][0], w["y"]["coords"][0]) for w in rep.witnesses}
    assert (-1.0, 1.0) in found


def test_pseudoconvex(rng):
    f = cat.posreals_x_plus_inv()
    grid = [2.0**k for k in range(-3, 4)]
    assert rivi.pseudoconvex_check(f, None, pairs=[(x, y) for x in grid for y in grid if x != y]).passed
    assert rivi.pseudoconvex_check(cat.euclid_quad(), rng).passed
    g = cat.flat_r2_frac()
    g.sampler = lambda r, n: [0.3 * r.standard_normal(2) for _ in range(n)]
    assert rivi.pseudoconvex_check(g, rng, 200).failed


def test_gateaux_reconstruction_matches_closed_form(rng):
    for key in ("spd_logdet2", "euclid_split", "posreals_x_plus_inv", "spd_logdet"):
        f = cat.rivf(key)
        closed = rivi.gateaux_field(f)
        f.gateaux_form = None
        rebuilt = rivi.gateaux_field(f)
        for x in f.sample(rng, 3):
            v = f.manifold.sample_tangent(rng, x, 1.0)
            a, b = rivi.apply(rebuilt, x, v), rivi.apply(closed, x, v)
            assert iv.hausdorff(a, b) <= 1e-6
            assert iv.hausdorff(a, rivf.dir_deriv(f, x, v).value) <= 1e-6


def test_bridges_on_examples(rng):
    E = cat.field("euclid_quad_grad")
    rep = rivi.bridge_prop43(E, rng, x0s=[np.zeros(2)])
    assert rep.passed and rep.details["stampacchia_solutions"] == 1
    assert rivi.bridge_prop43(cat.field("sign_flip_r1"), rng, 3).verdict == "inconclusive"
    pe = cat.problem("euclid_quad")
    assert rivi.bridge_thm43(pe, np.zeros(2), rng).passed
    assert rivi.bridge_thm44(pe, np.zeros(2), rng).passed
    pp = cat.problem("posreals_x_plus_inv")
    assert rivi.bridge_thm43(pp, 1.0, rng).verdict == "inconclusive"
    assert rivi.bridge_thm44(pp, 2.0, rng).verdict == "inconclusive"


def test_bridge_thm43_zero_derivative_is_allowed(rng):
    M = Euclidean(1)
    f = rivf.RIVF(M, lambda x: (x[0] - 2) ** 2, lambda x: (x[0] - 2) ** 2 + 1,
                  sampler=lambda r, n: [2 + r.standard_normal(1) for _ in range(n)], claimed_convex=True,
                  gateaux_form=lambda x: (2 * (x - 2), 2 * (x - 2)))
    assert rivi.bridge_thm43(riop.RIOProblem(f), np.array([2.0]), rng).passed


@pytest.mark.parametrize("seed", range(5))
def test_randomized_bridges(seed):
    from ivo.rng import stream
    rng = stream(seed, "bridges")
    p, seg = cat.random_quadratic_problem(rng)
    T = rivi.gateaux_field(p.f)
    for x0 in seg[1:-1]:
        assert riop.is_efficient_sampled(p, x0, rng, 200).passed
        assert rivi.bridge_thm43(p, x0, rng, 50).verdict != "fail"
        assert rivi.bridge_thm44(p, x0, rng, 50, gate_pairs=50).verdict != "fail"
    assert rivi.bridge_prop43(T, rng, 5, 30, x0s=seg, gate_pairs=50).verdict != "fail"
