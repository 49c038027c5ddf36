"""Interval variational inequalities and their links to efficiency.

Operators are fields ``x -> T(x)`` of linear interval maps in the min/max form
``v -> [min(<p, v>, <q, v>), max(<p, v>, <q, v>)]``.  The Minty side applies
``T(y)`` to ``-log_y(x0)``, the velocity at ``y`` of the geodesic from ``x0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import interval as iv
from .interval import Interval
from .manifolds import Manifold
from .report import FAIL, INCONCLUSIVE, PASS, Certificate, CheckReport
from .riop import A0, RIOProblem, candidate_points, classify, is_efficient_sampled
from .rivf import RIVF, dir_deriv, evaluate

_MIX_SEED = 20240611


@dataclass
class LinearIntervalMap:
    manifold: Manifold
    base: object
    p: object
    q: object

    def __call__(self, v) -> Interval:
        M = self.manifold
        return Interval.hull(M.inner(self.base, self.p, v), M.inner(self.base, self.q, v))

    @property
    def lipschitz(self) -> float:
        return max(self.manifold.norm(self.base, self.p), self.manifold.norm(self.base, self.q))


@dataclass
class IntervalField:
    manifold: Manifold
    at: Callable
    source: str = "closed_form"
    name: str = ""
    domain: Callable = lambda x: True
    sampler: Callable | None = None
    # ties in the nprec / prec tests; closed forms only need rounding slack
    tol: float = 1e-12

    def __call__(self, x) -> LinearIntervalMap:
        T = self.at(x)
        if T.base is not x and not np.array_equal(np.asarray(T.base), np.asarray(x)):
            raise ValueError("field returned a map based at a different point")
        return T

    def sample(self, rng, n):
        if self.sampler is None:
            raise ValueError(f"{self.name or 'field'} has no sampler")
        return self.sampler(rng, n)


def closed_form_field(M: Manifold, pq: Callable, name: str = "", domain=None, sampler=None) -> IntervalField:
    """Field from ``x -> (p, q)``."""
    return IntervalField(M, lambda x: LinearIntervalMap(M, x, *pq(x)), "closed_form", name,
                         domain or (lambda x: True), sampler)


def reconstruct_pq(f: RIVF, x, mix_seed: int = _MIX_SEED):
    """Recover ``(p, q)`` with ``f'(x, v) = [min(<p,v>, <q,v>), max(...)]`` from derivatives.

    On an orthonormal basis ``e_i`` the midpoints give ``m = (p+q)/2`` and the
    half-widths give ``|<d, e_i>|`` for ``d = (p-q)/2``.  Relative signs of
    the ``d`` coordinates come from one extra derivative along ``e_k + e_j``.
    The basis is a fixed generic rotation so that no coordinate of ``d``
    vanishes by accident of alignment.
    """
    M = f.manifold
    k = len(M._ambient_basis(x))
    mix, _ = np.linalg.qr(np.random.default_rng(mix_seed).standard_normal((k, k)))
    basis = M.tangent_basis(x, mix=mix)
    F = [dir_deriv(f, x, e).value for e in basis]
    mids = [D.mid for D in F]
    halves = [0.5 * D.width for D in F]
    kk = int(np.argmax(halves))
    signs = [1.0] * len(basis)
    for j, hj in enumerate(halves):
        if j == kk or hj <= 1e-9:
            continue
        w = 0.5 * dir_deriv(f, x, basis[kk] + basis[j]).value.width
        if abs(w - abs(halves[kk] - hj)) < abs(w - (halves[kk] + hj)):
            signs[j] = -1.0
    m = sum(mi * e for mi, e in zip(mids, basis))
    d = sum(s * h * e for s, h, e in zip(signs, halves, basis))
    return m + d, m - d


def gateaux_field(f: RIVF) -> IntervalField:
    """``f_G`` as a field: the closed form when the catalog has one, else reconstructed."""
    M = f.manifold
    if f.gateaux_form is not None:
        fld = closed_form_field(M, f.gateaux_form, f"{f.name}:f_G", f.domain, f.sampler)
        fld.source = "gateaux_of(f)"
        return fld
    return IntervalField(M, lambda x: LinearIntervalMap(M, x, *reconstruct_pq(f, x)), "gateaux_of(f)",
                         f"{f.name}:f_G", f.domain, f.sampler, tol=M.tol.eq_tol)


def apply(T: IntervalField, x, v) -> Interval:
    return T(x)(v)


def _points(T, x0, rng, n, ys):
    if ys is not None:
        return ys
    M = T.manifold
    pts = list(T.sample(rng, n // 2))
    while len(pts) < n:
        y = M.exp(x0, M.sample_tangent(rng, x0, 0.5))
        if T.domain(y):
            pts.append(y)
    return pts


def stampacchia_residual(T: IntervalField, x0, rng=None, n: int = 200, ys=None) -> Certificate:
    """``T(x0)(log_x0 y) not< 0`` for every sampled ``y``."""
    M = T.manifold
    Tx0 = T(x0)
    witnesses, n_a0 = [], 0
    pts = _points(T, x0, rng, n, ys)
    for y in pts:
        val = Tx0(M.log(x0, y))
        if iv.prec(val, iv.ZERO, T.tol):
            a0 = classify(val, T.tol) == A0
            n_a0 += a0
            witnesses.append({"x0": M.to_record(x0), "y": M.to_record(y), "value": val, "a0_form": a0,
                              "residual": -val.hi, "replay": {"kind": "stampacchia", "field": T.name}})
    return Certificate("stampacchia", FAIL if witnesses else PASS, samples=len(pts), tolerance=T.tol,
                       witnesses=witnesses[:10], details={"violations": len(witnesses), "a0_violations": n_a0},
                       kind="Stampacchia")


def minty_residual(T: IntervalField, x0, rng=None, n: int = 200, ys=None) -> Certificate:
    """``T(y)(-log_y x0) not< 0`` for every sampled ``y``."""
    M = T.manifold
    witnesses = []
    pts = _points(T, x0, rng, n, ys)
    for y in pts:
        val = T(y)(-M.log(y, x0))
        if iv.prec(val, iv.ZERO, T.tol):
            witnesses.append({"x0": M.to_record(x0), "y": M.to_record(y), "value": val, "residual": -val.hi,
                              "replay": {"kind": "minty", "field": T.name}})
    return Certificate("minty", FAIL if witnesses else PASS, samples=len(pts), tolerance=T.tol,
                       witnesses=witnesses[:10], details={"violations": len(witnesses)}, kind="Minty")


def _pairs(sample, rng, n_pairs):
    pts = sample(rng, 2 * n_pairs)
    return list(zip(pts[0::2], pts[1::2]))


def pseudomonotone_check(T: IntervalField, rng, n_pairs: int = 500, pairs=None) -> CheckReport:
    """``T(x)(log_x y) not< 0`` implies ``T(y)(-log_y x) not< 0`` on sampled pairs."""
    M = T.manifold
    pairs = _pairs(T.sample, rng, n_pairs) if pairs is None else pairs
    witnesses, n_ant = [], 0
    for x, y in pairs:
        if M.dist(x, y) == 0.0:
            continue
        if iv.nprec(T(x)(M.log(x, y)), iv.ZERO, T.tol):
            n_ant += 1
            cons = T(y)(-M.log(y, x))
            if iv.prec(cons, iv.ZERO, T.tol):
                witnesses.append({"x": M.to_record(x), "y": M.to_record(y), "consequent": cons, "residual": -cons.hi})
    return CheckReport("pseudomonotone", FAIL if witnesses else PASS, samples=len(pairs), tolerance=T.tol,
                       witnesses=witnesses[:10], details={"antecedent_held": n_ant, "violations": len(witnesses)})


def pseudoconvex_check(f: RIVF, rng, n_pairs: int = 500, T: IntervalField | None = None, pairs=None) -> CheckReport:
    """``f_G(x)(log_x y) not< 0`` implies ``f(y) not< f(x)`` on sampled pairs."""
    M = f.manifold
    T = gateaux_field(f) if T is None else T
    pairs = _pairs(f.sample, rng, n_pairs) if pairs is None else pairs
    witnesses, n_ant = [], 0
    for x, y in pairs:
        if iv.nprec(T(x)(M.log(x, y)), iv.ZERO, T.tol):
            n_ant += 1
            fx, fy = evaluate(f, x), evaluate(f, y)
            if iv.prec(fy, fx):
                witnesses.append({"x": M.to_record(x), "y": M.to_record(y), "f(x)": fx, "f(y)": fy,
                                  "residual": max(fx.lo - fy.lo, fx.hi - fy.hi)})
    return CheckReport("pseudoconvex", FAIL if witnesses else PASS, samples=len(pairs), tolerance=T.tol,
                       witnesses=witnesses[:10], details={"antecedent_held": n_ant, "violations": len(witnesses)})


def bridge_prop43(T: IntervalField, rng, n_trials: int = 20, n: int = 100, x0s=None,
                  gate_pairs: int = 300) -> CheckReport:
    """Stampacchia solutions of a pseudomonotone field also solve the Minty problem."""
    gate = pseudomonotone_check(T, rng, gate_pairs)
    if not gate.passed:
        return CheckReport("bridge_prop43", INCONCLUSIVE, details={"gate": f"pseudomonotone check {gate.verdict}"})
    x0s = list(T.sample(rng, n_trials)) if x0s is None else list(x0s)
    witnesses, n_stamp = [], 0
    for x0 in x0s:
        ys = _points(T, x0, rng, n, None)
        if stampacchia_residual(T, x0, ys=ys).passed:
            n_stamp += 1
            m = minty_residual(T, x0, ys=ys)
            if m.failed:
                witnesses.append(dict(m.witnesses[0], rule="stampacchia pass, minty fail"))
    return CheckReport("bridge_prop43", FAIL if witnesses else PASS, samples=len(x0s), witnesses=witnesses,
                       details={"stampacchia_solutions": n_stamp, "counterexamples": len(witnesses)})


def geodesic_refinement(p: RIOProblem, x0, ys, ts=(0.5, 0.1, 0.01, 0.001)) -> list:
    """Points ``exp(x0, t log y)`` close to ``x0`` on each sampled geodesic.

    A dominating point near ``x0`` along a sampled direction is what refutes
    efficiency when the global samples miss it.
    """
    M = p.manifold
    out = []
    for y in ys:
        v = M.log(x0, y)
        for t in ts:
            z = M.exp(x0, t * v)
            if p.f.domain(z):
                out.append(z)
    return out


def bridge_thm43(p: RIOProblem, x0, rng, n: int = 200, T: IntervalField | None = None, ys=None) -> CheckReport:
    """An efficient ``x0`` whose ``f_G(x0)`` never takes the ``[a, 0]`` form solves Stampacchia."""
    M = p.manifold
    T = gateaux_field(p.f) if T is None else T
    ys = candidate_points(p, x0, rng, n) if ys is None else ys
    eff = is_efficient_sampled(p, x0, points=ys + geodesic_refinement(p, x0, ys))
    if not eff.passed:
        return CheckReport("bridge_thm43", INCONCLUSIVE, samples=len(ys), details={"gate": "x0 not efficient on samples"})
    Tx0 = T(x0)
    n_a0 = sum(classify(Tx0(M.log(x0, y)), M.tol.eq_tol) == A0 for y in ys)
    if n_a0:
        return CheckReport("bridge_thm43", INCONCLUSIVE, samples=len(ys),
                           details={"gate": "[a, 0] form of f_G(x0) occurs", "a0_samples": n_a0})
    st = stampacchia_residual(T, x0, ys=ys)
    return CheckReport("bridge_thm43", st.verdict, samples=len(ys), witnesses=st.witnesses,
                       details={"stampacchia": st.verdict})


def bridge_thm44(p: RIOProblem, x0, rng, n: int = 200, T: IntervalField | None = None, ys=None,
                 gate_pairs: int = 200, pseudoconvex: CheckReport | None = None) -> CheckReport:
    """Pseudoconvex ``f`` with ``x0`` solving Stampacchia for ``f_G``: ``x0`` is efficient.

    ``pseudoconvex`` lets a caller reuse one pseudoconvexity verdict across
    many ``x0``.
    """
    T = gateaux_field(p.f) if T is None else T
    pc = pseudoconvex_check(p.f, rng, gate_pairs, T) if pseudoconvex is None else pseudoconvex
    if not pc.passed:
        return CheckReport("bridge_thm44", INCONCLUSIVE, details={"gate": f"pseudoconvex check {pc.verdict}"})
    ys = candidate_points(p, x0, rng, n) if ys is None else ys
    st = stampacchia_residual(T, x0, ys=ys)
    if not st.passed:
        return CheckReport("bridge_thm44", INCONCLUSIVE, samples=len(ys), details={"gate": "x0 fails Stampacchia"})
    eff = is_efficient_sampled(p, x0, points=ys)
    return CheckReport("bridge_thm44", eff.verdict, samples=len(ys), witnesses=eff.witnesses,
                       details={"efficiency": eff.verdict})
