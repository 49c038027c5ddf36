"""Interval optimization on a manifold: efficient points and how to certify them.

``x0`` is efficient when no feasible ``x`` has ``f(x)`` strictly dominating
``f(x0)``.  Efficiency is only ever *sampled* here: candidates come half from
the problem's global sampler and half from a geodesic ball around ``x0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import interval as iv
from .interval import Interval
from .report import FAIL, INCONCLUSIVE, PASS, Certificate, CheckReport
from .rivf import RIVF, DomainError, NonConvergence, convexity_check, dir_deriv, evaluate, gateaux_check


@dataclass
class RIOProblem:
    f: RIVF
    sampler: Callable | None = None
    convex: bool | None = None
    reference: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.sampler is None:
            self.sampler = self.f.sampler
        if self.convex is None:
            self.convex = self.f.claimed_convex
        if not self.name:
            self.name = self.f.name

    @property
    def manifold(self):
        return self.f.manifold

    def sample(self, rng, n):
        pts = self.sampler(rng, n)
        for x in pts:
            if not self.f.domain(x):
                raise DomainError(f"{self.name}: sampler produced a point outside the domain")
        return pts


@dataclass(frozen=True)
class SolverSettings:
    lam1: float = 1.0
    lam2: float = 1.0
    max_iters: int = 200
    grad_tol: float = 1e-6
    armijo_c: float = 1e-4
    shrink: float = 0.5
    alpha0: float = 1.0
    max_shrinks: int = 30
    fd_step: float = 1e-6

    def __post_init__(self):
        if not (self.lam1 > 0 and self.lam2 > 0):
            raise ValueError(f"scalarization weights must be positive, got ({self.lam1}, {self.lam2})")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.max_iters < 1 or self.grad_tol <= 0 or self.fd_step <= 0:
            raise ValueError("max_iters, grad_tol and fd_step must be positive")


class SolverError(RuntimeError):
    def __init__(self, msg, point=None, trace=None):
        super().__init__(msg)
        self.point = point
        self.trace = trace or []


class MaxItersExceeded(SolverError):
    pass


class LineSearchFailure(SolverError):
    pass


@dataclass
class SolveResult:
    point: object
    h_value: float
    f_interval: Interval
    grad_norm: float
    iters: int
    trace: list

    def to_dict(self, manifold) -> dict:
        return {
            "point": manifold.to_record(self.point),
            "h_value": self.h_value,
            "f_interval": self.f_interval.to_list(),
            "grad_norm": self.grad_norm,
            "iters": self.iters,
        }


def _coord_norm(x) -> float:
    return float(np.linalg.norm(np.ravel(np.asarray(x, dtype=float))))


def riemannian_gradient(M, h, x, domain, fd_step: float):
    """Central-difference gradient of ``h`` along an orthonormal tangent basis at ``x``."""
    delta = fd_step * (1.0 + _coord_norm(x))
    h0 = None
    g = M.zero(x)
    for e in M.tangent_basis(x):
        xp, xm = M.exp(x, delta * e), M.exp(x, -delta * e)
        inp, inm = domain(xp), domain(xm)
        if inp and inm:
            c = (h(xp) - h(xm)) / (2.0 * delta)
        else:
            h0 = h(x) if h0 is None else h0
            if inp:
                c = (h(xp) - h0) / delta
            elif inm:
                c = (h0 - h(xm)) / delta
            else:
                raise DomainError("no finite-difference probe stays in the domain")
        g = g + c * e
    return g


def descend(M, h, x_init, domain, s: SolverSettings):
    """Riemannian gradient descent with Armijo backtracking; returns ``(x, h, |g|, iters, trace)``."""
    x = x_init
    hx = h(x)
    trace = []
    for it in range(s.max_iters + 1):
        g = riemannian_gradient(M, h, x, domain, s.fd_step)
        gn = M.norm(x, g)
        trace.append({"iter": it, "h": hx, "grad_norm": gn})
        if gn <= s.grad_tol:
            return x, hx, gn, it, trace
        if it == s.max_iters:
            break
        alpha = s.alpha0
        slack = 1e-15 * (1.0 + abs(hx))
        for _ in range(s.max_shrinks):
            y = M.exp(x, -alpha * g)
            if domain(y):
                hy = h(y)
                if hy <= hx - s.armijo_c * alpha * gn * gn + slack:
                    break
            alpha *= s.shrink
        else:
            raise LineSearchFailure(f"no acceptable step after {s.max_shrinks} shrinks", point=x, trace=trace)
        trace[-1]["alpha"] = alpha
        x, hx = y, hy
    raise MaxItersExceeded(f"gradient norm {gn:.3e} above {s.grad_tol:g} after {s.max_iters} iterations",
                           point=x, trace=trace)


def solve_scalarized(p: RIOProblem, s: SolverSettings, x_init) -> SolveResult:
    """Minimize ``lam1 * lower + lam2 * upper``; the result is an efficient-point candidate."""
    f = p.f
    if not f.domain(x_init):
        raise DomainError("initial point outside the domain")

    def h(x):
        fx = evaluate(f, x)
        return s.lam1 * fx.lo + s.lam2 * fx.hi

    x, hx, gn, iters, trace = descend(f.manifold, h, x_init, f.domain, s)
    return SolveResult(x, hx, evaluate(f, x), gn, iters, trace)


# -- sampling ------------------------------------------------------------------

def candidate_points(p: RIOProblem, x0, rng, n: int, local_radius: float = 0.5) -> list:
    """Half global samples, half from the geodesic ball of ``local_radius`` around ``x0``."""
    M = p.manifold
    n_glob = n // 2
    pts = list(p.sample(rng, n_glob)) if n_glob else []
    tries = 0
    while len(pts) < n and tries < 20 * n:
        tries += 1
        y = M.exp(x0, M.sample_tangent(rng, x0, local_radius))
        if p.f.domain(y):
            pts.append(y)
    return pts


def _witness(p, x0, x, **extra):
    M = p.manifold
    out = {"x0": M.to_record(x0), "x": M.to_record(x)}
    out.update(extra)
    return out


def is_efficient_sampled(p: RIOProblem, x0, rng=None, n: int = 1000, points=None) -> Certificate:
    """Fails iff some candidate ``x`` has ``f(x)`` strictly dominating ``f(x0)``."""
    f0 = evaluate(p.f, x0)
    pts = candidate_points(p, x0, rng, n) if points is None else points
    witnesses = []
    for x in pts:
        fx = evaluate(p.f, x)
        if iv.prec(fx, f0):
            witnesses.append(_witness(p, x0, x, **{"f(x)": fx, "f(x0)": f0,
                                                   "residual": max(f0.lo - fx.lo, f0.hi - fx.hi),
                                                   "replay": {"kind": "efficiency", "problem": p.name}}))
    return Certificate(
        "sampled_efficiency",
        FAIL if witnesses else PASS,
        samples=len(pts),
        witnesses=witnesses[:10],
        details={"dominators": len(witnesses)},
        kind="SampledEfficiency",
    )


# -- scalar component problems ---------------------------------------------------

def uniqueness_proxy(p: RIOProblem, h, x_star, rng, n: int = 1000, delta: float = 1e-3) -> dict:
    """Strict second differences along a basis plus a global sweep for near-ties.

    This is a proxy: it can refute uniqueness but never prove it.
    """
    M, tol = p.manifold, p.manifold.tol
    h_star = h(x_star)
    second = []
    for e in M.tangent_basis(x_star):
        xp, xm = M.exp(x_star, delta * e), M.exp(x_star, -delta * e)
        if not (p.f.domain(xp) and p.f.domain(xm)):
            second.append(float("nan"))
            continue
        second.append((h(xp) - 2.0 * h_star + h(xm)) / delta**2)
    curvature_ok = all(c > 0 for c in second)
    ties, better = 0, 0
    for y in p.sample(rng, n):
        hy = h(y)
        if hy < h_star - tol.h_tol:
            better += 1
        elif hy <= h_star + tol.h_tol and M.dist(y, x_star) > tol.x_tol:
            ties += 1
    return {"second_differences": second, "curvature_ok": curvature_ok, "ties": ties,
            "better": better, "unique": curvature_ok and ties == 0 and better == 0}


def check_prop41(p: RIOProblem, rng, n: int = 1000, settings: SolverSettings | None = None, x_init=None) -> CheckReport:
    """Minimize each component separately and assert efficiency where the hypotheses hold.

    (a) both component minimizers coincide within ``x_tol``;
    (b) a component minimizer passes the uniqueness proxy.
    """
    M = p.manifold
    s = settings or SolverSettings()
    x_init = p.sample(rng, 1)[0] if x_init is None else x_init
    comps = {}
    mins = {}
    for side in ("lower", "upper"):
        fn = p.f.lower if side == "lower" else p.f.upper
        try:
            x, hx, gn, iters, _ = descend(M, fn, x_init, p.f.domain, s)
        except SolverError as err:
            last = err.point
            comps[side] = {"status": type(err).__name__, "message": str(err),
                           "last_point": None if last is None else M.to_record(last)}
            continue
        mins[side] = (x, fn)
        comps[side] = {"status": "converged", "point": M.to_record(x), "value": hx, "iters": iters}

    asserted = []
    part_a = INCONCLUSIVE
    if len(mins) == 2 and M.dist(mins["lower"][0], mins["upper"][0]) <= M.tol.x_tol:
        cert = is_efficient_sampled(p, mins["lower"][0], rng, n)
        part_a = cert.verdict
        asserted.append(("a", cert))
    part_b = {}
    for side, (x, fn) in mins.items():
        proxy = uniqueness_proxy(p, fn, x, rng, n)
        comps[side]["uniqueness_proxy"] = proxy
        if proxy["unique"]:
            cert = is_efficient_sampled(p, x, rng, n)
            part_b[side] = cert.verdict
            asserted.append(("b:" + side, cert))
        else:
            part_b[side] = INCONCLUSIVE

    witnesses = [dict(w, part=tag) for tag, c in asserted for w in c.witnesses]
    if any(c.failed for _, c in asserted):
        verdict = FAIL
    elif asserted:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return CheckReport(
        "prop41",
        verdict,
        samples=n,
        witnesses=witnesses,
        details={"components": comps, "prop41a": part_a, "prop41b": part_b,
                 "uniqueness": "proxy: positive second differences and no near-ties in a global sweep"},
    )


# -- derivative certificates -----------------------------------------------------

A0 = "a0"          # f'(x0, v) = [a, 0] with a < 0
NPREC = "nprec"    # f'(x0, v) not strictly below 0


def classify(D: Interval, tol: float) -> str:
    """``nprec``, ``a0`` or ``prec`` for a derivative interval against 0."""
    if iv.nprec(D, iv.ZERO, tol):
        return NPREC
    if abs(D.hi) <= tol and D.lo < -tol:
        return A0
    return "prec"


def _derivatives(p, x0, pts):
    M = p.manifold
    for x in pts:
        yield x, dir_deriv(p.f, x0, M.log(x0, x)).value


def certify_necessary_41(p: RIOProblem, x0, rng=None, n: int = 200, points=None) -> Certificate:
    """Necessary condition for efficiency: every ``f'(x0, log x)`` is ``not< 0`` or ``[a, 0]``.

    A failure refutes efficiency of ``x0``.  Which branch each sample hit is
    counted in ``details["branches"]``.
    """
    tol = p.manifold.tol.eq_tol
    pts = candidate_points(p, x0, rng, n) if points is None else points
    branches = {NPREC: 0, A0: 0}
    witnesses = []
    for x, D in _derivatives(p, x0, pts):
        b = classify(D, tol)
        if b == "prec":
            witnesses.append(_witness(p, x0, x, deriv=D, residual=-D.hi,
                                      replay={"kind": "necessary41", "problem": p.name}))
        else:
            branches[b] += 1
    return Certificate(
        "necessary41",
        FAIL if witnesses else PASS,
        samples=len(pts),
        tolerance=tol,
        witnesses=witnesses[:10],
        details={"branches": branches, "violations": len(witnesses)},
        kind="Necessary41",
    )


def _convexity_gate(p, rng, verify: bool):
    if not p.convex:
        return "problem not flagged convex"
    if verify:
        rep = convexity_check(p.f, rng, n_pairs=30)
        if not rep.passed:
            return f"convexity check {rep.verdict}"
    return None


def certify_sufficient_41(p: RIOProblem, x0, rng=None, n: int = 200, points=None, verify_convexity: bool = True) -> Certificate:
    """Sufficient condition under convexity: every ``f'(x0, log x)`` is ``not< 0``.

    A ``[a, 0]`` sample makes the certificate inconclusive (it neither proves
    nor refutes efficiency); a derivative strictly below 0 otherwise is a
    failure.
    """
    tol = p.manifold.tol.eq_tol
    gate = _convexity_gate(p, rng, verify_convexity)
    if gate:
        return Certificate("sufficient41", INCONCLUSIVE, details={"gate": gate}, kind="Sufficient41")
    pts = candidate_points(p, x0, rng, n) if points is None else points
    branches = {NPREC: 0, A0: 0, "prec": 0}
    witnesses = []
    for x, D in _derivatives(p, x0, pts):
        b = classify(D, tol)
        branches[b] += 1
        if b == "prec":
            witnesses.append(_witness(p, x0, x, deriv=D, residual=-D.hi))
    if witnesses:
        verdict = FAIL
    elif branches[A0]:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return Certificate("sufficient41", verdict, samples=len(pts), tolerance=tol, witnesses=witnesses[:10],
                       details={"branches": branches}, kind="Sufficient41")


def certify_42(p: RIOProblem, x0, rng=None, n: int = 200, variant: str = "necessary", points=None,
               verify: bool = True) -> Certificate:
    """Zero-membership conditions on the Gateaux derivative.

    ``necessary``: ``0 in [lo, hi]`` for every sample.  ``sufficient``: the
    half-open ``lo <= 0 < hi``, taken literally; when the excluded right
    endpoint is the only obstacle the certificate is inconclusive and
    ``details["excluded_endpoint_sole_blocker"]`` is set.
    """
    if variant not in ("necessary", "sufficient"):
        raise ValueError(f"unknown variant {variant!r}")
    kind = "Necessary42" if variant == "necessary" else "Sufficient42"
    M = p.manifold
    tol = M.tol.eq_tol
    if verify:
        gx = gateaux_check(p.f, x0, rng, n=4)
        if not gx.passed:
            return Certificate(f"{variant}42", INCONCLUSIVE, details={"gate": f"gateaux check {gx.verdict}"}, kind=kind)
        if variant == "sufficient":
            gate = _convexity_gate(p, rng, True)
            if gate:
                return Certificate(f"{variant}42", INCONCLUSIVE, details={"gate": gate}, kind=kind)
    elif variant == "sufficient" and not p.convex:
        return Certificate(f"{variant}42", INCONCLUSIVE, details={"gate": "problem not flagged convex"}, kind=kind)
    pts = candidate_points(p, x0, rng, n) if points is None else points
    witnesses, blocked = [], 0
    for x, D in _derivatives(p, x0, pts):
        if variant == "necessary":
            if not (D.lo <= tol and D.hi >= -tol):
                witnesses.append(_witness(p, x0, x, deriv=D, residual=max(D.lo, -D.hi)))
        elif D.lo <= tol and D.hi > tol:
            continue
        elif D.lo <= tol and D.hi >= -tol:
            blocked += 1
        else:
            witnesses.append(_witness(p, x0, x, deriv=D, residual=max(D.lo, -D.hi)))
    if witnesses:
        verdict = FAIL
    elif blocked:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return Certificate(
        f"{variant}42",
        verdict,
        samples=len(pts),
        tolerance=tol,
        witnesses=witnesses[:10],
        details={"excluded_endpoint_blocks": blocked,
                 "excluded_endpoint_sole_blocker": bool(blocked) and not witnesses},
        kind=kind,
    )


def replay_necessary_witness(p: RIOProblem, x0, x, ts=(1e-1, 1e-2, 1e-3, 1e-4)) -> bool:
    """Whether some ``exp(x0, t log x)`` with small ``t`` strictly dominates ``x0``.

    A strictly negative derivative forces this for small enough ``t``.
    """
    M = p.manifold
    v = M.log(x0, x)
    f0 = evaluate(p.f, x0)
    for t in ts:
        y = M.exp(x0, t * v)
        if p.f.domain(y) and iv.prec(evaluate(p.f, y), f0):
            return True
    return False


def consistency_check(p: RIOProblem, rng, n_points: int = 10, n: int = 200,
                      settings: SolverSettings | None = None) -> CheckReport:
    """Cross-checks between the sampled certificate and the derivative certificates.

    Per candidate ``x0`` (reference points plus samples):

    * every dominating sample ``x`` of a convex problem has ``f'(x0, log x) < 0``;
      unless that derivative is of the ``[a, 0]`` form, the necessary
      certificate must fail on the same samples;
    * a failed necessary certificate is replayed: a dominating point must exist
      on the witness geodesic;
    * a passed sufficient certificate must survive ``is_efficient_sampled``
      with ten times the samples;
    * a converged scalarized solve on a convex problem passes
      ``is_efficient_sampled`` with 10^4 samples and is unchanged when a
      constant is added to ``f``.
    """
    M = p.manifold
    tol = M.tol.eq_tol
    s = settings or SolverSettings()
    x0s = list(p.reference.get("efficient", [])) + list(p.sample(rng, n_points))
    violations = []
    counts = {"x0": 0, "dominated": 0, "nec_fail": 0, "suff_pass": 0, "solves": 0}
    for x0 in x0s:
        counts["x0"] += 1
        pts = candidate_points(p, x0, rng, n)
        eff = is_efficient_sampled(p, x0, points=pts)
        nec = certify_necessary_41(p, x0, points=pts)
        if eff.failed and p.convex:
            counts["dominated"] += 1
            f0 = evaluate(p.f, x0)
            strict = False
            for x in pts:
                if iv.prec(evaluate(p.f, x), f0):
                    D = dir_deriv(p.f, x0, M.log(x0, x)).value
                    if not iv.prec(D, iv.ZERO, tol):
                        violations.append({"rule": "dominator without negative derivative",
                                           "x0": M.to_record(x0), "x": M.to_record(x), "deriv": D, "residual": D.hi})
                    elif classify(D, tol) == "prec":
                        strict = True
            if strict and not nec.failed:
                violations.append({"rule": "strict negative derivative missed by necessary41",
                                   "x0": M.to_record(x0), "residual": 0.0})
        if nec.failed:
            counts["nec_fail"] += 1
            w = nec.witnesses[0]
            x = M.point_from_coords(w["x"]["coords"])
            if not replay_necessary_witness(p, x0, x):
                violations.append({"rule": "necessary41 witness does not replay",
                                   "x0": M.to_record(x0), "x": w["x"], "residual": 0.0})
        suff = certify_sufficient_41(p, x0, rng, points=pts, verify_convexity=False)
        if suff.passed:
            counts["suff_pass"] += 1
            big = is_efficient_sampled(p, x0, rng, 10 * len(pts))
            if big.failed:
                violations.append({"rule": "sufficient41 pass but dominated", "x0": M.to_record(x0),
                                   "witness": big.witnesses[0], "residual": big.witnesses[0]["residual"]})
    if p.convex:
        for x_init in p.sample(rng, 2):
            try:
                res = solve_scalarized(p, s, x_init)
                res_c = solve_scalarized(RIOProblem(p.f.shifted(3.0), p.sampler, p.convex, name=p.name), s, x_init)
            except (SolverError, NonConvergence):
                continue
            counts["solves"] += 1
            big = is_efficient_sampled(p, res.point, rng, 10_000)
            if big.failed:
                violations.append({"rule": "scalarized optimum dominated", "x0": M.to_record(res.point),
                                   "residual": big.witnesses[0]["residual"], "witness": big.witnesses[0]})
            shift = M.dist(res.point, res_c.point)
            if shift > M.tol.x_tol:
                violations.append({"rule": "argmin moved under constant shift", "x0": M.to_record(res.point),
                                   "residual": shift})
    return CheckReport(
        "riop_consistency",
        FAIL if violations else PASS,
        samples=counts["x0"],
        witnesses=violations[:10],
        details=counts,
    )
