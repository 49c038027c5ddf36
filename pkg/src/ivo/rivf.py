"""Interval-valued functions on a manifold and their gH-calculus.

A :class:`RIVF` is a pair of scalar functions ``lower <= upper`` on a manifold
domain.  Derivatives are one-sided: forward difference quotients of each
component along ``t -> exp_x(t v)`` on a halving step grid, with one level of
Richardson extrapolation, combined into an interval by min/max.

The checks in this module sample points and report a
:class:`~ivo.report.CheckReport`; none of them can prove a limit, so probes
answer ``inconclusive`` whenever the samples do not decide.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import interval as iv
from .interval import Interval
from .manifolds import Manifold
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport, combine

DEFAULT_RADII = tuple(10.0 ** -k for k in range(1, 9))
MONOTONE_GRID = (1.0, 0.5, 0.25, 0.1, 0.05)


class MalformedRIVF(ValueError):
    """lower(x) > upper(x) at an evaluated point."""


class DomainError(ValueError):
    """A point, or a probe geodesic, left the function's domain."""


class NonConvergence(ArithmeticError):
    def __init__(self, msg, estimate=None, residual=None):
        super().__init__(msg)
        self.estimate = estimate
        self.residual = residual


class DerivativeMismatch(AssertionError):
    """Finite-difference derivative disagrees with the closed form."""


def _everywhere(x):
    return True


@dataclass
class RIVF:
    manifold: Manifold
    lower: Callable
    upper: Callable
    domain: Callable = _everywhere
    name: str = ""
    sampler: Callable | None = None
    claimed_convex: bool = False
    claimed_gateaux: bool = False
    # (x, v) -> (lower', upper') or None where no formula is known
    derivative: Callable | None = None
    # x -> (p, q) tangent representatives of the Gateaux derivative, or None
    gateaux_form: Callable | None = None
    description: str = ""
    anchor: str = ""

    def __call__(self, x) -> Interval:
        return evaluate(self, x)

    def sample(self, rng, n: int) -> list:
        if self.sampler is None:
            raise ValueError(f"{self.name or 'RIVF'} has no domain sampler")
        return self.sampler(rng, n)

    def shifted(self, c: float) -> RIVF:
        """Same function plus the constant ``c`` on both components."""
        lo, up = self.lower, self.upper
        return RIVF(
            self.manifold,
            lambda x: lo(x) + c,
            lambda x: up(x) + c,
            self.domain,
            name=f"{self.name}+{c}",
            sampler=self.sampler,
            claimed_convex=self.claimed_convex,
            claimed_gateaux=self.claimed_gateaux,
            derivative=self.derivative,
            gateaux_form=self.gateaux_form,
        )


def evaluate(f: RIVF, x) -> Interval:
    if not f.domain(x):
        raise DomainError(f"{f.name or 'RIVF'}: point outside the domain")
    lo = float(f.lower(x))
    hi = float(f.upper(x))
    if lo > hi:
        raise MalformedRIVF(f"{f.name or 'RIVF'}: lower {lo!r} exceeds upper {hi!r}")
    return Interval(lo, hi)


@dataclass
class DerivativeResult:
    value: Interval
    component_lower: float
    component_upper: float
    convergence_residual: float
    steps_used: int
    closed_form_gap: float | None = None

    def __post_init__(self):
        expect = Interval.hull(self.component_lower, self.component_upper)
        if expect != self.value:
            raise AssertionError("derivative interval is not the min/max of its components")


def interval_quotient(f: RIVF, x, v, t: float) -> Interval:
    """``(1/t) (f(exp_x(t v)) -gH f(x))``."""
    M = f.manifold
    return iv.scale(1.0 / t, iv.gh_diff(evaluate(f, M.exp(x, t * v)), evaluate(f, x)))


def component_quotients(f: RIVF, x, v, t: float) -> tuple[float, float]:
    M = f.manifold
    fy = evaluate(f, M.exp(x, t * v))
    fx = evaluate(f, x)
    return (fy.lo - fx.lo) / t, (fy.hi - fx.hi) / t


def dir_deriv(
    f: RIVF,
    x,
    v,
    *,
    h0: float = 1e-2,
    max_steps: int = 20,
    tol: float | None = None,
    cross_check: bool = True,
) -> DerivativeResult:
    """gH-directional derivative ``f'(x, v)``.

    Steps are ``t_k = t0 2^-k`` with ``t0 = h0 / max(|v|_x, 1)``; the extrapolant
    ``2 q(t_k) - q(t_(k-1))`` is accepted once two successive extrapolants agree
    within ``tol * max(1, |extrapolant|)``.

    Raises
    ------
    DomainError
        ``x`` or ``exp_x(t0 v)`` lies outside the domain.
    NonConvergence
        No agreement after ``max_steps`` halvings.
    DerivativeMismatch
        ``f.derivative`` gives a closed form differing by more than 1e-6
        (relative to the derivative's size).
    """
    M = f.manifold
    tol = M.tol.deriv_tol if tol is None else tol
    fx = evaluate(f, x)
    nv = M.norm(x, v)
    if nv == 0.0:
        return DerivativeResult(iv.ZERO, 0.0, 0.0, 0.0, 0, _closed_gap(f, x, v, 0.0, 0.0, cross_check))
    t0 = h0 / max(nv, 1.0)
    if not f.domain(M.exp(x, t0 * v)):
        raise DomainError("probe geodesic leaves the domain within the first step")

    def q(t):
        fy = evaluate(f, M.exp(x, t * v))
        return np.array([(fy.lo - fx.lo) / t, (fy.hi - fx.hi) / t])

    q_prev = q(t0)
    r_prev = None
    for k in range(1, max_steps + 1):
        q_k = q(t0 * 2.0**-k)
        r_k = 2.0 * q_k - q_prev
        if r_prev is not None:
            gap = float(np.max(np.abs(r_k - r_prev)))
            if gap <= tol * max(1.0, float(np.max(np.abs(r_k)))):
                dl, du = float(r_k[0]), float(r_k[1])
                return DerivativeResult(
                    Interval.hull(dl, du),
                    dl,
                    du,
                    float(np.max(np.abs(q_k - r_k))),
                    k,
                    _closed_gap(f, x, v, dl, du, cross_check),
                )
        q_prev, r_prev = q_k, r_k
    raise NonConvergence(
        f"directional derivative did not settle after {max_steps} halvings",
        estimate=r_prev,
        residual=gap,
    )


def _closed_gap(f, x, v, dl, du, cross_check):
    if f.derivative is None:
        return None
    exact = f.derivative(x, v)
    if exact is None:
        return None
    gap = max(abs(dl - exact[0]), abs(du - exact[1]))
    if cross_check and gap > 1e-6 * max(1.0, abs(exact[0]), abs(exact[1])):
        raise DerivativeMismatch(
            f"{f.name}: finite difference ({dl:.9g}, {du:.9g}) vs closed form ({exact[0]:.9g}, {exact[1]:.9g})"
        )
    return gap


def _limit_verdict(sups: list[float], tol: float, counts: list[int]) -> str:
    # pass: small at the finest radius; fail: no decay at all across the radii
    if not sups or min(counts) == 0:
        return INCONCLUSIVE
    if sups[-1] <= tol:
        return PASS
    if sups[-1] >= 0.1 * sups[0]:
        return FAIL
    return INCONCLUSIVE


def gh_continuity_probe(
    f: RIVF,
    x,
    rng: np.random.Generator,
    radii=DEFAULT_RADII,
    n: int = 32,
    tol: float | None = None,
) -> CheckReport:
    """Sup of ``|f(exp_x v) -gH f(x)|`` over sampled ``|v| = r`` for shrinking ``r``.

    The same samples also drive scalar probes of the two components; their
    verdicts are returned in ``details["component_verdicts"]``.
    """
    M = f.manifold
    tol = M.tol.cont_tol if tol is None else tol
    radii = sorted(radii, reverse=True)
    fx = evaluate(f, x)
    sups, lo_sups, up_sups, counts, exits = [], [], [], [], 0
    worst = []
    for r in radii:
        best, best_l, best_u, cnt, arg = 0.0, 0.0, 0.0, 0, None
        for _ in range(n):
            v = M.sample_tangent(rng, x, r, exact=True)
            y = M.exp(x, v)
            if not f.domain(y):
                exits += 1
                continue
            fy = evaluate(f, y)
            cnt += 1
            d = iv.norm(iv.gh_diff(fy, fx))
            best_l = max(best_l, abs(fy.lo - fx.lo))
            best_u = max(best_u, abs(fy.hi - fx.hi))
            if d >= best:
                best, arg = d, (v, fy)
        sups.append(best)
        lo_sups.append(best_l)
        up_sups.append(best_u)
        counts.append(cnt)
        worst.append(arg)
    verdict = _limit_verdict(sups, tol, counts)
    witnesses = []
    if verdict == FAIL:
        for r, s, arg in zip(radii, sups, worst):
            if arg is not None and s > tol:
                witnesses.append({"radius": r, "tangent": arg[0], "value": arg[1], "residual": s})
    return CheckReport(
        "gh_continuity",
        verdict,
        samples=sum(counts),
        tolerance=tol,
        witnesses=witnesses,
        details={
            "radii": list(radii),
            "sup": sups,
            "domain_exits": exits,
            "component_verdicts": {
                "lower": _limit_verdict(lo_sups, tol, counts),
                "upper": _limit_verdict(up_sups, tol, counts),
            },
        },
    )


def gateaux_check(
    f: RIVF,
    x,
    rng: np.random.Generator,
    n: int = 8,
    tol: float | None = None,
    radii=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    n_per_radius: int = 4,
) -> CheckReport:
    """Sampled test that ``v -> f'(x, v)`` is a gH-continuous linear interval map.

    Three sub-checks per random ``(v, w, lam)``: homogeneity for any sign of
    ``lam``; additivity, or else mutual non-dominance of ``F(v) + F(w)`` and
    ``F(v + w)``; and a continuity probe of ``F`` around ``v``.  Which of the
    two additivity branches fired is tallied in ``details["additivity"]``.
    """
    M = f.manifold
    tol = M.tol.gx_tol if tol is None else tol

    def F(u):
        return dir_deriv(f, x, u).value

    witnesses = []
    branches = {"additive": 0, "nondominated": 0}
    sub = {"homogeneity": PASS, "additivity": PASS, "continuity": PASS}
    max_hom = 0.0
    for i in range(n):
        v = M.sample_tangent(rng, x, 1.0)
        w = M.sample_tangent(rng, x, 1.0)
        lam = -1.0 if i == 0 else float(rng.uniform(-2.0, 2.0))
        Fv, Fw = F(v), F(w)

        lhs, rhs = F(lam * v), iv.scale(lam, Fv)
        res = iv.hausdorff(lhs, rhs)
        max_hom = max(max_hom, res)
        if res > tol * max(1.0, iv.norm(rhs)):
            sub["homogeneity"] = FAIL
            witnesses.append({"sub": "homogeneity", "v": v, "lam": lam, "F(lam v)": lhs, "lam F(v)": rhs, "residual": res})

        s, Fvw = iv.add(Fv, Fw), F(v + w)
        scale_ = max(1.0, iv.norm(Fvw))
        if iv.hausdorff(s, Fvw) <= tol * scale_:
            branches["additive"] += 1
        elif iv.compare(s, Fvw, tol * scale_) is iv.Order.INCOMPARABLE:
            branches["nondominated"] += 1
        else:
            sub["additivity"] = FAIL
            witnesses.append({"sub": "additivity", "v": v, "w": w, "F(v)+F(w)": s, "F(v+w)": Fvw,
                              "residual": iv.hausdorff(s, Fvw)})

        sups, counts = [], []
        for r in radii:
            best = 0.0
            for _ in range(n_per_radius):
                h = M.sample_tangent(rng, x, r, exact=True)
                best = max(best, iv.norm(iv.gh_diff(F(v + h), Fv)))
            sups.append(best)
            counts.append(n_per_radius)
        cv = _limit_verdict(sups, tol, counts)
        if cv == FAIL:
            sub["continuity"] = FAIL
            witnesses.append({"sub": "continuity", "v": v, "radii": list(radii), "sup": sups, "residual": sups[-1]})
        elif cv == INCONCLUSIVE and sub["continuity"] == PASS:
            sub["continuity"] = INCONCLUSIVE

    return CheckReport(
        "gateaux",
        combine(sub.values()),
        samples=n,
        tolerance=tol,
        witnesses=witnesses,
        details={"sub_verdicts": sub, "additivity": branches, "max_homogeneity_residual": max_hom},
    )


def _pairs(f: RIVF, rng, n_pairs):
    pts = f.sample(rng, 2 * n_pairs)
    return list(zip(pts[0::2], pts[1::2]))


def convexity_check(
    f: RIVF,
    rng: np.random.Generator,
    n_pairs: int = 200,
    t_grid=None,
    tol: float | None = None,
) -> CheckReport:
    """Sampled geodesic convexity ``f(gamma(t)) <= (1-t) f(x) + t f(y)``.

    The same samples feed two equivalent formulations: the scalar convexity of
    each component, which must agree with the interval verdict sample by
    sample, and convexity of ``f o gamma`` between interior grid points.
    """
    M = f.manifold
    tol = M.tol.ineq_tol if tol is None else tol
    t_grid = np.linspace(0.0, 1.0, 11) if t_grid is None else np.asarray(t_grid, dtype=float)
    witnesses = []
    n_main = n_mismatch = n_comp = n_exit = 0
    checks = 0
    for x, y in _pairs(f, rng, n_pairs):
        fx, fy = evaluate(f, x), evaluate(f, y)
        path = {}
        for t in t_grid:
            g = M.geodesic(x, y, float(t))
            if not f.domain(g):
                n_exit += 1
                continue
            fg = evaluate(f, g)
            path[float(t)] = fg
            rhs = iv.add(iv.scale(1.0 - t, fx), iv.scale(t, fy))
            slack = tol * (1.0 + iv.norm(rhs))
            ok = iv.preceq(fg, rhs, slack)
            ok_lo = fg.lo <= (1.0 - t) * fx.lo + t * fy.lo + slack
            ok_hi = fg.hi <= (1.0 - t) * fx.hi + t * fy.hi + slack
            checks += 1
            if ok != (ok_lo and ok_hi):
                n_mismatch += 1
                witnesses.append({"sub": "componentwise", "x": x, "y": y, "t": float(t), "residual": 0.0})
            if not ok:
                n_main += 1
                witnesses.append({"sub": "interval", "x": x, "y": y, "t": float(t), "lhs": fg, "rhs": rhs,
                                  "residual": max(fg.lo - rhs.lo, fg.hi - rhs.hi)})
        ts = sorted(path)
        for _ in range(3):
            if len(ts) < 3:
                break
            t1, t2 = rng.choice(ts, size=2, replace=False)
            s = float(rng.uniform())
            tm = (1.0 - s) * t1 + s * t2
            gm = M.geodesic(x, y, float(tm))
            if not f.domain(gm):
                n_exit += 1
                continue
            lhs = evaluate(f, gm)
            rhs = iv.add(iv.scale(1.0 - s, path[t1]), iv.scale(s, path[t2]))
            if not iv.preceq(lhs, rhs, tol * (1.0 + iv.norm(rhs))):
                n_comp += 1
                witnesses.append({"sub": "composition", "x": x, "y": y, "t1": t1, "t2": t2, "s": s,
                                  "residual": max(lhs.lo - rhs.lo, lhs.hi - rhs.hi)})
    if n_main or n_comp or n_mismatch:
        verdict = FAIL
    elif n_exit:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return CheckReport(
        "geodesic_convexity",
        verdict,
        samples=checks,
        tolerance=tol,
        witnesses=witnesses[:20],
        details={"violations": n_main, "componentwise_mismatch": n_mismatch,
                 "composition_violations": n_comp, "domain_exits": n_exit},
    )


def sublevel_convexity_check(
    f: RIVF,
    A: Interval,
    rng: np.random.Generator,
    n: int = 200,
    t_grid=None,
    tol: float | None = None,
) -> CheckReport:
    """Sampled geodesic convexity of ``{x : f(x) <= A}``."""
    M = f.manifold
    tol = M.tol.ineq_tol if tol is None else tol
    t_grid = np.linspace(0.0, 1.0, 11) if t_grid is None else t_grid
    members = [x for x in f.sample(rng, n) if iv.preceq(evaluate(f, x), A)]
    witnesses, checks = [], 0
    for x, y in zip(members[0::2], members[1::2]):
        for t in t_grid:
            g = M.geodesic(x, y, float(t))
            checks += 1
            if not f.domain(g):
                witnesses.append({"x": x, "y": y, "t": float(t), "reason": "domain exit", "residual": float("inf")})
                continue
            fg = evaluate(f, g)
            if not iv.preceq(fg, A, tol):
                witnesses.append({"x": x, "y": y, "t": float(t), "value": fg,
                                  "residual": max(fg.lo - A.lo, fg.hi - A.hi)})
    return CheckReport(
        "sublevel_convexity",
        FAIL if witnesses else PASS,
        samples=checks,
        tolerance=tol,
        witnesses=witnesses[:20],
        details={"members": len(members), "vacuous": len(members) < 2, "level": A},
    )


def diffquot_monotone_check(f: RIVF, x, v, t_grid=MONOTONE_GRID, tol: float | None = None) -> CheckReport:
    """Endpoints of ``phi(t) = (1/t)(f(exp_x(t v)) -gH f(x))`` are nondecreasing in t."""
    M = f.manifold
    tol = M.tol.ineq_tol if tol is None else tol
    if not f.claimed_convex:
        return CheckReport("diffquot_monotone", INCONCLUSIVE, details={"gate": "function not flagged convex"})
    ts = sorted(float(t) for t in t_grid)
    phis = []
    for t in ts:
        if not f.domain(M.exp(x, t * v)):
            return CheckReport("diffquot_monotone", INCONCLUSIVE, details={"gate": f"domain exit at t={t}"})
        phis.append(interval_quotient(f, x, v, t))
    witnesses = []
    floor = phis[0]
    for (t_a, p_a), (t_b, p_b) in zip(zip(ts, phis), zip(ts[1:], phis[1:])):
        slack = tol * (1.0 + iv.norm(p_b))
        if p_b.lo < p_a.lo - slack or p_b.hi < p_a.hi - slack:
            witnesses.append({"t_small": t_a, "t_large": t_b, "phi_small": p_a, "phi_large": p_b,
                              "residual": max(p_a.lo - p_b.lo, p_a.hi - p_b.hi)})
        if p_b.lo < floor.lo - slack or p_b.hi < floor.hi - slack:
            witnesses.append({"t": t_b, "phi": p_b, "floor": floor, "residual": max(floor.lo - p_b.lo, floor.hi - p_b.hi)})
    return CheckReport(
        "diffquot_monotone",
        FAIL if witnesses else PASS,
        samples=len(ts),
        tolerance=tol,
        witnesses=witnesses,
        details={"t": ts, "phi": phis},
    )


def thm33_inequality_check(f: RIVF, rng: np.random.Generator, n_pairs: int = 1000, tol: float | None = None) -> CheckReport:
    """``f'(x, log_x y) <= f(y) -gH f(x)`` and ``f(y) not< f'(x, log_x y) + f(x)`` on sampled pairs."""
    M = f.manifold
    tol = M.tol.ineq_tol if tol is None else tol
    if not f.claimed_convex:
        return CheckReport("thm33_inequality", INCONCLUSIVE, details={"gate": "function not flagged convex"})
    witnesses, worst = [], -np.inf
    n_cor = 0
    for x, y in _pairs(f, rng, n_pairs):
        D = dir_deriv(f, x, M.log(x, y)).value
        fx, fy = evaluate(f, x), evaluate(f, y)
        rhs = iv.gh_diff(fy, fx)
        excess = max(D.lo - rhs.lo, D.hi - rhs.hi)
        worst = max(worst, excess)
        if not iv.preceq(D, rhs, tol):
            witnesses.append({"form": "preceq", "x": x, "y": y, "deriv": D, "gh_diff": rhs, "residual": excess})
        if not iv.nprec(fy, iv.add(D, fx), tol):
            n_cor += 1
            witnesses.append({"form": "nprec", "x": x, "y": y, "f(y)": fy, "D+f(x)": iv.add(D, fx), "residual": excess})
    return CheckReport(
        "thm33_inequality",
        FAIL if witnesses else PASS,
        samples=n_pairs,
        tolerance=tol,
        witnesses=witnesses[:20],
        details={"max_excess": float(worst), "corollary_violations": n_cor},
    )


def existence_check(f: RIVF, rng: np.random.Generator, n: int = 100) -> CheckReport:
    """Directional derivatives of a convex function must exist: no NonConvergence."""
    M = f.manifold
    if not f.claimed_convex:
        return CheckReport("derivative_existence", INCONCLUSIVE, details={"gate": "function not flagged convex"})
    witnesses, steps = [], []
    for x in f.sample(rng, n):
        v = M.sample_tangent(rng, x, 1.0)
        try:
            steps.append(dir_deriv(f, x, v).steps_used)
        except NonConvergence as err:
            witnesses.append({"x": x, "v": v, "residual": float(err.residual)})
        except DomainError:
            continue
    return CheckReport(
        "derivative_existence",
        FAIL if witnesses else PASS,
        samples=n,
        witnesses=witnesses,
        details={"max_steps_used": max(steps) if steps else 0, "converged": len(steps)},
    )
