"""Sampled checks of the metric and order laws of interval arithmetic.

Each law is a function of random intervals returning ``(ok, residual)``.
Operations are looked up on the :mod:`ivo.interval` module at call time, so a
test can swap in a faulty implementation and watch the suite catch it.
"""
from __future__ import annotations

import numpy as np

from . import interval as iv
from .interval import Interval
from .report import FAIL, PASS, CheckReport


def _metric_zero(A, B, C, D, lam, tol):
    d = iv.hausdorff(A, B)
    ok = (d == 0.0) == (A == B)
    return ok, 0.0 if ok else max(d, 1.0)


def _metric_scale(A, B, C, D, lam, tol):
    r = abs(iv.hausdorff(iv.scale(lam, A), iv.scale(lam, B)) - abs(lam) * iv.hausdorff(A, B))
    return r <= tol, r


def _metric_translate(A, B, C, D, lam, tol):
    r = abs(iv.hausdorff(iv.add(A, C), iv.add(B, C)) - iv.hausdorff(A, B))
    return r <= tol, r


def _metric_subadditive(A, B, C, D, lam, tol):
    r = iv.hausdorff(iv.add(A, B), iv.add(C, D)) - iv.hausdorff(A, C) - iv.hausdorff(B, D)
    return r <= tol, max(r, 0.0)


def _metric_gh_norm(A, B, C, D, lam, tol):
    r = abs(iv.hausdorff(A, B) - iv.hausdorff(iv.gh_diff(A, B), iv.ZERO))
    return r <= tol, r


def _metric_gh_cancel(A, B, C, D, lam, tol):
    d = iv.hausdorff(B, C)
    r = max(abs(iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C)) - d),
            abs(iv.hausdorff(iv.gh_diff(B, A), iv.gh_diff(C, A)) - d))
    return r <= tol, r


def _metric_gh_lipschitz(A, B, C, D, lam, tol):
    # the inequality behind the cancellation law; equality there needs more structure
    r = max(iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C)), iv.hausdorff(iv.gh_diff(B, A), iv.gh_diff(C, A))) \
        - iv.hausdorff(B, C)
    return r <= tol, max(r, 0.0)


def _gh_defining(A, B, C, D, lam, tol):
    G = iv.gh_diff(A, B)
    r = min(iv.hausdorff(A, iv.add(B, G)), iv.hausdorff(B, iv.add(A, iv.scale(-1.0, G))))
    return r <= tol, r


def _order_preceq(A, B, C, D, lam, tol):
    return iv.preceq(A, B) == iv.preceq(iv.gh_diff(A, B), iv.ZERO), 0.0


def _order_nprec(A, B, C, D, lam, tol):
    return iv.nprec(A, B) == iv.nprec(iv.gh_diff(A, B), iv.ZERO), 0.0


def _order_shift(A, B, C, D, lam, tol):
    if not iv.preceq(A, B):
        return True, 0.0
    L, R = iv.gh_diff(A, C), iv.gh_diff(B, C)
    ok = iv.preceq(L, R, tol)
    return ok, 0.0 if ok else max(L.lo - R.lo, L.hi - R.hi)


def _order_gh_bound(A, B, C, D, lam, tol):
    if not iv.preceq(A, iv.gh_diff(B, C)):
        return True, 0.0
    S = iv.add(A, C)
    ok = iv.nprec(B, S, tol)
    return ok, 0.0 if ok else min(S.lo - B.lo, S.hi - B.hi)


def _order_sum(A, B, C, D, lam, tol):
    if not iv.preceq(iv.ZERO, iv.add(iv.gh_diff(A, B), iv.gh_diff(C, D))):
        return True, 0.0
    G = iv.gh_diff(iv.add(A, C), iv.add(B, D))
    ok = iv.preceq(iv.ZERO, G, tol)
    return ok, 0.0 if ok else max(-G.lo, -G.hi)


def _antisymmetry(A, B, C, D, lam, tol):
    flip = {iv.Order.LESS: iv.Order.GREATER, iv.Order.GREATER: iv.Order.LESS,
            iv.Order.EQUAL: iv.Order.EQUAL, iv.Order.INCOMPARABLE: iv.Order.INCOMPARABLE}
    return iv.compare(B, A) is flip[iv.compare(A, B)], 0.0


def _transitivity(A, B, C, D, lam, tol):
    if not (iv.prec(A, B) and iv.prec(B, C)):
        return True, 0.0
    return iv.prec(A, C), 0.0


# name -> (function, anchor)
LAWS = {
    "metric_zero": (_metric_zero, "Prop 2.2(a)"),
    "metric_scale": (_metric_scale, "Prop 2.2(b)"),
    "metric_translate": (_metric_translate, "Prop 2.2(c)"),
    "metric_subadditive": (_metric_subadditive, "Prop 2.2(d)"),
    "metric_gh_norm": (_metric_gh_norm, "Prop 2.2(e)"),
    "metric_gh_cancel": (_metric_gh_cancel, "Prop 2.2(f)"),
    "metric_gh_lipschitz": (_metric_gh_lipschitz, "Prop 2.2(f), inequality form"),
    "gh_defining_property": (_gh_defining, "Def 2.3"),
    "order_preceq_gh": (_order_preceq, "Lemma 2.1(a)"),
    "order_nprec_gh": (_order_nprec, "Lemma 2.1(b)"),
    "order_shift": (_order_shift, "Lemma 2.1(c)"),
    "order_gh_bound": (_order_gh_bound, "Lemma 2.1(d)"),
    "order_sum": (_order_sum, "Lemma 2.1(e)"),
    "order_antisymmetry": (_antisymmetry, "Def 2.4"),
    "order_transitivity": (_transitivity, "Def 2.4"),
}


def _draw(rng, n):
    """``n`` tuples ``(A, B, C, D, lam)``; a quarter of the intervals are degenerate
    and a quarter of the ``B`` are copies of ``A`` so that ties get exercised."""
    u = rng.uniform(-1.0, 1.0, size=(n, 4, 2))
    u.sort(axis=2)
    degen = rng.uniform(size=(n, 4)) < 0.25
    u[..., 1] = np.where(degen, u[..., 0], u[..., 1])
    same = rng.uniform(size=n) < 0.25
    lam = rng.uniform(-3.0, 3.0, size=n)
    out = []
    for i in range(n):
        A, B, C, D = (Interval(u[i, k, 0], u[i, k, 1]) for k in range(4))
        if same[i]:
            B = A
        out.append((A, B, C, D, float(lam[i])))
    return out


def law_check(name: str, rng, n: int = 10_000, tol: float = 1e-12, samples=None) -> CheckReport:
    fn, anchor = LAWS[name]
    samples = _draw(rng, n) if samples is None else samples
    witnesses, worst = [], 0.0
    for A, B, C, D, lam in samples:
        ok, r = fn(A, B, C, D, lam, tol)
        worst = max(worst, r)
        if not ok:
            witnesses.append({"A": A, "B": B, "C": C, "D": D, "lam": lam, "residual": r,
                              "replay": {"kind": "law", "law": name, "A": A, "B": B, "C": C, "D": D, "lam": lam}})
    return CheckReport(name, FAIL if witnesses else PASS, samples=len(samples), tolerance=tol,
                       witnesses=witnesses[:5], details={"max_residual": worst, "violations": len(witnesses)},
                       anchor=anchor)


def replay_law(payload: dict, tol: float = 1e-12) -> CheckReport:
    """Re-run one law on the intervals stored in a witness payload."""
    args = [Interval(*payload[k]) for k in "ABCD"] + [float(payload["lam"])]
    return law_check(payload["law"], None, tol=tol, samples=[tuple(args)])


def non_converse_check() -> CheckReport:
    """The two fixed triples showing that the shift and bound laws do not reverse."""
    A, B, C = Interval(1, 2), Interval(0, 5), Interval(-1, 3)
    first = iv.preceq(iv.gh_diff(A, C), iv.gh_diff(B, C)) and iv.compare(A, B) is iv.Order.INCOMPARABLE
    A2, B2, C2 = Interval(0, 0), Interval(0, 3), Interval(1, 2)
    second = iv.nprec(B2, iv.add(A2, C2)) and not iv.preceq(A2, iv.gh_diff(B2, C2))
    witnesses = []
    if not first:
        witnesses.append({"A": A, "B": B, "C": C, "law": "order_shift converse", "residual": 1.0})
    if not second:
        witnesses.append({"A": A2, "B": B2, "C": C2, "law": "order_gh_bound converse", "residual": 1.0})
    return CheckReport("non_converse", FAIL if witnesses else PASS, samples=2, witnesses=witnesses,
                       details={"shift_converse_fails": first, "bound_converse_fails": second},
                       anchor="Remark 2.1")


def law_suite(rng, n: int = 10_000, tol: float = 1e-12) -> list[CheckReport]:
    samples = _draw(rng, n)
    return [law_check(name, None, tol=tol, samples=samples) for name in LAWS] + [non_converse_check()]
