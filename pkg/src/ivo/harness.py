"""Batch runner: configs in, JSON reports out.

Every check is a named function of a :class:`Context`; its random stream is
keyed by ``(seed, group, name)`` so the outcome of one check never depends on
which other checks ran.  Checks that demonstrate a *negative* result (a
certificate that must refute, a gate that must block) are wrapped by
:func:`expect` and pass when the expected verdict is observed.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from . import catalog as cat
from . import interval as iv
from . import laws
from . import riop, rivf, rivi
from .config import Tolerances
from .interval import Interval
from .manifolds import SPD, Euclidean, Hyperbolic, PositiveReals, minkowski
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport, combine, to_jsonable
from .rng import stream

SCHEMA = "ivo-report/1"
GROUPS = ("laws", "manifold", "deriv", "convexity", "solve", "certify", "vi")
COMMANDS = GROUPS + ("suite", "replay", "catalog")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

DEFAULT_SAMPLES = {
    "laws": 10_000,       # random triples per law
    "roundtrip": 1_000,   # point pairs per manifold model
    "pairs": 1_000,       # pairs for the derivative inequality
    "convexity": 200,     # pairs for geodesic convexity
    "efficiency": 10_000,  # candidates for the efficiency of a reference point
    "certify": 200,       # candidates per certificate
    "trials": 1_000,      # randomized bridge trials
    "points": 100,        # sampled x0 for the no-efficient-point demonstration
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    samples: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    checks: list | None = None
    problem: str | None = None
    x_init: object = None
    x0: object = None
    lam1: float = 1.0
    lam2: float = 1.0
    replay: dict | None = None
    out: str | None = None

    KEYS = ("schema", "command", "seed", "samples", "tolerances", "checks", "problem", "x_init", "x0",
            "lam1", "lam2", "replay", "out")

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - set(cls.KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cmd = d.get("command")
        if cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}; expected one of {COMMANDS}")
        seed = d.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        samples = d.get("samples") or {}
        bad = set(samples) - set(DEFAULT_SAMPLES)
        if bad:
            raise ConfigError(f"unknown sample keys: {sorted(bad)}")
        for k, v in samples.items():
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"sample count {k} must be a positive integer")
        try:
            tol = Tolerances.from_dict(d.get("tolerances"))
        except ValueError as err:
            raise ConfigError(str(err)) from None
        for k in ("lam1", "lam2"):
            v = d.get(k, 1.0)
            if not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v):
                raise ConfigError(f"{k} must be a positive number, got {v!r}")
        if d.get("problem") is not None and d["problem"] not in cat.PROBLEMS:
            raise ConfigError(f"unknown problem {d['problem']!r}")
        if cmd == "replay" and not isinstance(d.get("replay"), dict):
            raise ConfigError("replay needs a 'replay' payload taken from a report witness")
        checks = d.get("checks")
        if checks is not None:
            known = {c.name for c in registry()}
            missing = [c for c in checks if c not in known]
            if missing:
                raise ConfigError(f"unknown checks: {missing}")
        return cls(cmd, seed, dict(samples), tol, checks, d.get("problem"), d.get("x_init"), d.get("x0"),
                   float(d.get("lam1", 1.0)), float(d.get("lam2", 1.0)), d.get("replay"), d.get("out"))

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "samples": {**DEFAULT_SAMPLES, **self.samples},
            "tolerances": self.tolerances.to_dict(),
            "checks": self.checks,
            "problem": self.problem,
            "x_init": self.x_init,
            "x0": self.x0,
            "lam1": self.lam1,
            "lam2": self.lam2,
            "replay": self.replay,
        }


def load_config(path: str | None, command: str, seed: int | None = None, out: str | None = None,
                env: dict | None = None) -> RunConfig:
    """Read a JSON config; the seed comes from ``seed``, else ``IVO_SEED``, else the file."""
    env = os.environ if env is None else env
    d = {}
    if path:
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
    if d.get("command", command) != command:
        raise ConfigError(f"config is for command {d['command']!r}, not {command!r}")
    d["command"] = command
    if seed is not None:
        d["seed"] = seed
    elif env.get("IVO_SEED"):
        try:
            d["seed"] = int(env["IVO_SEED"])
        except ValueError:
            raise ConfigError(f"IVO_SEED must be an integer, got {env['IVO_SEED']!r}") from None
    if out is not None:
        d["out"] = out
    return RunConfig.from_dict(d)


# -- context and check registry ---------------------------------------------------

@dataclass
class Context:
    cfg: RunConfig

    @property
    def tol(self) -> Tolerances:
        return self.cfg.tolerances

    def n(self, key: str) -> int:
        return self.cfg.samples.get(key, DEFAULT_SAMPLES[key])

    def rng(self, group: str, name: str):
        return stream(self.cfg.seed, group, name)


@dataclass
class Check:
    name: str
    group: str
    anchor: str
    fn: Callable


def expect(rep: CheckReport, verdict: str, note: str, ok: bool = True) -> CheckReport:
    """Pass iff ``rep`` has the expected verdict (and ``ok`` holds); keep ``rep`` as evidence."""
    matched = rep.verdict == verdict and ok
    witnesses = [] if matched else [{"expected": verdict, "observed": rep.verdict, "note": note, "residual": 1.0}]
    return CheckReport(rep.name, PASS if matched else FAIL, samples=rep.samples, tolerance=rep.tolerance,
                       witnesses=witnesses,
                       details={"expected": verdict, "note": note, "observed": rep.to_dict()})


def _all(name, reports, details=None) -> CheckReport:
    reports = list(reports)
    witnesses = [dict(w, part=r.name) for r in reports for w in r.witnesses if r.failed][:10]
    verdict = combine(r.verdict for r in reports)
    if verdict == FAIL and not witnesses:
        witnesses = [{"residual": 1.0, "note": "sub-check failed"}]
    return CheckReport(name, verdict, samples=sum(r.samples for r in reports), witnesses=witnesses,
                       details={"parts": [r.to_dict() for r in reports], **(details or {})})


def _residual_check(name, residuals, tol, witnesses) -> CheckReport:
    worst = max(residuals) if residuals else 0.0
    return CheckReport(name, FAIL if witnesses else PASS, samples=len(residuals), tolerance=tol,
                       witnesses=witnesses[:10], details={"max_residual": worst})


_REGISTRY: list[Check] = []


def check(group, anchor, name=None):
    def deco(fn):
        _REGISTRY.append(Check(name or fn.__name__, group, anchor, fn))
        return fn
    return deco


def registry() -> list[Check]:
    return list(_REGISTRY)


# -- laws -------------------------------------------------------------------------

def _law(name):
    def fn(ctx):
        return laws.law_check(name, ctx.rng("laws", name), ctx.n("laws"), ctx.tol.law_tol)
    return fn


for _name, (_fn, _anchor) in laws.LAWS.items():
    _REGISTRY.append(Check(_name, "laws", _anchor, _law(_name)))
_REGISTRY.append(Check("non_converse", "laws", "Remark 2.1", lambda ctx: laws.non_converse_check()))


# -- manifolds --------------------------------------------------------------------

def _models(tol):
    return {"euclidean": Euclidean(3, tol), "positive_reals": PositiveReals(tol), "spd": SPD(3, tol),
            "hyperbolic": Hyperbolic(3, tol)}


def _coord_gap(a, b) -> float:
    a, b = np.ravel(np.asarray(a, dtype=float)), np.ravel(np.asarray(b, dtype=float))
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b))))


def _roundtrip(key):
    def fn(ctx):
        M = _models(ctx.tol)[key]
        rng = ctx.rng("manifold", "roundtrip_" + key)
        res, wit = [], []
        for _ in range(ctx.n("roundtrip")):
            x, y = M.sample_point(rng), M.sample_point(rng)
            r1 = _coord_gap(M.exp(x, M.log(x, y)), y)
            v = M.sample_tangent(rng, x, 2.0)
            r2 = _coord_gap(M.log(x, M.exp(x, v)), v)
            r3 = 0.0 if M.validate(M.exp(x, v)).passed else 1.0
            r = max(r1, r2, r3)
            res.append(r)
            if r > 1e-9:
                wit.append({"x": M.to_record(x), "y": M.to_record(y), "residual": r})
        return _residual_check("roundtrip_" + key, res, 1e-9, wit)
    return fn


for _key in ("euclidean", "positive_reals", "spd", "hyperbolic"):
    _REGISTRY.append(Check("exp_log_roundtrip_" + _key, "manifold", "Lemma 2.2", _roundtrip(_key)))


@check("manifold", "Example 2.3")
def spd_det_geodesic(ctx):
    """``det gamma(t) = det(P)^(1-t) det(Q)^t`` along SPD geodesics, both constructions."""
    M = SPD(3, ctx.tol)
    rng = ctx.rng("manifold", "spd_det_geodesic")
    res, wit = [], []
    for _ in range(ctx.n("roundtrip")):
        P, Q = M.sample_point(rng), M.sample_point(rng)
        t = float(rng.uniform())
        G = M.geodesic(P, Q, t)
        want = np.linalg.det(P) ** (1 - t) * np.linalg.det(Q) ** t
        r = max(abs(np.linalg.det(G) - want) / want, _coord_gap(M.geodesic_closed_form(P, Q, t), G))
        res.append(r)
        if r > 1e-10:
            wit.append({"P": P, "Q": Q, "t": t, "residual": r})
    return _residual_check("spd_det_geodesic", res, 1e-10, wit)


@check("manifold", "Lemma 2.2")
def hyperboloid_drift(ctx):
    M = Hyperbolic(3, ctx.tol)
    rng = ctx.rng("manifold", "hyperboloid_drift")
    res, wit = [], []
    for _ in range(ctx.n("roundtrip")):
        x, y = M.sample_point(rng), M.sample_point(rng)
        for t in np.linspace(0.0, 1.0, 11):
            g = M.geodesic(x, y, float(t))
            r = abs(minkowski(g, g) + 1.0)
            res.append(r)
            if r > 1e-9:
                wit.append({"x": x, "y": y, "t": float(t), "residual": r})
    return _residual_check("hyperboloid_drift", res, 1e-9, wit)


def arclength(M, x, y, nodes: int = 2001) -> float:
    """Length of the computed geodesic: Simpson rule on the metric speed of a difference quotient."""
    ts = np.linspace(0.0, 1.0, nodes)
    h = 1e-6
    speed = []
    for t in ts:
        a, b = max(t - h, 0.0), min(t + h, 1.0)
        v = (M.geodesic(x, y, b) - M.geodesic(x, y, a)) / (b - a)
        speed.append(M.norm(M.geodesic(x, y, float(t)), v))
    return float(simpson(speed, x=ts))


@check("manifold", "Example 2.1")
def posreals_distance(ctx):
    M = PositiveReals(ctx.tol)
    d = M.dist(1.0, math.e**2)
    L = arclength(M, 1.0, math.e**2)
    r = max(abs(d - 2.0), abs(L - 2.0))
    wit = [] if r <= 1e-8 else [{"dist": d, "arclength": L, "residual": r}]
    return CheckReport("posreals_distance", FAIL if wit else PASS, samples=1, tolerance=1e-8, witnesses=wit,
                       details={"dist": d, "arclength": L})


def _set_convexity(name, M, contains, sample, rng, n):
    wit, checks = [], 0
    pts = sample(rng, 2 * n)
    for P, Q in zip(pts[0::2], pts[1::2]):
        for t in np.linspace(0.0, 1.0, 11):
            checks += 1
            if not contains(M.geodesic(P, Q, float(t))):
                wit.append({"P": P, "Q": Q, "t": float(t), "residual": 1.0})
    return CheckReport(name, FAIL if wit else PASS, samples=checks, witnesses=wit[:10])


@check("manifold", "Example 2.3")
def det_level_set_convex(ctx):
    s = cat.spd_det_level(2.0, ctx.tol)
    return _set_convexity("det_level_set_convex", s.manifold, s.contains, s.sampler,
                          ctx.rng("manifold", "det_level"), ctx.n("convexity"))


@check("manifold", "Example 2.4")
def det_superlevel_convex(ctx):
    f = cat.spd_logdet(ctx.tol)
    return _set_convexity("det_superlevel_convex", f.manifold, f.domain, f.sampler,
                          ctx.rng("manifold", "det_superlevel"), ctx.n("convexity"))


# -- derivatives ------------------------------------------------------------------

CONVEX_FUNCTIONS = ("spd_logdet", "posreals_x_plus_inv", "posreals_neg_log", "euclid_quad", "euclid_split")


@check("deriv", "Example 4.2")
def deriv_posreals_grid(ctx):
    f = cat.posreals_x_plus_inv(ctx.tol)
    res, wit = [], []
    for x in (0.5, 1.0, 2.0, 4.0):
        for v in (-2.0, -1.0, 1.0, 2.0):
            D = rivf.dir_deriv(f, x, v, cross_check=False).value
            want = iv.scale(v, Interval.hull(1.0 - 1.0 / x**2, 1.0))
            r = iv.hausdorff(D, want)
            res.append(r)
            if r > 1e-6:
                wit.append({"x": x, "v": v, "deriv": D, "closed_form": want, "residual": r})
    return _residual_check("deriv_posreals_grid", res, 1e-6, wit)


@check("deriv", "Example 3.3")
def deriv_flat_origin(ctx):
    f = cat.flat_r2_frac(ctx.tol)
    D = rivf.dir_deriv(f, np.zeros(2), np.array([1.0, 1.0]), cross_check=False).value
    r = iv.hausdorff(D, Interval(1.0, 2.0))
    wit = [] if r <= 1e-6 else [{"deriv": D, "residual": r}]
    return CheckReport("deriv_flat_origin", FAIL if wit else PASS, samples=1, tolerance=1e-6, witnesses=wit,
                       details={"deriv": D})


@check("deriv", "Example 3.3")
def gateaux_flat_origin(ctx):
    return rivf.gateaux_check(cat.flat_r2_frac(ctx.tol), np.zeros(2), ctx.rng("deriv", "gateaux_flat"))


@check("deriv", "Remark 3.3")
def gateaux_without_continuity(ctx):
    """At the origin the Gateaux check should pass while the continuity probe fails."""
    f = cat.flat_r2_frac(ctx.tol)
    rng = ctx.rng("deriv", "remark33")
    gx = rivf.gateaux_check(f, np.zeros(2), rng)
    cont = rivf.gh_continuity_probe(f, np.zeros(2), rng)
    ok = gx.passed and cont.failed
    wit = [] if ok else [{"gateaux": gx.verdict, "continuity": cont.verdict, "expected": ["pass", "fail"],
                          "continuity_sup": cont.details["sup"], "residual": cont.details["sup"][-1]}]
    return CheckReport("gateaux_without_continuity", PASS if ok else FAIL, samples=gx.samples + cont.samples,
                       witnesses=wit, details={"gateaux": gx.to_dict(), "continuity": cont.to_dict()})


@check("deriv", "Remark 3.2")
def continuity_component_agreement(ctx):
    """The interval probe and the two scalar probes agree at catalog points."""
    rng = ctx.rng("deriv", "continuity_agreement")
    pts = [("posreals_x_plus_inv", 1.0), ("spd_logdet2", np.eye(2)), ("spd_logdet", math.e * np.eye(2)),
           ("euclid_quad", np.zeros(2)), ("flat_r2_frac", np.zeros(2)), ("posreals_neg_log", 0.5)]
    reports, wit = [], []
    for key, x in pts:
        f = cat.rivf(key, ctx.tol)
        rep = rivf.gh_continuity_probe(f, x, rng)
        comp = rep.details["component_verdicts"]
        both = combine(comp.values())
        reports.append({"function": key, "verdict": rep.verdict, "components": comp})
        if rep.verdict != both:
            wit.append({"function": key, "x": f.manifold.to_record(x), "interval": rep.verdict,
                        "components": comp, "residual": 1.0})
    return CheckReport("continuity_component_agreement", FAIL if wit else PASS, samples=len(pts), witnesses=wit,
                       details={"points": reports})


@check("deriv", "Example 3.4")
def gateaux_logdet2_identity(ctx):
    return rivf.gateaux_check(cat.spd_logdet2(ctx.tol), np.eye(2), ctx.rng("deriv", "gateaux_logdet2"))


@check("deriv", "Lemma 3.3")
def diffquot_monotone(ctx):
    rng = ctx.rng("deriv", "diffquot")
    reps = [rivf.diffquot_monotone_check(cat.posreals_x_plus_inv(ctx.tol), 2.0, 1.0)]
    for key in CONVEX_FUNCTIONS:
        f = cat.rivf(key, ctx.tol)
        for x in f.sample(rng, 20):
            v = f.manifold.sample_tangent(rng, x, 1.0)
            rep = rivf.diffquot_monotone_check(f, x, v)
            if rep.verdict == INCONCLUSIVE:
                # step back toward x until the whole t-grid stays in the domain
                rep = rivf.diffquot_monotone_check(f, x, 0.05 * v)
            reps.append(rep)
    gate = rivf.diffquot_monotone_check(cat.flat_r2_frac(ctx.tol), np.zeros(2), np.ones(2))
    out = _all("diffquot_monotone", reps)
    out.details["nonconvex_gate"] = gate.verdict
    if gate.verdict != INCONCLUSIVE:
        out = CheckReport(out.name, FAIL, witnesses=[{"note": "non-convex function not gated", "residual": 1.0}],
                          details=out.details)
    return out


def _thm33(key):
    def fn(ctx):
        return rivf.thm33_inequality_check(cat.rivf(key, ctx.tol), ctx.rng("deriv", "thm33_" + key), ctx.n("pairs"))
    return fn


def _existence(key):
    def fn(ctx):
        return rivf.existence_check(cat.rivf(key, ctx.tol), ctx.rng("deriv", "exist_" + key), 100)
    return fn


for _key in CONVEX_FUNCTIONS:
    _REGISTRY.append(Check("thm33_" + _key, "deriv", "Theorem 3.3", _thm33(_key)))
    _REGISTRY.append(Check("derivative_exists_" + _key, "deriv", "Theorem 3.2", _existence(_key)))


@check("deriv", "Example 4.1")
def thm33_logdet_equality(ctx):
    """For ``det Y >= det X`` the derivative equals ``f(Y) -gH f(X)``."""
    f = cat.spd_logdet(ctx.tol)
    M = f.manifold
    rng = ctx.rng("deriv", "thm33_logdet_equality")
    res, wit = [], []
    for X, Y in zip(*(iter(f.sample(rng, 400)),) * 2):
        if np.linalg.det(Y) < np.linalg.det(X):
            X, Y = Y, X
        D = rivf.dir_deriv(f, X, M.log(X, Y)).value
        r = iv.hausdorff(D, iv.gh_diff(f(Y), f(X)))
        res.append(r)
        if r > 1e-6:
            wit.append({"X": X, "Y": Y, "deriv": D, "residual": r})
    return _residual_check("thm33_logdet_equality", res, 1e-6, wit)


# -- convexity --------------------------------------------------------------------

def _convexity(key, anchor):
    def fn(ctx):
        return rivf.convexity_check(cat.rivf(key, ctx.tol), ctx.rng("convexity", key), ctx.n("convexity"))
    return Check("convexity_" + key, "convexity", anchor, fn)


for _key, _anchor in (("spd_logdet", "Example 2.4"), ("posreals_x_plus_inv", "Prop 2.3"),
                      ("posreals_neg_log", "Prop 2.4"), ("euclid_quad", "Prop 2.3"), ("euclid_split", "Prop 2.3")):
    _REGISTRY.append(_convexity(_key, _anchor))


@check("convexity", "Prop 2.4")
def nonconvex_detected(ctx):
    """The lower endpoint of ``ln det X [1, 2]`` is concave across ``det X = 1``."""
    f = cat.spd_logdet2(ctx.tol)
    return expect(rivf.convexity_check(f, ctx.rng("convexity", "nonconvex"), ctx.n("convexity")), FAIL,
                  "min(l, 2l) of an affine l is not convex")


@check("convexity", "Prop 2.2 (sublevel sets)")
def sublevel_logdet(ctx):
    return rivf.sublevel_convexity_check(cat.spd_logdet(ctx.tol), Interval(0.0, 5.0),
                                         ctx.rng("convexity", "sublevel_logdet"), ctx.n("convexity"))


@check("convexity", "Prop 2.2 (sublevel sets)")
def sublevel_posreals(ctx):
    rep = rivf.sublevel_convexity_check(cat.posreals_x_plus_inv(ctx.tol), Interval(3.0, 3.5),
                                        ctx.rng("convexity", "sublevel_posreals"), 2 * ctx.n("convexity"))
    if rep.details["vacuous"]:
        return CheckReport(rep.name, INCONCLUSIVE, details=rep.details)
    return rep


# -- optimization -----------------------------------------------------------------

def _solve_case(ctx, lam, want, name):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    res = riop.solve_scalarized(p, riop.SolverSettings(*lam), 3.0)
    r = abs(res.point - want)
    ok = r <= 1e-4 and res.iters < 200
    wit = [] if ok else [{"point": res.point, "want": want, "iters": res.iters, "residual": r}]
    return CheckReport(name, PASS if ok else FAIL, samples=1, tolerance=1e-4, witnesses=wit,
                       details={"result": res.to_dict(p.manifold), "want": want})


@check("solve", "Example 4.2")
def solve_posreals_upper_weight(ctx):
    return _solve_case(ctx, (1e-9, 1.0), 1.0, "solve_posreals_upper_weight")


@check("solve", "Prop 4.2")
def solve_posreals_equal_weights(ctx):
    return _solve_case(ctx, (1.0, 1.0), 1.0 / math.sqrt(2.0), "solve_posreals_equal_weights")


@check("solve", "Example 4.2")
def efficient_posreals_at_1(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    return riop.is_efficient_sampled(p, 1.0, ctx.rng("solve", "eff1"), ctx.n("efficiency"))


@check("solve", "Example 4.2")
def dominated_posreals_at_2(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.is_efficient_sampled(p, 2.0, ctx.rng("solve", "eff2"), 200)
    return expect(rep, FAIL, "f(1) = [1, 2] dominates f(2) = [2, 2.5]")


@check("solve", "Example 4.1")
def no_efficient_point_logdet(ctx):
    p = cat.problem("spd_logdet_riop", ctx.tol)
    rng = ctx.rng("solve", "logdet_riop")
    wit, smaller = [], 0
    x0s = p.sample(rng, ctx.n("points"))
    for X in x0s:
        rep = riop.is_efficient_sampled(p, X, rng, 100)
        if rep.failed:
            Y = p.manifold.point_from_coords(rep.witnesses[0]["x"]["coords"])
            smaller += np.linalg.det(Y) < np.linalg.det(X)
        else:
            wit.append({"x0": p.manifold.to_record(X), "residual": 1.0, "note": "no dominating sample"})
    ok = not wit and smaller == len(x0s)
    if not ok and not wit:
        wit = [{"note": "dominating witness without smaller determinant", "residual": 1.0}]
    return CheckReport("no_efficient_point_logdet", PASS if ok else FAIL, samples=len(x0s), witnesses=wit[:10],
                       details={"dominated": len(x0s) - len(wit), "witness_smaller_det": int(smaller)})


@check("solve", "Prop 4.1")
def prop41_posreals(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.check_prop41(p, ctx.rng("solve", "prop41_posreals"), 1000, x_init=3.0)
    lower = rep.details["components"]["lower"]["status"]
    return expect(rep, PASS, "lower endpoint has no minimizer; upper endpoint minimized uniquely at 1",
                  ok=lower != "converged" and rep.details["prop41b"].get("upper") == PASS)


@check("solve", "Prop 4.1")
def prop41_euclid_split(ctx):
    p = cat.problem("euclid_split", ctx.tol)
    return riop.check_prop41(p, ctx.rng("solve", "prop41_split"), 1000, x_init=np.array([3.0]))


@check("solve", "Prop 4.2")
def scalarized_optima_efficient(ctx):
    rng = ctx.rng("solve", "soundness")
    reps = []
    for key in ("posreals_x_plus_inv", "euclid_quad", "euclid_split"):
        p = cat.problem(key, ctx.tol)
        for x_init in p.sample(rng, 2):
            lam = rng.uniform(0.1, 2.0, size=2)
            res = riop.solve_scalarized(p, riop.SolverSettings(*lam), x_init)
            reps.append(riop.is_efficient_sampled(p, res.point, rng, ctx.n("efficiency")))
    return _all("scalarized_optima_efficient", reps)


# -- certificates -----------------------------------------------------------------

@check("certify", "Theorem 4.1(a)")
def necessary41_posreals_x1(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.certify_necessary_41(p, 1.0, ctx.rng("certify", "nec41_x1"), ctx.n("certify"))
    return expect(rep, PASS, "the [a, 0] branch must occur", ok=rep.details["branches"]["a0"] > 0)


@check("certify", "Theorem 4.1(a)")
def necessary41_posreals_x2(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.certify_necessary_41(p, 2.0, ctx.rng("certify", "nec41_x2"), ctx.n("certify"))
    return expect(rep, FAIL, "f'(2, log_2 x) < 0 for x near 1")


@check("certify", "Remark 4.1")
def necessary41_cannot_refute_logdet(ctx):
    p = cat.problem("spd_logdet_riop", ctx.tol)
    rng = ctx.rng("certify", "nec41_logdet")
    X = p.sample(rng, 1)[0]
    nec = riop.certify_necessary_41(p, X, rng, ctx.n("certify"))
    eff = riop.is_efficient_sampled(p, X, rng, ctx.n("certify"))
    return expect(nec, PASS, "necessary condition holds through the [a, 0] branch although X is dominated",
                  ok=eff.failed)


@check("certify", "Theorem 4.1(b)")
def sufficient41_posreals_x1(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.certify_sufficient_41(p, 1.0, ctx.rng("certify", "suf41_x1"), ctx.n("certify"))
    return expect(rep, INCONCLUSIVE, "[a, 0] samples block the sufficient condition at an efficient point")


@check("certify", "Theorem 4.1(b)")
def sufficient41_euclid_quad(ctx):
    p = cat.problem("euclid_quad", ctx.tol)
    return riop.certify_sufficient_41(p, np.zeros(2), ctx.rng("certify", "suf41_quad"), ctx.n("certify"))


@check("certify", "Theorem 4.1(b)")
def sufficient41_posreals_x2(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    return expect(riop.certify_sufficient_41(p, 2.0, ctx.rng("certify", "suf41_x2"), ctx.n("certify")), FAIL,
                  "strictly negative derivative toward 1")


@check("certify", "Theorem 4.2(a)")
def necessary42_posreals_x1(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    return riop.certify_42(p, 1.0, ctx.rng("certify", "nec42_x1"), ctx.n("certify"), "necessary")


@check("certify", "Theorem 4.2(a)")
def necessary42_posreals_x2(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    return expect(riop.certify_42(p, 2.0, ctx.rng("certify", "nec42_x2"), ctx.n("certify"), "necessary"), FAIL,
                  "0 outside f_G(2)(log_2 x) for x near 1")


@check("certify", "Theorem 4.2(b)")
def sufficient42_posreals_x1(ctx):
    p = cat.problem("posreals_x_plus_inv", ctx.tol)
    rep = riop.certify_42(p, 1.0, ctx.rng("certify", "suf42_x1"), ctx.n("certify"), "sufficient")
    return expect(rep, INCONCLUSIVE, "the excluded right endpoint is the only obstacle",
                  ok=rep.details.get("excluded_endpoint_sole_blocker", False))


def _consistency(key):
    def fn(ctx):
        return riop.consistency_check(cat.problem(key, ctx.tol), ctx.rng("certify", "consistency_" + key))
    return fn


for _key in cat.PROBLEMS:
    _REGISTRY.append(Check("riop_consistency_" + _key, "certify", "Theorems 4.1, 4.2", _consistency(_key)))


# -- variational inequalities -----------------------------------------------------

@check("vi", "Example 4.2")
def apply_posreals_grad(ctx):
    val = rivi.apply(cat.field("posreals_grad", ctx.tol), 1.0, 1.0)
    r = iv.hausdorff(val, Interval(0.0, 1.0))
    wit = [] if r <= 1e-12 else [{"value": val, "residual": r}]
    return CheckReport("apply_posreals_grad", FAIL if wit else PASS, samples=1, witnesses=wit, details={"value": val})


@check("vi", "Section 4 (RSIVIP)")
def stampacchia_euclid_origin(ctx):
    return rivi.stampacchia_residual(cat.field("euclid_quad_grad", ctx.tol), np.zeros(2),
                                     ctx.rng("vi", "stamp_euclid"), ctx.n("certify"))


@check("vi", "Section 4 (RSIVIP)")
def stampacchia_posreals_x1(ctx):
    rep = rivi.stampacchia_residual(cat.field("posreals_grad", ctx.tol), 1.0, ctx.rng("vi", "stamp_x1"),
                                    ctx.n("certify"))
    return expect(rep, FAIL, "y < 1 gives [ln y, 0]", ok=all(w["a0_form"] for w in rep.witnesses))


@check("vi", "Section 4 (RSIVIP)")
def stampacchia_posreals_x2(ctx):
    return expect(rivi.stampacchia_residual(cat.field("posreals_grad", ctx.tol), 2.0, ctx.rng("vi", "stamp_x2"),
                                            ctx.n("certify")), FAIL, "x0 = 2 is not a solution")


@check("vi", "Section 4 (RMIVIP)")
def minty_euclid_origin(ctx):
    return rivi.minty_residual(cat.field("euclid_quad_grad", ctx.tol), np.zeros(2), ctx.rng("vi", "minty_euclid"),
                               ctx.n("certify"))


@check("vi", "Section 4 (RMIVIP)")
def minty_euclid_off_center(ctx):
    T = cat.field("euclid_quad_grad", ctx.tol)
    ys = [np.zeros(2), np.array([0.5, 0.0])]
    rep = rivi.minty_residual(T, np.array([1.0, 0.0]), ys=ys)
    ok = rep.failed and iv.hausdorff(rep.witnesses[0]["value"], Interval(-1.0, -0.5)) <= 1e-12
    return expect(rep, FAIL, "y = (0.5, 0) gives [-1, -0.5]", ok=ok)


@check("vi", "Section 4 (RMIVIP)")
def minty_zero_field(ctx):
    T = cat.field("zero_r2", ctx.tol)
    rng = ctx.rng("vi", "minty_zero")
    return _all("minty_zero_field", [rivi.minty_residual(T, x0, rng, 50) for x0 in T.sample(rng, 5)])


@check("vi", "Def 4.2")
def pseudomonotone_euclid(ctx):
    return rivi.pseudomonotone_check(cat.field("euclid_quad_grad", ctx.tol), ctx.rng("vi", "pm_euclid"))


@check("vi", "Def 4.2")
def pseudomonotone_sign_flip(ctx):
    T = cat.field("sign_flip_r1", ctx.tol)
    grid = [np.array([float(a)]) for a in (-2, -1, 1, 2)]
    pairs = [(x, y) for x in grid for y in grid if x[0] != y[0]]
    return expect(rivi.pseudomonotone_check(T, None, pairs=pairs), FAIL, "(x, y) = (-1, 1) violates the implication")


@check("vi", "Def 4.2")
def pseudomonotone_zero(ctx):
    return rivi.pseudomonotone_check(cat.field("zero_r2", ctx.tol), ctx.rng("vi", "pm_zero"))


@check("vi", "Def 4.3")
def pseudoconvex_posreals(ctx):
    f = cat.posreals_x_plus_inv(ctx.tol)
    grid = [2.0**k for k in range(-3, 4)]
    pairs = [(x, y) for x in grid for y in grid if x != y]
    return _all("pseudoconvex_posreals", [rivi.pseudoconvex_check(f, None, pairs=pairs),
                                          rivi.pseudoconvex_check(f, ctx.rng("vi", "pc_posreals"))])


@check("vi", "Def 4.3")
def pseudoconvex_euclid(ctx):
    return rivi.pseudoconvex_check(cat.euclid_quad(ctx.tol), ctx.rng("vi", "pc_euclid"))


@check("vi", "Def 4.3")
def pseudoconvex_flat_fails(ctx):
    f = cat.flat_r2_frac(ctx.tol)
    f.sampler = lambda rng, n: [0.3 * rng.standard_normal(2) for _ in range(n)]
    return expect(rivi.pseudoconvex_check(f, ctx.rng("vi", "pc_flat"), 200), FAIL, "violating pair near the origin")


@check("vi", "Lemma 3.2")
def gateaux_field_agreement(ctx):
    """Reconstructed ``f_G`` maps reproduce the directional derivative."""
    rng = ctx.rng("vi", "gateaux_field")
    res, wit = [], []
    for key in ("spd_logdet2", "posreals_x_plus_inv", "euclid_split"):
        f = cat.rivf(key, ctx.tol)
        f.gateaux_form = None  # force the reconstruction route
        T = rivi.gateaux_field(f)
        for x in f.sample(rng, 10):
            v = f.manifold.sample_tangent(rng, x, 1.0)
            r = iv.hausdorff(rivi.apply(T, x, v), rivf.dir_deriv(f, x, v).value)
            res.append(r)
            if r > 1e-6:
                wit.append({"function": key, "x": f.manifold.to_record(x), "residual": r})
    return _residual_check("gateaux_field_agreement", res, 1e-6, wit)


@check("vi", "Prop 4.3")
def bridge_prop43_euclid(ctx):
    T = cat.field("euclid_quad_grad", ctx.tol)
    rep = rivi.bridge_prop43(T, ctx.rng("vi", "p43_euclid"), x0s=[np.zeros(2)])
    return expect(rep, PASS, "x0 = 0 solves both problems", ok=rep.details["stampacchia_solutions"] == 1)


@check("vi", "Prop 4.3")
def bridge_prop43_gated(ctx):
    T = cat.field("sign_flip_r1", ctx.tol)
    return expect(rivi.bridge_prop43(T, ctx.rng("vi", "p43_gate"), 5), INCONCLUSIVE,
                  "non-pseudomonotone field is gated")


@check("vi", "Theorem 4.3")
def bridge_thm43_euclid(ctx):
    return rivi.bridge_thm43(cat.problem("euclid_quad", ctx.tol), np.zeros(2), ctx.rng("vi", "t43_euclid"))


@check("vi", "Theorem 4.3")
def bridge_thm43_posreals_gated(ctx):
    rep = rivi.bridge_thm43(cat.problem("posreals_x_plus_inv", ctx.tol), 1.0, ctx.rng("vi", "t43_posreals"))
    return expect(rep, INCONCLUSIVE, "[a, 0] form occurs at x0 = 1, so the theorem does not apply")


@check("vi", "Theorem 4.3")
def bridge_thm43_shifted_square(ctx):
    M = Euclidean(1, ctx.tol)
    f = rivf.RIVF(M, lambda x: float((x[0] - 2.0) ** 2), lambda x: float((x[0] - 2.0) ** 2 + 1.0),
                  name="shifted_square", sampler=lambda rng, n: [2.0 + 2.0 * rng.standard_normal(1) for _ in range(n)],
                  claimed_convex=True, claimed_gateaux=True,
                  gateaux_form=lambda x: (2.0 * (x - 2.0), 2.0 * (x - 2.0)))
    return rivi.bridge_thm43(riop.RIOProblem(f), np.array([2.0]), ctx.rng("vi", "t43_square"))


@check("vi", "Theorem 4.4")
def bridge_thm44_euclid(ctx):
    return rivi.bridge_thm44(cat.problem("euclid_quad", ctx.tol), np.zeros(2), ctx.rng("vi", "t44_euclid"))


@check("vi", "Theorem 4.4")
def bridge_thm44_gated(ctx):
    rep = rivi.bridge_thm44(cat.problem("posreals_x_plus_inv", ctx.tol), 2.0, ctx.rng("vi", "t44_gate"))
    return expect(rep, INCONCLUSIVE, "x0 = 2 fails Stampacchia, so nothing is asserted")


def _trial_setup(rng, tol):
    p, seg = cat.random_quadratic_problem(rng, 2, tol)
    if rng.uniform() < 0.5:
        t = float(rng.uniform())
        x0 = (1.0 - t) * seg[0] + t * seg[-1]
    else:
        x0 = p.sample(rng, 1)[0]
    return p, x0


def _random_bridge(name, run):
    def fn(ctx):
        rng = ctx.rng("vi", name)
        tally = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        wit = []
        for i in range(ctx.n("trials")):
            rep = run(rng, ctx.tol)
            tally[rep.verdict] += 1
            if rep.failed:
                wit.append(dict(rep.witnesses[0], trial=i))
        return CheckReport(name, FAIL if wit else PASS, samples=ctx.n("trials"), witnesses=wit[:10],
                           details={"verdicts": tally, "counterexamples": len(wit)})
    return fn


def _trial_prop43(rng, tol):
    p, x0 = _trial_setup(rng, tol)
    T = rivi.gateaux_field(p.f)
    return rivi.bridge_prop43(T, rng, x0s=[x0], n=30, gate_pairs=30)


def _trial_thm43(rng, tol):
    p, x0 = _trial_setup(rng, tol)
    return rivi.bridge_thm43(p, x0, rng, 30)


def _trial_thm44(rng, tol):
    p, x0 = _trial_setup(rng, tol)
    return rivi.bridge_thm44(p, x0, rng, 30, gate_pairs=30)


_REGISTRY.append(Check("bridge_prop43_random", "vi", "Prop 4.3", _random_bridge("bridge_prop43_random", _trial_prop43)))
_REGISTRY.append(Check("bridge_thm43_random", "vi", "Theorem 4.3", _random_bridge("bridge_thm43_random", _trial_thm43)))
_REGISTRY.append(Check("bridge_thm44_random", "vi", "Theorem 4.4", _random_bridge("bridge_thm44_random", _trial_thm44)))


# -- running ----------------------------------------------------------------------

def _with_replay(rep: CheckReport, seed: int) -> CheckReport:
    for w in rep.witnesses:
        w.setdefault("replay", {"kind": "check", "check": rep.name, "seed": seed})
    return rep


def run_check(c: Check, ctx: Context) -> dict:
    t0 = time.perf_counter()
    try:
        rep = c.fn(ctx)
    except (riop.SolverError, rivf.NonConvergence) as err:
        rep = CheckReport(c.name, FAIL, witnesses=[{"error": type(err).__name__, "message": str(err),
                                                    "residual": float("nan")}],
                          details={"solver_error": True})
    rep.name = c.name
    rep.anchor = c.anchor
    rep = _with_replay(rep, ctx.cfg.seed)
    out = rep.to_dict()
    out["group"] = c.group
    out["residual"] = max([w.get("residual", 0.0) for w in out["witnesses"] if isinstance(w.get("residual"), float)]
                          or [0.0])
    out["wall_time"] = time.perf_counter() - t0
    return out


def _summary(records):
    counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
    for r in records:
        counts[r["verdict"]] += 1
    counts["total"] = len(records)
    return counts


def _select(cfg: RunConfig) -> list[Check]:
    if cfg.checks is not None:
        wanted = set(cfg.checks)
        return [c for c in _REGISTRY if c.name in wanted]
    if cfg.command == "suite":
        return list(_REGISTRY)
    return [c for c in _REGISTRY if c.group == cfg.command]


def _solve_command(cfg: RunConfig, ctx: Context):
    key = cfg.problem or "posreals_x_plus_inv"
    p = cat.problem(key, cfg.tolerances)
    M = p.manifold
    x_init = p.sample(ctx.rng("solve", "x_init"), 1)[0] if cfg.x_init is None else M.point_from_coords(cfg.x_init)
    settings = riop.SolverSettings(cfg.lam1, cfg.lam2)
    t0 = time.perf_counter()
    try:
        res = riop.solve_scalarized(p, settings, x_init)
    except (riop.SolverError, rivf.NonConvergence, rivf.DomainError) as err:
        last = getattr(err, "point", None)
        return {"problem": key, "status": type(err).__name__, "message": str(err),
                "last_point": None if last is None else M.to_record(last),
                "wall_time": time.perf_counter() - t0}, EXIT_SOLVER
    rng = ctx.rng("solve", "certificates")
    certs = [riop.certify_necessary_41(p, res.point, rng, ctx.n("certify")),
             riop.certify_sufficient_41(p, res.point, rng, ctx.n("certify")),
             riop.certify_42(p, res.point, rng, ctx.n("certify"), "necessary"),
             riop.is_efficient_sampled(p, res.point, rng, ctx.n("efficiency"))]
    out = {"problem": key, "status": "converged", **res.to_dict(M),
           "certificates": [c.to_dict() for c in certs], "wall_time": time.perf_counter() - t0}
    return out, EXIT_FAIL if certs[-1].failed else EXIT_OK


def _certify_command(cfg: RunConfig, ctx: Context):
    key = cfg.problem or "posreals_x_plus_inv"
    p = cat.problem(key, cfg.tolerances)
    M = p.manifold
    if cfg.x0 is not None:
        x0 = M.point_from_coords(cfg.x0)
    elif p.reference.get("efficient"):
        x0 = p.reference["efficient"][0]
    else:
        x0 = p.sample(ctx.rng("certify", "x0"), 1)[0]
    rng = ctx.rng("certify", "point")
    n = ctx.n("certify")
    certs = [riop.certify_necessary_41(p, x0, rng, n), riop.certify_sufficient_41(p, x0, rng, n),
             riop.certify_42(p, x0, rng, n, "necessary"), riop.certify_42(p, x0, rng, n, "sufficient"),
             riop.is_efficient_sampled(p, x0, rng, n)]
    return {"problem": key, "x0": M.to_record(x0), "certificates": [c.to_dict() for c in certs]}


def _replay(cfg: RunConfig, ctx: Context) -> list[dict]:
    payload = cfg.replay
    kind = payload.get("kind")
    if kind == "law":
        rep = laws.replay_law(payload, cfg.tolerances.law_tol)
        return [run_check(Check(rep.name, "laws", laws.LAWS[rep.name][1], lambda _ctx: rep), ctx)]
    if kind == "check":
        byname = {c.name: c for c in _REGISTRY}
        if payload.get("check") not in byname:
            raise ConfigError(f"unknown check in replay payload: {payload.get('check')!r}")
        seed = int(payload.get("seed", cfg.seed))
        sub = Context(RunConfig(cfg.command, seed, cfg.samples, cfg.tolerances))
        return [run_check(byname[payload["check"]], sub)]
    raise ConfigError(f"replay payload kind {kind!r} is not replayable")


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Execute a config; returns ``(report, exit_code)``."""
    ctx = Context(cfg)
    t0 = time.perf_counter()
    report = {"schema": SCHEMA, "command": cfg.command, "config": cfg.to_dict()}
    status = EXIT_OK
    if cfg.command == "catalog":
        report["catalog"] = cat.catalog_list()
        records = []
    elif cfg.command == "replay":
        records = _replay(cfg, ctx)
    else:
        records = [run_check(c, ctx) for c in _select(cfg)]
        if cfg.command == "solve":
            report["solve"], status = _solve_command(cfg, ctx)
        if cfg.command == "certify":
            report["certify"] = _certify_command(cfg, ctx)
    report["checks"] = records
    report["summary"] = _summary(records)
    report["wall_time"] = time.perf_counter() - t0
    if status == EXIT_OK and report["summary"][FAIL]:
        status = EXIT_FAIL
    report["exit_code"] = status
    return to_jsonable(report), status


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, allow_nan=True)


def strip_timing(obj):
    """Drop every ``wall_time`` field; what remains is the deterministic part of a report."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "wall_time"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj
