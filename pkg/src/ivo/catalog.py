"""Named functions, problems, fields and set fixtures used by the harness and tests.

Each entry is built fresh on request so that tolerance blocks can differ
between runs.  ``catalog_list`` returns the entries in a fixed order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .manifolds import SPD, Euclidean, PositiveReals
from .riop import RIOProblem
from .rivf import RIVF
from .rivi import IntervalField, closed_form_field

# Labels of the published results each entry illustrates; reports carry them
# so every check can be traced back to its source statement.
ANCHORS = {
    "flat_r2_frac": "Example 3.3",
    "spd_logdet": "Example 2.4",
    "spd_logdet2": "Example 3.4",
    "spd_logdet_riop": "Example 4.1",
    "posreals_x_plus_inv": "Example 4.2",
    "euclid_quad": "synthetic",
    "euclid_split": "synthetic",
    "posreals_neg_log": "synthetic",
    "spd_det_level": "Example 2.3",
}


# -- samplers ----------------------------------------------------------------

def _gauss(n_dim, spread=1.0):
    def sample(rng, n):
        return [spread * rng.standard_normal(n_dim) for _ in range(n)]
    return sample


def _posreals(spread=1.0):
    def sample(rng, n):
        return [float(math.exp(spread * rng.standard_normal())) for _ in range(n)]
    return sample


def _posreals_between(a, b):
    """``x = exp(u)`` with ``u`` uniform on ``[a, b]``."""
    def sample(rng, n):
        return [float(math.exp(rng.uniform(a, b))) for _ in range(n)]
    return sample


def _spd_with_logdet(M, a, b):
    """SPD points with ``ln det`` uniform on ``[a, b]``, shape from ``M.sample_point``."""
    def sample(rng, n):
        out = []
        for _ in range(n):
            X = M.sample_point(rng, 0.5)
            target = rng.uniform(a, b)
            X = X * math.exp((target - math.log(np.linalg.det(X))) / M.n)
            out.append(0.5 * (X + X.T))
        return out
    return sample


def _logdet(X):
    sign, ld = np.linalg.slogdet(np.asarray(X, dtype=float))
    if sign <= 0:
        raise ValueError("matrix is not positive definite")
    return float(ld)


def _trace_inv(X, V):
    return float(np.trace(np.linalg.solve(X, V)))


# -- functions ---------------------------------------------------------------

def flat_r2_frac(tol: Tolerances = DEFAULT) -> RIVF:
    """``g [1, 2]`` with ``g = x1 x2^2 / (x1^4 + x2^2)`` away from 0 and ``[0, 0]`` at 0."""
    M = Euclidean(2, tol)

    def g(x):
        x1, x2 = float(x[0]), float(x[1])
        den = x1**4 + x2**2
        return 0.0 if den == 0.0 else x1 * x2**2 / den

    def derivative(x, v):
        if np.any(np.asarray(x) != 0.0):
            return None
        if v[1] == 0.0:
            return (0.0, 0.0)
        return (min(v[0], 2.0 * v[0]), max(v[0], 2.0 * v[0]))

    return RIVF(
        M,
        lambda x: min(g(x), 2.0 * g(x)),
        lambda x: max(g(x), 2.0 * g(x)),
        name="flat_r2_frac",
        sampler=_gauss(2, 0.5),
        claimed_gateaux=True,
        derivative=derivative,
        description="g(x) [1, 2] with g = x1 x2^2/(x1^4 + x2^2) on R^2: Gateaux differentiable at 0",
        anchor=ANCHORS["flat_r2_frac"],
    )


def spd_logdet(tol: Tolerances = DEFAULT) -> RIVF:
    """``[0, ln det X]`` on ``{det X > 1}`` in SPD(2)."""
    M = SPD(2, tol)

    def dom(X):
        return np.linalg.det(np.asarray(X, dtype=float)) > 1.0

    return RIVF(
        M,
        lambda X: 0.0,
        _logdet,
        dom,
        name="spd_logdet",
        sampler=_spd_with_logdet(M, 0.05, 3.0),
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda X, V: (0.0, _trace_inv(X, V)),
        gateaux_form=lambda X: (np.zeros_like(np.asarray(X, dtype=float)), np.array(X, dtype=float)),
        description="[0, ln det X] on SPD(2) matrices with det X > 1",
        anchor=ANCHORS["spd_logdet"],
    )


def spd_logdet2(tol: Tolerances = DEFAULT) -> RIVF:
    """Hull of ``ln det X`` and ``2 ln det X`` on all of SPD(2)."""
    M = SPD(2, tol)

    def derivative(X, V):
        ld, tr = _logdet(X), _trace_inv(X, V)
        s = ld if ld != 0.0 else tr
        return (tr, 2.0 * tr) if s >= 0 else (2.0 * tr, tr)

    return RIVF(
        M,
        lambda X: min(_logdet(X), 2.0 * _logdet(X)),
        lambda X: max(_logdet(X), 2.0 * _logdet(X)),
        name="spd_logdet2",
        sampler=lambda rng, n: [M.sample_point(rng, 0.5) for _ in range(n)],
        claimed_gateaux=True,
        derivative=derivative,
        gateaux_form=lambda X: (np.array(X, dtype=float), 2.0 * np.array(X, dtype=float)),
        description="ln det X [1, 2] on SPD(2), endpoints swapping at det X = 1",
        anchor=ANCHORS["spd_logdet2"],
    )


def posreals_x_plus_inv(tol: Tolerances = DEFAULT) -> RIVF:
    """``[x, x + 1/x]`` on the positive reals."""
    M = PositiveReals(tol)
    return RIVF(
        M,
        lambda x: float(x),
        lambda x: float(x) + 1.0 / float(x),
        lambda x: float(x) > 0.0,
        name="posreals_x_plus_inv",
        sampler=_posreals(1.0),
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda x, v: (float(v), float(v) * (1.0 - 1.0 / float(x) ** 2)),
        gateaux_form=lambda x: (float(x) ** 2, float(x) ** 2 - 1.0),
        description="[x, x + 1/x] on the positive reals; x = 1 is efficient",
        anchor=ANCHORS["posreals_x_plus_inv"],
    )


def posreals_neg_log(tol: Tolerances = DEFAULT) -> RIVF:
    """``[0, -ln x]`` on ``(0, 1)``, where it is well formed."""
    M = PositiveReals(tol)
    return RIVF(
        M,
        lambda x: 0.0,
        lambda x: -math.log(float(x)),
        lambda x: 0.0 < float(x) < 1.0,
        name="posreals_neg_log",
        sampler=_posreals_between(-3.0, -0.05),
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda x, v: (0.0, -float(v) / float(x)),
        gateaux_form=lambda x: (0.0, -float(x)),
        description="[0, -ln x] on (0, 1): geodesically affine upper endpoint",
        anchor=ANCHORS["posreals_neg_log"],
    )


def euclid_quad(tol: Tolerances = DEFAULT) -> RIVF:
    """``[|x|^2, 2|x|^2]`` on R^2."""
    M = Euclidean(2, tol)
    return RIVF(
        M,
        lambda x: float(np.dot(x, x)),
        lambda x: 2.0 * float(np.dot(x, x)),
        name="euclid_quad",
        sampler=_gauss(2, 1.0),
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda x, v: (2.0 * float(np.dot(x, v)), 4.0 * float(np.dot(x, v))),
        gateaux_form=lambda x: (2.0 * np.asarray(x, dtype=float), 4.0 * np.asarray(x, dtype=float)),
        description="[|x|^2, 2|x|^2] on R^2; unique efficient point 0",
        anchor=ANCHORS["euclid_quad"],
    )


def euclid_split(tol: Tolerances = DEFAULT) -> RIVF:
    """``[(x-1)^2, 2(x+1)^2 + 8]`` on R: components minimized at different points.

    The upper minus the lower endpoint is ``(x+3)^2``, so the pair is well
    formed everywhere; the efficient set is ``[-1, 1]``.
    """
    M = Euclidean(1, tol)
    return RIVF(
        M,
        lambda x: float((x[0] - 1.0) ** 2),
        lambda x: float(2.0 * (x[0] + 1.0) ** 2 + 8.0),
        name="euclid_split",
        sampler=_gauss(1, 2.0),
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda x, v: (2.0 * (x[0] - 1.0) * v[0], 4.0 * (x[0] + 1.0) * v[0]),
        gateaux_form=lambda x: (np.array([2.0 * (x[0] - 1.0)]), np.array([4.0 * (x[0] + 1.0)])),
        description="[(x-1)^2, 2(x+1)^2 + 8] on R; efficient set [-1, 1]",
        anchor=ANCHORS["euclid_split"],
    )


def quadratic_pair(m1, m2, tol: Tolerances = DEFAULT) -> RIVF:
    """``[|x - m1|^2, 2|x - m2|^2 + 2|m1 - m2|^2]``; efficient set is the segment ``[m1, m2]``.

    ``|x - m1|^2 <= 2|x - m2|^2 + 2|m2 - m1|^2`` keeps the pair well formed.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    c = 2.0 * float(np.dot(m1 - m2, m1 - m2))
    M = Euclidean(len(m1), tol)
    spread = 1.0 + float(np.linalg.norm(m1 - m2))
    return RIVF(
        M,
        lambda x: float(np.dot(x - m1, x - m1)),
        lambda x: 2.0 * float(np.dot(x - m2, x - m2)) + c,
        name="quadratic_pair",
        sampler=lambda rng, n: [0.5 * (m1 + m2) + spread * rng.standard_normal(len(m1)) for _ in range(n)],
        claimed_convex=True,
        claimed_gateaux=True,
        derivative=lambda x, v: (2.0 * float(np.dot(x - m1, v)), 4.0 * float(np.dot(x - m2, v))),
        gateaux_form=lambda x: (2.0 * (np.asarray(x) - m1), 4.0 * (np.asarray(x) - m2)),
        description="pair of shifted quadratics with a segment of efficient points",
    )


FUNCTIONS = {
    "flat_r2_frac": flat_r2_frac,
    "spd_logdet": spd_logdet,
    "spd_logdet2": spd_logdet2,
    "posreals_x_plus_inv": posreals_x_plus_inv,
    "posreals_neg_log": posreals_neg_log,
    "euclid_quad": euclid_quad,
    "euclid_split": euclid_split,
}


def rivf(key: str, tol: Tolerances = DEFAULT) -> RIVF:
    try:
        return FUNCTIONS[key](tol)
    except KeyError:
        raise KeyError(f"unknown function {key!r}; known: {sorted(FUNCTIONS)}") from None


# -- problems ----------------------------------------------------------------

def problem(key: str, tol: Tolerances = DEFAULT) -> RIOProblem:
    if key == "spd_logdet_riop":
        f = spd_logdet(tol)
        f.anchor = ANCHORS["spd_logdet_riop"]
        return RIOProblem(f, name=key, reference={"no_efficient_point": True})
    f = rivf(key, tol)
    ref = {
        "posreals_x_plus_inv": {"efficient": [1.0]},
        "euclid_quad": {"efficient": [np.zeros(2)]},
        "euclid_split": {"efficient": [np.array([-1.0]), np.array([0.0]), np.array([1.0])]},
    }.get(key, {})
    return RIOProblem(f, name=key, reference=ref)


PROBLEMS = ("posreals_x_plus_inv", "spd_logdet_riop", "euclid_quad", "euclid_split", "posreals_neg_log")


def random_quadratic_problem(rng, dim: int = 2, tol: Tolerances = DEFAULT) -> tuple[RIOProblem, list]:
    """A random :func:`quadratic_pair` problem and points of its efficient segment."""
    m1 = rng.standard_normal(dim)
    m2 = rng.standard_normal(dim)
    f = quadratic_pair(m1, m2, tol)
    seg = [(1.0 - t) * m1 + t * m2 for t in (0.0, 0.25, 0.5, 0.75, 1.0)]
    return RIOProblem(f, name="quadratic_pair", reference={"efficient": seg}), seg


# -- fields ------------------------------------------------------------------

def _sign_flip(tol):
    M = Euclidean(1, tol)
    return closed_form_field(M, lambda x: (-np.asarray(x, dtype=float), -2.0 * np.asarray(x, dtype=float)),
                             "sign_flip_r1", sampler=_gauss(1, 1.5))


def _zero(tol):
    M = Euclidean(2, tol)
    return closed_form_field(M, lambda x: (np.zeros(2), np.zeros(2)), "zero_r2", sampler=_gauss(2, 1.0))


def _from_rivf(key):
    def build(tol):
        f = rivf(key, tol)
        return closed_form_field(f.manifold, f.gateaux_form, f"{key}:f_G", f.domain, f.sampler)
    return build


def quadratic_field(m1, m2, tol: Tolerances = DEFAULT) -> IntervalField:
    f = quadratic_pair(m1, m2, tol)
    return closed_form_field(f.manifold, f.gateaux_form, "quadratic_pair:f_G", f.domain, f.sampler)


FIELDS = {
    "euclid_quad_grad": _from_rivf("euclid_quad"),
    "posreals_grad": _from_rivf("posreals_x_plus_inv"),
    "sign_flip_r1": _sign_flip,
    "zero_r2": _zero,
}


def field(key: str, tol: Tolerances = DEFAULT) -> IntervalField:
    try:
        return FIELDS[key](tol)
    except KeyError:
        raise KeyError(f"unknown field {key!r}; known: {sorted(FIELDS)}") from None


# -- set fixtures ------------------------------------------------------------

@dataclass
class SetFixture:
    manifold: object
    contains: object
    sampler: object
    name: str
    description: str
    anchor: str = ""


def spd_det_level(a: float = 2.0, tol: Tolerances = DEFAULT) -> SetFixture:
    """``{X in SPD(2) : det X = a}`` with relative membership tolerance 1e-9."""
    M = SPD(2, tol)
    sample = _spd_with_logdet(M, math.log(a), math.log(a))
    return SetFixture(
        M,
        lambda X: abs(np.linalg.det(np.asarray(X, dtype=float)) - a) <= 1e-9 * a,
        sample,
        "spd_det_level",
        f"SPD(2) matrices with det X = {a:g}",
        ANCHORS["spd_det_level"],
    )


# -- listing -----------------------------------------------------------------

def catalog_list() -> list[dict]:
    """Entries in a fixed order: functions, then problems, fields and set fixtures."""
    out = []
    for key, build in FUNCTIONS.items():
        f = build(DEFAULT)
        out.append({"key": key, "kind": "function", "model": f.manifold.name, "params": f.manifold.params,
                    "description": f.description, "anchor": f.anchor})
    p = problem("spd_logdet_riop")
    out.append({"key": "spd_logdet_riop", "kind": "problem", "model": p.manifold.name, "params": p.manifold.params,
                "description": "minimize [0, ln det X] over det X > 1: no efficient point", "anchor": p.f.anchor})
    for key, build in FIELDS.items():
        T = build(DEFAULT)
        out.append({"key": key, "kind": "field", "model": T.manifold.name, "params": T.manifold.params,
                    "description": f"closed-form interval field {T.name}", "anchor": "synthetic"})
    s = spd_det_level()
    out.append({"key": s.name, "kind": "set", "model": s.manifold.name, "params": s.manifold.params,
                "description": s.description, "anchor": s.anchor})
    return out
