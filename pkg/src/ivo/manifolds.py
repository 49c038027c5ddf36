"""Four Hadamard manifold models behind one interface.

Points and tangent vectors are plain numpy values:

========================  ==========================  ===========================
model                     point                       tangent vector
========================  ==========================  ===========================
``Euclidean(n)``          ``(n,)`` array              ``(n,)`` array
``PositiveReals()``       positive float              float
``SPD(n)``                symmetric ``(n, n)`` array  symmetric ``(n, n)`` array
``Hyperbolic(n)``         ``(n+1,)`` on hyperboloid   Minkowski-orthogonal vector
========================  ==========================  ===========================

SPD uses the affine-invariant metric ``Tr(X^-1 U X^-1 V)``, the positive reals
the metric ``u v / x^2`` and the hyperboloid the restricted Minkowski product.
"""
from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT, Tolerances
from .report import FAIL, PASS, CheckReport

__all__ = [
    "ManifoldError",
    "Manifold",
    "Euclidean",
    "PositiveReals",
    "SPD",
    "Hyperbolic",
    "minkowski",
    "spd_funm",
    "from_record",
    "make_manifold",
]


class ManifoldError(ValueError):
    """Invalid point, invalid tangent vector, or a failed matrix function."""


class Manifold:
    name = "manifold"

    def __init__(self, tol: Tolerances = DEFAULT):
        self.tol = tol

    # -- subclass hooks -------------------------------------------------------
    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {}

    def inner(self, x, u, v) -> float:
        raise NotImplementedError

    def exp(self, x, v):
        raise NotImplementedError

    def log(self, x, y):
        raise NotImplementedError

    def project(self, x, w):
        """Orthogonal projection of an ambient vector onto the tangent space at x."""
        raise NotImplementedError

    def residuals(self, x) -> dict[str, float]:
        """Invariant residuals of a point, each compared against its tolerance."""
        raise NotImplementedError

    def _random_point(self, rng, spread):
        raise NotImplementedError

    def _ambient_basis(self, x) -> list:
        raise NotImplementedError

    def _random_ambient(self, rng, x):
        raise NotImplementedError

    # -- shared ---------------------------------------------------------------
    def norm(self, x, v) -> float:
        return math.sqrt(max(self.inner(x, v, v), 0.0))

    def zero(self, x):
        return 0.0 * np.asarray(x, dtype=float) if np.ndim(x) else 0.0

    def dist(self, x, y) -> float:
        return self.norm(x, self.log(x, y))

    def geodesic(self, x, y, t: float):
        if not 0.0 <= t <= 1.0:
            raise ManifoldError(f"geodesic parameter must lie in [0, 1], got {t}")
        if t == 0.0:
            return _copy(x)
        if t == 1.0:
            return _copy(y)
        return self.exp(x, t * self.log(x, y))

    def validate(self, x) -> CheckReport:
        try:
            res = self.residuals(x)
        except (ValueError, np.linalg.LinAlgError) as err:
            return CheckReport("validate", FAIL, samples=1, witnesses=[{"invariant": "shape", "error": str(err)}])
        bad = [{"invariant": k, "residual": r, "tolerance": tol} for k, (r, tol) in res.items() if not r <= tol]
        return CheckReport(
            "validate",
            FAIL if bad else PASS,
            samples=1,
            witnesses=bad,
            details={k: r for k, (r, _) in res.items()},
        )

    def check_point(self, x):
        rep = self.validate(x)
        if rep.failed:
            raise ManifoldError(f"invalid {self.name} point: {rep.witnesses}")
        return x

    def sample_point(self, rng: np.random.Generator, spread: float = 1.0):
        if spread <= 0:
            raise ValueError("spread must be positive")
        return self._random_point(rng, spread)

    def sample_tangent(self, rng: np.random.Generator, x, radius: float = 1.0, exact: bool = False):
        """Isotropic tangent vector at ``x`` with norm ``<= radius`` (``== radius`` if exact)."""
        if radius <= 0:
            raise ValueError("radius must be positive")
        while True:
            v = self.project(x, self._random_ambient(rng, x))
            nv = self.norm(x, v)
            if nv > 1e-12:
                break
        r = radius if exact else radius * rng.uniform()
        return v * (r / nv)

    def tangent_basis(self, x, mix: np.ndarray | None = None) -> list:
        """Orthonormal basis of the tangent space at ``x`` under the point's metric.

        Built by Gram-Schmidt over projected ambient directions.  ``mix`` is an
        optional orthogonal matrix recombining those directions first, which
        yields a generic (rotated) basis.
        """
        cands = [self.project(x, w) for w in self._ambient_basis(x)]
        if mix is not None:
            cands = [sum(m * c for m, c in zip(row, cands)) for row in np.asarray(mix)]
        basis = []
        for c in cands:
            for b in basis:
                c = c - self.inner(x, c, b) * b
            nc = self.norm(x, c)
            if nc > 1e-8:
                basis.append(c / nc)
            if len(basis) == self.dim:
                break
        return basis

    def to_record(self, x) -> dict:
        return {"model": self.name, "params": self.params, "coords": np.ravel(np.asarray(x, dtype=float)).tolist()}

    def point_from_coords(self, coords):
        return np.asarray(coords, dtype=float)

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


def _copy(x):
    return np.array(x, dtype=float) if np.ndim(x) else float(x)


class Euclidean(Manifold):
    name = "euclidean"

    def __init__(self, n: int, tol: Tolerances = DEFAULT):
        if n < 1:
            raise ValueError("n must be >= 1")
        super().__init__(tol)
        self.n = n

    @property
    def dim(self):
        return self.n

    @property
    def params(self):
        return {"n": self.n}

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def exp(self, x, v):
        return np.asarray(x, dtype=float) + v

    def log(self, x, y):
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def dist(self, x, y):
        return float(np.linalg.norm(np.asarray(y) - np.asarray(x)))

    def project(self, x, w):
        return np.asarray(w, dtype=float)

    def residuals(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected shape ({self.n},), got {x.shape}")
        return {"finite": (0.0 if np.all(np.isfinite(x)) else math.inf, 0.0)}

    def _random_point(self, rng, spread):
        return spread * rng.standard_normal(self.n)

    def _ambient_basis(self, x):
        return list(np.eye(self.n))

    def _random_ambient(self, rng, x):
        return rng.standard_normal(self.n)


class PositiveReals(Manifold):
    """The open half-line with metric ``<u, v>_x = u v / x^2``."""

    name = "positive_reals"

    @property
    def dim(self):
        return 1

    def inner(self, x, u, v):
        return float(u) * float(v) / float(x) ** 2

    def exp(self, x, v):
        return float(x) * math.exp(float(v) / float(x))

    def log(self, x, y):
        return float(x) * math.log(float(y) / float(x))

    def dist(self, x, y):
        return abs(math.log(float(y) / float(x)))

    def zero(self, x):
        return 0.0

    def project(self, x, w):
        return float(w)

    def residuals(self, x):
        x = float(np.asarray(x).reshape(()))
        return {"positivity": (0.0 if x > 0 and math.isfinite(x) else math.inf, 0.0)}

    def point_from_coords(self, coords):
        return float(np.asarray(coords, dtype=float).reshape(()))

    def _random_point(self, rng, spread):
        return float(math.exp(spread * rng.standard_normal()))

    def _ambient_basis(self, x):
        return [1.0]

    def _random_ambient(self, rng, x):
        return float(rng.standard_normal())


def spd_funm(X, fn, tol: Tolerances = DEFAULT):
    """``U fn(L) U^T`` for symmetric ``X = U L U^T``; rejects non-SPD input."""
    X = np.asarray(X, dtype=float)
    if np.max(np.abs(X - X.T)) > tol.sym_tol * max(1.0, np.max(np.abs(X))):
        raise ManifoldError("matrix is not symmetric")
    w, U = np.linalg.eigh(0.5 * (X + X.T))
    if w[0] <= tol.spd_tol:
        raise ManifoldError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    return (U * fn(w)) @ U.T


def _sym_funm(S, fn):
    w, U = np.linalg.eigh(0.5 * (S + S.T))
    return (U * fn(w)) @ U.T


class SPD(Manifold):
    """Symmetric positive definite matrices with the affine-invariant metric."""

    name = "spd"

    def __init__(self, n: int, tol: Tolerances = DEFAULT):
        if n < 1:
            raise ValueError("n must be >= 1")
        super().__init__(tol)
        self.n = n

    @property
    def dim(self):
        return self.n * (self.n + 1) // 2

    @property
    def params(self):
        return {"n": self.n}

    def _halves(self, X):
        X = np.asarray(X, dtype=float)
        w, U = np.linalg.eigh(0.5 * (X + X.T))
        if w[0] <= self.tol.spd_tol:
            raise ManifoldError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
        s = np.sqrt(w)
        return (U * s) @ U.T, (U / s) @ U.T

    def inner(self, x, u, v):
        Xi = np.linalg.inv(x)
        return float(np.trace(Xi @ u @ Xi @ v))

    def exp(self, x, v):
        sq, isq = self._halves(x)
        out = sq @ _sym_funm(isq @ v @ isq, np.exp) @ sq
        return 0.5 * (out + out.T)

    def log(self, x, y):
        sq, isq = self._halves(x)
        out = sq @ spd_funm(_symmetrize(isq @ y @ isq), np.log, self.tol) @ sq
        return 0.5 * (out + out.T)

    def dist(self, x, y):
        _, isq = self._halves(x)
        w = np.linalg.eigvalsh(_symmetrize(isq @ y @ isq))
        if w[0] <= 0:
            raise ManifoldError("matrix is not positive definite")
        return float(np.sqrt(np.sum(np.log(w) ** 2)))

    def geodesic_closed_form(self, P, Q, t: float):
        """``P^1/2 (P^-1/2 Q P^-1/2)^t P^1/2``; kept as an independent cross-check."""
        sq, isq = self._halves(P)
        out = sq @ spd_funm(_symmetrize(isq @ Q @ isq), lambda w: w**t, self.tol) @ sq
        return 0.5 * (out + out.T)

    def project(self, x, w):
        w = np.asarray(w, dtype=float)
        return 0.5 * (w + w.T)

    def residuals(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n, self.n):
            raise ValueError(f"expected shape ({self.n}, {self.n}), got {x.shape}")
        sym = float(np.max(np.abs(x - x.T)))
        eigmin = float(np.linalg.eigvalsh(0.5 * (x + x.T))[0])
        return {
            "symmetry": (sym, self.tol.sym_tol),
            "eigmin": (max(0.0, self.tol.spd_tol - eigmin), 0.0),
        }

    def validate(self, x) -> CheckReport:
        rep = super().validate(x)
        if "eigmin" in rep.details:
            rep.details["eigmin_value"] = float(np.linalg.eigvalsh(np.asarray(x, dtype=float))[0])
        return rep

    def point_from_coords(self, coords):
        return np.asarray(coords, dtype=float).reshape(self.n, self.n)

    def _random_point(self, rng, spread):
        Q, R = np.linalg.qr(rng.standard_normal((self.n, self.n)))
        Q = Q * np.sign(np.diag(R))
        lam = np.exp(spread * rng.standard_normal(self.n))
        X = (Q * lam) @ Q.T
        return 0.5 * (X + X.T)

    def _ambient_basis(self, x):
        out = []
        for i in range(self.n):
            for j in range(i, self.n):
                E = np.zeros((self.n, self.n))
                E[i, j] = E[j, i] = 1.0
                out.append(E)
        return out

    def _random_ambient(self, rng, x):
        return rng.standard_normal((self.n, self.n))


def _symmetrize(A):
    return 0.5 * (A + A.T)


def minkowski(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(-x[0] * y[0] + np.dot(x[1:], y[1:]))


class Hyperbolic(Manifold):
    """Hyperboloid ``{x in R^(n+1): <x,x>_1 = -1, x_0 > 0}``."""

    name = "hyperbolic"

    def __init__(self, n: int, tol: Tolerances = DEFAULT):
        if n < 1:
            raise ValueError("n must be >= 1")
        super().__init__(tol)
        self.n = n

    @property
    def dim(self):
        return self.n

    @property
    def params(self):
        return {"n": self.n}

    def inner(self, x, u, v):
        return minkowski(u, v)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        r = self.norm(x, v)
        if r == 0.0:
            return x.copy()
        y = math.cosh(r) * x + (math.sinh(r) / r) * v
        # re-solve the time coordinate so the point sits on the sheet to rounding
        y[0] = math.sqrt(1.0 + float(np.dot(y[1:], y[1:])))
        return y

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = y + minkowski(x, y) * x
        s = math.sqrt(max(minkowski(u, u), 0.0))
        if s == 0.0:
            return np.zeros_like(x)
        d = math.asinh(s)
        return (d / s) * u

    def dist(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = y + minkowski(x, y) * x
        return math.asinh(math.sqrt(max(minkowski(u, u), 0.0)))

    def project(self, x, w):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        return w + minkowski(x, w) * x

    def residuals(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n + 1,):
            raise ValueError(f"expected shape ({self.n + 1},), got {x.shape}")
        return {
            "hyperboloid": (abs(minkowski(x, x) + 1.0), self.tol.hyp_tol),
            "upper_sheet": (0.0 if x[0] > 0 else math.inf, 0.0),
        }

    def validate_tangent(self, x, v) -> float:
        return abs(minkowski(x, v))

    def origin(self):
        o = np.zeros(self.n + 1)
        o[0] = 1.0
        return o

    def _random_point(self, rng, spread):
        o = self.origin()
        v = np.concatenate([[0.0], spread * rng.standard_normal(self.n)])
        return self.exp(o, v)

    def _ambient_basis(self, x):
        return list(np.eye(self.n + 1))

    def _random_ambient(self, rng, x):
        return rng.standard_normal(self.n + 1)


_MODELS = {
    "euclidean": Euclidean,
    "positive_reals": PositiveReals,
    "spd": SPD,
    "hyperbolic": Hyperbolic,
}


def make_manifold(model: str, params: dict | None = None, tol: Tolerances = DEFAULT) -> Manifold:
    try:
        cls = _MODELS[model]
    except KeyError:
        raise ValueError(f"unknown manifold model {model!r}") from None
    params = params or {}
    if cls is PositiveReals:
        return cls(tol)
    return cls(int(params["n"]), tol)


def from_record(record: dict, tol: Tolerances = DEFAULT):
    """Inverse of :meth:`Manifold.to_record`: returns ``(manifold, point)``."""
    M = make_manifold(record["model"], record.get("params"), tol)
    return M, M.point_from_coords(record["coords"])
