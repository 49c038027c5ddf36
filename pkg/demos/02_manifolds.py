"""The four manifold models: exp/log round trips, distances and geodesics.

Run: python3 demos/02_manifolds.py
"""
import math

import numpy as np

from ivo.manifolds import SPD, Euclidean, Hyperbolic, PositiveReals, minkowski
from ivo.rng import stream

rng = stream(42, "demo", "manifolds")
for M in (Euclidean(3), PositiveReals(), SPD(3), Hyperbolic(2)):
    worst = 0.0
    for _ in range(200):
        x, y = M.sample_point(rng), M.sample_point(rng)
        worst = max(worst, M.dist(M.exp(x, M.log(x, y)), y))
    print(f"{type(M).__name__:14s} max dist(exp_x log_x y, y) = {worst:.2e}")

P = PositiveReals()
print("\nPositiveReals: dist(1, e^2) =", P.dist(1.0, math.e ** 2))

# det along an SPD geodesic is log-linear in t.
S = SPD(3)
X, Y = S.sample_point(rng), S.sample_point(rng)
for t in (0.0, 0.25, 0.5, 1.0):
    Z = S.exp(X, t * S.log(X, Y))
    pred = np.linalg.det(X) ** (1 - t) * np.linalg.det(Y) ** t
    print(f"t={t:4.2f} det={np.linalg.det(Z):.6f} predicted={pred:.6f}")

H = Hyperbolic(2)
x = H.sample_point(rng)
v = H.sample_tangent(rng, x, 5.0)
y = H.exp(x, v)
print("\nhyperboloid constraint <y,y>+1 =", minkowski(y, y) + 1.0)
