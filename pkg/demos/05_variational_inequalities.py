"""Interval variational inequalities and their link to optimization.

Run: python3 demos/05_variational_inequalities.py
"""
import numpy as np

from ivo import catalog as cat
from ivo import rivi
from ivo.rng import stream

T = cat.field("euclid_quad_grad")
rng = stream(42, "demo", "vi")
origin = np.zeros(2)
print("Stampacchia at 0:", rivi.stampacchia_residual(T, origin, rng).verdict)
print("Minty at 0:      ", rivi.minty_residual(T, origin, rng).verdict)
print("Stampacchia at (1,1):", rivi.stampacchia_residual(T, np.ones(2), rng).verdict)
print("pseudomonotone:", rivi.pseudomonotone_check(T, rng).verdict)
print("sign-flip field pseudomonotone:", rivi.pseudomonotone_check(cat.field("sign_flip_r1"), rng).verdict)

p = cat.problem("posreals_x_plus_inv")
Tp = cat.field("posreals_grad")
rep = rivi.bridge_thm43(p, 1.0, rng, T=Tp)
print("\nefficient point x0=1 of x[1,1] + [0,1/x]:")
print("  Stampacchia:", rivi.stampacchia_residual(Tp, 1.0, rng).verdict)
print("  bridge verdict:", rep.verdict, "-", rep.details.get("gate"))

print("\nrandomized bridges on quadratic problems:")
fails = 0
for i in range(50):
    q, seg = cat.random_quadratic_problem(stream(42, "demo", "trial", i))
    x0 = seg[0]
    fails += rivi.bridge_thm43(q, x0, rng, 100).failed
print(f"  {fails} counterexamples over 50 trials")
