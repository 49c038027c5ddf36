"""gH-directional derivatives, Gateaux differentiability and continuity.

Run: python3 demos/03_derivatives.py
"""
import numpy as np

from ivo import catalog as cat
from ivo import rivf
from ivo.rng import stream

f = cat.rivf("posreals_x_plus_inv")
print(f.description)
for x in (0.5, 1.0, 2.0):
    d = rivf.dir_deriv(f, x, 1.0)
    print(f"  f'({x}, 1) = {d.value}  (closed form [{1 - 1 / x**2:.4f}, 1])")

g = cat.rivf("flat_r2_frac")
print("\n" + g.description)
print("  f'(0, (1,1)) =", rivf.dir_deriv(g, np.zeros(2), np.array([1.0, 1.0])).value)
rng = stream(42, "demo", "flat")
print("  Gateaux at 0:", rivf.gateaux_check(g, np.zeros(2), rng).verdict)
cont = rivf.gh_continuity_probe(g, np.zeros(2), rng)
print("  gH-continuity probe at 0:", cont.verdict, "(|g(x)| <= |x1|, so g is continuous there)")

print("\nconvexity and the derivative inequality on the catalog:")
for key in ("spd_logdet", "posreals_x_plus_inv", "euclid_quad", "euclid_split"):
    h = cat.rivf(key)
    conv = rivf.convexity_check(h, stream(42, "demo", "conv", key), 200)
    ineq = rivf.thm33_inequality_check(h, stream(42, "demo", "ineq", key), 500)
    print(f"  {key:22s} convex={conv.verdict:5s} f(y) gH f(x) >= f'(x, log_x y): {ineq.verdict}")
