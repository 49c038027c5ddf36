"""Scalarized descent, sampled efficiency and the optimality certificates.

Run: python3 demos/04_optimization.py
"""
from ivo import catalog as cat
from ivo import riop
from ivo.rng import stream

p = cat.problem("posreals_x_plus_inv")
for lam in ((1e-9, 1.0), (1.0, 1.0), (1.0, 3.0)):
    res = riop.solve_scalarized(p, riop.SolverSettings(*lam), 3.0)
    print(f"weights {lam}: x* = {res.point:.7f}, f(x*) = {res.f_interval}, {res.iters} iterations")

print("\nsampled efficiency and certificates:")
for x0 in (1.0, 2.0):
    rng = stream(42, "demo", "cert", str(x0))
    for cert in (riop.is_efficient_sampled(p, x0, rng, 10_000),
                 riop.certify_necessary_41(p, x0, rng),
                 riop.certify_sufficient_41(p, x0, rng),
                 riop.certify_42(p, x0, rng, variant="necessary")):
        print(f"  x0={x0}: {cert.name:22s} {cert.verdict}")

q = cat.problem("spd_logdet_riop")
rng = stream(42, "demo", "logdet")
x0s = q.sample(rng, 20)
dominated = sum(riop.is_efficient_sampled(q, x0, rng, 500).failed for x0 in x0s)
print(f"\nlog-det problem: {dominated}/20 sampled points are dominated; there is no efficient point")
