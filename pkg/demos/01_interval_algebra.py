"""Interval arithmetic: the gH-difference, the Hausdorff metric and the order.

Run: python3 demos/01_interval_algebra.py
"""
from ivo import interval as iv
from ivo.interval import Interval
from ivo.laws import LAWS, law_check, non_converse_check
from ivo.rng import stream

A, B, C = Interval(1, 2), Interval(0, 5), Interval(-1, 3)
print("A =", A, " B =", B, " C =", C)
print("A gH C =", iv.gh_diff(A, C))
print("B gH C =", iv.gh_diff(B, C))
print("A vs B:", iv.compare(A, B).name, "even though A gH C precedes B gH C")
print("non-converse check:", non_converse_check().verdict)

# The gH-difference is the unique G with A = B + G or B = A - G.
G = iv.gh_diff(Interval(0, 2), Interval(0, 3))
print("\n[0,2] gH [0,3] =", G)

# Every law is checked on 10^4 random tuples; ties and degenerate intervals are drawn on purpose.
print("\nlaw                   verdict  max residual")
for name in LAWS:
    rep = law_check(name, stream(42, "demo", name), n=10_000)
    print(f"{name:22s}{rep.verdict:9s}{rep.details['max_residual']:.2e}")

# The cancellation law d(A gH B, A gH C) = d(B, C) is only an inequality in general.
A, B, C = Interval(0, 2), Interval(0, 0), Interval(0, 3)
print("\ncounterexample to equality:",
      iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C)), "vs", iv.hausdorff(B, C))
