"""
Pinning knots to prescribed norms.

Prescribing s norms of an s-knot spline gives a square polynomial system.
Its Jacobian is a generalized Vandermonde matrix with alternating column
signs, whose determinant is positive on ordered knots; the ordered solution
is therefore unique and Newton's method finds it.  New knots are added by
continuation: a knot is born at 0 and moves right until the next norm hits
its target.
"""
import numpy as np

from rmonotone import (
    AlternatingSpline,
    MomentSystem,
    closed_form_norms,
    grow_knot,
    solve_fixed_count,
    solve_for_l,
    solve_min_l,
    vandermonde_det,
)
from rmonotone.errors import NoSolution

print("det[x_j^a_i] for x=(3,2,1), a=(3,2,1):", vandermonde_det((3, 2, 1), (3, 2, 1)))
rng = np.random.default_rng(1)
dets = [vandermonde_det(np.sort(rng.uniform(0.01, 5, 6))[::-1], np.sort(rng.uniform(0, 12, 6))[::-1])
        for _ in range(1000)]
print("smallest of 1000 random 6x6 determinants:", min(dets))

# recover knots from their norms
truth = AlternatingSpline(6, 1.0, (2.4, 1.7, 0.9, 0.3))
orders = (0, 1, 3, 4)
system = MomentSystem(6, orders, tuple(closed_form_norms(truth, orders)), l=1.0)
for guess in [(2.0, 1.5, 1.0, 0.5), (3.0, 2.0, 0.5, 0.1)]:
    print("from", guess, "->", solve_fixed_count(system, guess))

# an unattainable system: a2 would have to be negative
try:
    solve_fixed_count(MomentSystem(2, (0, 1), (0.3, 1.0), l=1.0), (1.0, 0.5))
except NoSolution as exc:
    print("\n(0.3, 1) with two knots:", exc)

# grow a second knot below the one-knot spline with norms (1, 1) at orders 1, 2
one = AlternatingSpline(2, 1.0, (1.0,))
grown, trace = grow_knot(one, 0, 0.7, MomentSystem(2, (1,), (1.0,), l=1.0))
print("\ngrown spline:", grown.knots, f"({len(trace.steps)} continuation steps, {trace.reason})")
for step in trace.steps[:: max(1, len(trace.steps) // 5)]:
    print(f"  new knot {step.new_knot:.4f}  knots {np.round(step.knots, 4)}  order-0 norm {step.norm:.5f}")

# with orders below r the top norm l is free; it has a smallest value
l_min, spline = solve_min_l(3, (1, 2), (1.0, 1.0))
print("\nsmallest top norm for norms (1, 1) at orders 1, 2:", l_min, "knots", spline.knots)
for l in (0.5, 1.0, 2.0, 8.0):
    print(f"  l = {l}: knots {solve_for_l(3, (1, 2), (1.0, 1.0), l).knots}")
