"""
Deciding admissibility when the r-th derivative norm is prescribed.

The staged construction starts from the one-knot spline that matches the
two highest orders and walks down: each lower target is compared with the
current spline.  Smaller means no r-monotone function exists; equal means
the spline itself is the answer (lower orders must then match too, except
an excess at order 0, which a constant absorbs); larger grows a knot.
"""
import numpy as np

from rmonotone import NormTargets, OrderSpec, decide, olov_bound


def show(r, orders, norms):
    v = decide(OrderSpec(r, orders), NormTargets(norms))
    print(f"r={r} orders={orders} norms={tuple(round(m, 6) for m in norms)}: {v.describe()}")
    return v


show(2, (0, 1, 2), (0.7, 1.0, 1.0))
show(2, (0, 1, 2), (0.5, 1.0, 1.0))
show(2, (0, 1, 2), (0.3, 1.0, 1.0))

print("\nthe ladder for orders (0, 1, 2, 3), r = 3:")
for m0 in (0.1, 1 / 6, 1.0):
    show(3, (0, 1, 2, 3), (m0, 0.5, 1.0, 1.0))
threshold = (1.1**3 - 0.1**3) / 6
for m0 in (threshold, 0.5):
    show(3, (0, 1, 2, 3), (m0, 0.6, 1.0, 1.0))

# with three orders the boundary has a closed form
print("\nthree-order bound vs the staged construction (r = 4, orders 1, 3, 4):")
for m3, m4 in [(0.5, 1.0), (2.0, 0.3), (1.0, 7.0)]:
    b = olov_bound(4, 1, 3, m3, m4)
    v = decide(OrderSpec(4, (1, 3, 4)), NormTargets((b * 0.999, m3, m4)))
    print(f"  M3={m3}, M4={m4}: bound {b:.6f}, staged bound {v.stage_bound:.6f}")

# a boundary scan, the same as `rmonotone scan`
print("\nscan of the order-0 target, r = 2, other norms (1, 1):")
for m0 in np.linspace(0.3, 0.7, 5):
    v = decide(OrderSpec(2, (0, 1, 2)), NormTargets((m0, 1.0, 1.0)))
    print(f"  {m0:.2f}  {'admissible' if v.admissible else 'inadmissible':12s}  margin {v.margins[0]:+.3f}")
