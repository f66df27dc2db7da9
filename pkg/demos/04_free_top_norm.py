"""
Deciding admissibility when every prescribed order is below r.

Now the top norm l is free.  For each l the remaining targets are met by a
unique spline, and the lowest-order norm of that spline decreases as l
grows; a target is admissible exactly when it exceeds the large-l limit.
The limit is estimated from a geometric sequence of l values by Richardson
extrapolation in the width of the knot clusters, which scales like
l**(-1/(r - k)) for the highest prescribed order k.
"""
from rmonotone import NormTargets, OrderSpec, decide, estimate_limit

est = estimate_limit(3, 0, (1, 2), (1.0, 1.0))
print("order-0 norm along the family matching (1, 1) at orders 1, 2 (r = 3):")
for l, b in est.samples:
    print(f"  l = {l:8.2f}   norm {b:.12f}   exact 0.5 + 1/(24 l^2) = {0.5 + 1 / (24 * l * l):.12f}")
print("limit:", est.limit)

for m0 in (0.45, 0.5, 0.6):
    v = decide(OrderSpec(3, (0, 1, 2)), NormTargets((m0, 1.0, 1.0)))
    print(f"M0 = {m0}: {v.describe()}")

# a slowly converging family: r = 6, highest order 3, cluster width ~ l**(-1/3)
est = estimate_limit(6, 0, (1, 2, 3), (3.5637395264345826, 5.949200711579262, 7.844950939585022))
print(f"\nr = 6 example: {len(est.samples)} samples, limit {est.limit:.12f}")

# a large lowest target can exceed every spline with d - 1 knots
print("\nlowest target far above the family:")
print("  orders (0, 2, 3):", decide(OrderSpec(4, (0, 2, 3)), NormTargets((100.0, 1.0, 1.0))).describe())
print("  orders (1, 2, 3):", decide(OrderSpec(4, (1, 2, 3)), NormTargets((100.0, 1.0, 1.0))).describe())
