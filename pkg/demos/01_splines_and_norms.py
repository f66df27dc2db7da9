"""
Alternating splines and their derivative norms.

An alternating spline of order r puts truncated powers (t + a_j)_+^r with
alternating signs at knots -a_1 < ... < -a_s and scales them by l / r!.
Every derivative below r is nonnegative and increasing on the negative
half-line, so its sup norm is its value at t = 0 and has a closed form.
"""
import numpy as np

from rmonotone import (
    AlternatingSpline,
    MonotoneSpline,
    ScaleTransform,
    closed_form_norms,
    eval_derivative,
    measure_norms,
    rescale,
    validate_r_monotone,
)
from rmonotone.oracle import numeric_sup_norm

phi = AlternatingSpline(r=3, l=1.0, knots=(2.0, 1.0))
print("spline:", phi)
print("norms of orders 0..3:", closed_form_norms(phi, (0, 1, 2, 3)))  # 7/6, 3/2, 1, 1

# the closed form agrees with a brute-force grid supremum
for k in range(4):
    print(f"  order {k}: closed form {closed_form_norms(phi, (k,))[0]:.12f}, grid {numeric_sup_norm(phi, k):.12f}")

# values along the half-line; the top derivative is a 0/l step function
t = np.linspace(-3, 0, 7)
print("t        :", t)
print("phi(t)   :", np.round(eval_derivative(phi, 0, t), 6))
print("phi'''(t):", eval_derivative(phi, 3, t))

# a general r-monotone truncated-power function: prefix sums of the
# coefficients must stay nonnegative
x = MonotoneSpline(3, ((2.0, 1.0), (1.0, 1.0)))
print("\nx = (t+2)^3/6 + (t+1)^3/6, norms:", measure_norms(x, (0, 1, 2, 3)))
bad = MonotoneSpline(2, ((2.0, 1.0), (1.0, -2.0)))
print("coefficients (1, -2):", validate_r_monotone(bad))

# x -> alpha * x(lambda t) multiplies the k-th norm by alpha * lambda**k
tr = ScaleTransform(alpha=2.0, lam=3.0)
print("\nscaled spline:", rescale(phi, tr))
print("norm ratios:", closed_form_norms(rescale(phi, tr), (0, 1, 2, 3)) / closed_form_norms(phi, (0, 1, 2, 3)))
print("expected   :", [tr.factor(k) for k in range(4)])
