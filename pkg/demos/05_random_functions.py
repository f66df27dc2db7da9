"""
Checking the decision engine against random r-monotone functions.

Random truncated-power functions with nonnegative prefix sums are
r-monotone, so their measured norms must be admissible.  The witness must
reproduce them, and its norms at unconstrained orders must compare with the
function's in the sign pattern the extremal property predicts.
"""
from rmonotone import NormTargets, OrderSpec, decide, extremal_checks, measure_norms
from rmonotone.oracle import GeneratorConfig, comparison_suite, generate

x = generate(GeneratorConfig(r=5, pieces=4, seed=7))
print("random 5-monotone function:")
for b, c in x.terms:
    print(f"  {c:+.4f} (t + {b:.4f})^5 / 5!")
orders = (0, 2, 3, 5)
norms = measure_norms(x, orders)
v = decide(OrderSpec(5, orders), NormTargets(tuple(norms)))
print("norms at", orders, ":", norms)
print("verdict:", v.describe())
for rep in extremal_checks(x, v):
    print(f"  order {rep.order}: function {rep.x_norm:.6f}, witness {rep.witness_norm:.6f}, ok={rep.ok}")

report = comparison_suite(200, seed=3)
print(f"\n{report.trials} random trials: {report.admissible} admitted, {report.failure_count} failures, "
      f"{report.extremal_checks} extremal checks, {report.perturbation_checks} perturbations, "
      f"{report.seconds:.1f} s")
