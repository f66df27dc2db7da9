"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``;
either way one PASS/FAIL line per criterion is printed.
"""

import math
import time

import numpy as np
import pytest

from rmonotone.admissibility import Certainty, SplineType, decide, estimate_limit, olov_bound
from rmonotone.knots import MomentSystem, solve_fixed_count, solve_min_l, vandermonde_det
from rmonotone.oracle import GeneratorConfig, comparison_suite, generate, numeric_sup_norm, random_orders
from rmonotone.spline import (
    AlternatingSpline,
    NormTargets,
    OrderSpec,
    ScaleTransform,
    closed_form_norms,
    measure_norms,
    rescale,
)


def verdict(r, orders, norms):
    return decide(OrderSpec(r, tuple(orders)), NormTargets(tuple(float(m) for m in norms)))


def kind(v):
    return v.spline_type if v.admissible else None


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def olov_boundary():
    """r = 2: inadmissible -> Type2 -> Type1 across the bound, relative step 1e-8."""
    problems = []
    pairs = [(1.0, 1.0)] + [(m1, m2) for m1 in np.geomspace(0.1, 10, 10) for m2 in np.geomspace(0.1, 10, 10)]
    for m1, m2 in pairs:
        b = olov_bound(2, 0, 1, m1, m2)
        got = [kind(verdict(2, (0, 1, 2), (b * f, m1, m2))) for f in (1 - 1e-8, 1.0, 1 + 1e-8)]
        if got != [None, SplineType.TYPE2, SplineType.TYPE1]:
            problems.append((m1, m2, got))
    if olov_bound(2, 0, 1, 1.0, 1.0) != 0.5:
        problems.append("bound at (1, 1) is not 0.5")
    return not problems, f"{len(pairs)} pairs, {len(problems)} disagreements"


def type_ladder():
    """r = 3, orders (0, 1, 2, 3): the hand-solved Type ladder."""
    bad = []
    sixth = 1 / 6
    for m0 in (0.1, sixth * (1 - 1e-6)):
        if verdict(3, (0, 1, 2, 3), (m0, 0.5, 1, 1)).admissible:
            bad.append(f"M0={m0} admitted")
    v = verdict(3, (0, 1, 2, 3), (sixth, 0.5, 1, 1))
    if kind(v) is not SplineType.TYPE2:
        bad.append("no Type2 at 1/6")
    for m0 in (sixth * (1 + 1e-6), 0.2, 1.0, 10.0):
        v = verdict(3, (0, 1, 2, 3), (m0, 0.5, 1, 1))
        if kind(v) is not SplineType.TYPE3 or abs(v.witness.constant - (m0 - sixth)) > 1e-12 * m0:
            bad.append(f"Type3 wrong at M0={m0}")
    threshold = (1.1**3 - 0.1**3) / 6
    tail = verdict(3, (1, 2, 3), (0.6, 1, 1))
    if kind(tail) is not SplineType.TYPE1 or rel_err(tail.witness.knots, (1.1, 0.1)) > 1e-8:
        bad.append("tail witness is not (1.1, 0.1)")
    v = verdict(3, (0, 1, 2, 3), (threshold, 0.6, 1, 1))
    if kind(v) is not SplineType.TYPE2 or rel_err(v.witness.knots, (1.1, 0.1)) > 1e-8:
        bad.append("boundary witness is not (1.1, 0.1)")
    for m0 in (threshold * (1 + 1e-6), 0.3, 1.0, 5.0):
        v = verdict(3, (0, 1, 2, 3), (m0, 0.6, 1, 1))
        if kind(v) is not SplineType.TYPE1 or v.witness.s != 3:
            bad.append(f"no Type1 at M0={m0}")
    return not bad, "; ".join(bad) or "ladder matches the hand solves"


def limit_case():
    """Orders all below r: limit 0.5 of 0.5 + 1/(24 l^2)."""
    bad = []
    est = estimate_limit(3, 0, (1, 2), (1, 1))
    if abs(est.limit - 0.5) > 1e-6:
        bad.append(f"limit {est.limit}")
    if not est.nonincreasing:
        bad.append("samples increase")
    for l, b in est.samples:
        if abs(b - (0.5 + 1 / (24 * l * l))) > 1e-12:
            bad.append(f"sample at l={l} is {b}")
    l, spline = solve_min_l(3, (1, 2), (1, 1))
    if abs(l - 0.5) > 1e-8 * 0.5 or spline.s != 1 or abs(spline.knots[0] - 2) > 1e-8 * 2:
        bad.append(f"l_min {l}, knots {spline.knots}")
    if not verdict(3, (0, 1, 2), (0.6, 1, 1)).admissible:
        bad.append("0.6 rejected")
    if verdict(3, (0, 1, 2), (0.45, 1, 1)).admissible:
        bad.append("0.45 admitted")
    v = verdict(3, (0, 1, 2), (0.5, 1, 1))
    if v.admissible or v.certainty is not Certainty.BOUNDARY:
        bad.append("0.5 not flagged as boundary")
    return not bad, "; ".join(bad) or f"limit {est.limit:.12g}, l_min {l:.12g}"


def round_trips(n=10_000, seed=0):
    """Norms -> knots for random ordered knots; two perturbed starts agree."""
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, 0
    for _ in range(n):
        r = int(rng.integers(1, 9))
        s = int(rng.integers(1, min(r, 6) + 1))
        orders = tuple(sorted(int(k) for k in rng.choice(r, size=s, replace=False)))
        while True:
            knots = np.sort(rng.uniform(0.1, 3.0, s))[::-1]
            if s == 1 or np.min(-np.diff(knots)) >= 0.02:
                break
        phi = AlternatingSpline(r, 1.0, tuple(knots))
        system = MomentSystem(r, orders, tuple(closed_form_norms(phi, orders)), l=1.0)
        runs = []
        for _ in range(2):
            guess = np.sort(knots * rng.uniform(0.95, 1.05, s))[::-1]
            try:
                runs.append(solve_fixed_count(system, tuple(guess)))
            except Exception:
                fails += 1
        if len(runs) == 2:
            worst = max(worst, rel_err(runs[0], knots), rel_err(runs[1], knots), rel_err(runs[0], runs[1]))
    return fails == 0 and worst <= 1e-8, f"{n} instances, {fails} solver failures, worst relative error {worst:.2e}"


def vandermonde_positivity(n=100_000, seed=0):
    rng = np.random.default_rng(seed)
    dims = rng.integers(1, 9, n)
    bad = 0
    for d in dims:
        x = np.sort(rng.uniform(0.01, 5.0, d))[::-1]
        alpha = np.sort(rng.uniform(0.0, 12.0, d))[::-1]
        if d > 1 and (np.min(-np.diff(x)) == 0 or np.min(-np.diff(alpha)) == 0):
            continue
        if not vandermonde_det(x, alpha) > 0:
            bad += 1
    return bad == 0, f"{n} determinants, {bad} not positive"


def realizability(trials=1000, seed=0):
    rep = comparison_suite(trials, seed=seed)
    flips = rep.perturbation_checks
    detail = (
        f"{rep.admissible}/{rep.trials} admitted, {rep.extremal_checks} extremal checks, "
        f"{flips} perturbations, {rep.failure_count} failures"
    )
    if rep.failures:
        detail += f"; first: {rep.failures[0].reason}"
    return rep.failure_count == 0 and rep.admissible == trials, detail


def norm_formula(n=1000, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        r = int(rng.integers(1, 9))
        knots = np.sort(rng.uniform(0.1, 3.0, int(rng.integers(1, 7))))[::-1]
        if knots.size > 1 and np.min(-np.diff(knots)) == 0:
            continue
        phi = AlternatingSpline(r, float(rng.uniform(0.2, 5.0)), tuple(knots), float(rng.uniform(0, 1)))
        exact = closed_form_norms(phi, tuple(range(r + 1)))
        grid = [numeric_sup_norm(phi, k) for k in range(r + 1)]
        worst = max(worst, rel_err(grid, exact))
    return worst <= 1e-8, f"{n} splines, worst relative difference {worst:.2e}"


def scaling(n=100, seed=0):
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, 0
    for i in range(n):
        r = int(rng.integers(2, 7))
        top = bool(i % 2)
        d = int(rng.integers(2, min(5, r + 1 if top else r) + 1))
        orders = random_orders(rng, r, d, top)
        x = generate(GeneratorConfig(r=r, pieces=int(rng.integers(1, 6)), seed=int(rng.integers(2**31))))
        norms = measure_norms(x, orders)
        tr = ScaleTransform(float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10)))
        base = verdict(r, orders, norms)
        moved = verdict(r, orders, tr.apply_targets(orders, norms))
        if not base.admissible or moved.spline_type != base.spline_type:
            bad += 1
            continue
        expect = rescale(base.witness, tr)
        if moved.witness.s != expect.s:
            bad += 1
            continue
        err = max(rel_err(moved.witness.knots, expect.knots), rel_err([moved.witness.l], [expect.l]))
        if expect.constant > 0:
            err = max(err, rel_err([moved.witness.constant], [expect.constant]))
        worst = max(worst, err)
    return bad == 0 and worst <= 1e-8, f"{n} instances, {bad} type changes, worst witness difference {worst:.2e}"


CRITERIA = [
    (1, "Olovyanishnikov boundary, r=2", olov_boundary, 5),
    (2, "Type ladder, r=3", type_ladder, 1),
    (3, "large-l limit, r=3", limit_case, 5),
    (4, "round-trip uniqueness", round_trips, 60),
    (5, "generalized Vandermonde positivity", vandermonde_positivity, 30),
    (6, "end-to-end realizability oracle", realizability, 600),
    (7, "closed-form norms vs grid", norm_formula, 60),
    (8, "scaling equivariance", scaling, 60),
]


def evaluate(number):
    _, name, fn, budget = CRITERIA[number - 1]
    t0 = time.perf_counter()
    ok, detail = fn()
    seconds = time.perf_counter() - t0
    ok = ok and seconds < budget
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name}: {detail} ({seconds:.2f} s, budget {budget} s)"
    return ok, line


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(c[0]) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
