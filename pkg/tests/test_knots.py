import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmonotone.errors import InvalidArgument, NoSolution
from rmonotone.knots import (
    MomentSystem,
    compare,
    family_start,
    grow_knot,
    jacobian,
    residual,
    solve_fixed_count,
    solve_for_l,
    solve_min_l,
    stage_ladder,
    vandermonde_det,
)
from rmonotone.spline import AlternatingSpline, closed_form_norms


def test_residual_examples():
    np.testing.assert_allclose(residual((2, 1), 1, MomentSystem(3, (1, 2), (1.5, 1), l=1)), [0, 0], atol=1e-15)
    np.testing.assert_allclose(residual((1,), 1, MomentSystem(2, (1,), (2,), l=1)), [-1])
    np.testing.assert_allclose(
        residual((1.2, 0.2), 1, MomentSystem(2, (0, 1), (0.7, 1), l=1)), [0, 0], atol=1e-15
    )


def test_residual_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        residual((2, 1, 0.5), 1, MomentSystem(3, (1, 2), (1.5, 1), l=1))


def test_system_must_be_square():
    with pytest.raises(InvalidArgument):
        MomentSystem(3, (1,), (1.0,), l=None)


def test_vandermonde_examples():
    assert vandermonde_det((2, 1), (2, 1)) == pytest.approx(2)
    assert vandermonde_det((3, 2, 1), (3, 2, 1)) == pytest.approx(12)
    assert vandermonde_det((5,), (0.5,)) == pytest.approx(math.sqrt(5))


@pytest.mark.parametrize("x, a", [((1, 2), (2, 1)), ((2, 1), (1, 2)), ((2, -1), (2, 1)), ((2,), (1, 0))])
def test_vandermonde_rejects(x, a):
    with pytest.raises(InvalidArgument):
        vandermonde_det(x, a)


def test_vandermonde_ill_conditioned_stays_positive():
    x = 1.0 + 1e-4 * np.arange(8)[::-1]
    assert vandermonde_det(x, np.arange(8)[::-1] * 3.5) > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_jacobian_is_signed_vandermonde(n, seed):
    rng = np.random.default_rng(seed)
    r = n + int(rng.integers(0, 4))
    orders = tuple(sorted(rng.choice(r, size=n, replace=False)))
    knots = np.sort(rng.uniform(0.2, 3, n))[::-1]
    if n > 1 and np.min(-np.diff(knots)) < 1e-2:
        return
    l = float(rng.uniform(0.5, 2))
    system = MomentSystem(r, orders, (1.0,) * n, l=l)
    exps = np.array([r - k - 1 for k in orders], dtype=float)
    # row i carries l/(r-k_i-1)!, column j carries (-1)**j
    scale = np.prod([l / math.factorial(int(p)) for p in exps]) * (-1) ** (n // 2)
    expect = scale * vandermonde_det(knots, exps)
    got = np.linalg.det(jacobian(knots, l, system))
    assert got == pytest.approx(expect, rel=1e-8)


def test_fixed_count_examples():
    got = solve_fixed_count(MomentSystem(3, (1, 2), (1.5, 1), l=1), (2.5, 0.5))
    np.testing.assert_allclose(got, (2, 1), rtol=1e-12)
    got = solve_fixed_count(MomentSystem(2, (1,), (1,), l=1), (0.3,))
    np.testing.assert_allclose(got, (1,), rtol=1e-12)
    with pytest.raises(NoSolution):
        solve_fixed_count(MomentSystem(2, (0, 1), (0.3, 1), l=1), (1.0, 0.5))


def test_fixed_count_free_l():
    knots, l = solve_fixed_count(MomentSystem(3, (1, 2), (1, 1)), (1.5,), initial_l=0.8)
    assert l == pytest.approx(0.5, rel=1e-12)
    assert knots[0] == pytest.approx(2, rel=1e-12)


@pytest.mark.parametrize("target, expect", [(0.7, (1.2, 0.2)), (10, (10.5, 9.5)), (0.505, (1.005, 0.005))])
def test_grow_knot_examples(target, expect):
    w = AlternatingSpline(2, 1.0, (1.0,))
    out, trace = grow_knot(w, 0, target, MomentSystem(2, (1,), (1.0,), l=1.0))
    np.testing.assert_allclose(out.knots, expect, rtol=1e-9)
    assert trace.reason == "target reached"


def test_grow_knot_trace():
    w = AlternatingSpline(4, 1.0, (2.0, 1.0))
    system = MomentSystem(4, (2, 3), tuple(closed_form_norms(w, (2, 3))), l=1.0)
    target = 3 * closed_form_norms(w, (0,))[0]
    out, trace = grow_knot(w, 0, target, system)
    taus = [s.new_knot for s in trace.steps]
    assert np.all(np.diff(taus) > 0)
    for step in trace.steps[1:]:
        grown = AlternatingSpline(4, 1.0, step.knots + (step.new_knot,))
        np.testing.assert_allclose(closed_form_norms(grown, (2, 3)), system.targets, rtol=1e-10)
    assert closed_form_norms(out, (0,))[0] == pytest.approx(target, rel=1e-10)


def test_grow_knot_needs_larger_target():
    w = AlternatingSpline(2, 1.0, (1.0,))
    with pytest.raises(InvalidArgument):
        grow_knot(w, 0, 0.4, MomentSystem(2, (1,), (1.0,), l=1.0))


def test_min_l_examples():
    l, spline = solve_min_l(3, (1, 2), (1, 1))
    assert l == pytest.approx(0.5) and spline.knots == pytest.approx((2.0,))
    l, spline = solve_min_l(3, (1, 2), (2, 2))
    assert l == pytest.approx(1.0) and spline.knots == pytest.approx((2.0,))
    with pytest.raises(InvalidArgument):
        solve_min_l(2, (1,), (1,))


def test_min_l_three_targets():
    # norms of a two-knot spline, so the minimum is attained with two knots
    phi = AlternatingSpline(5, 1.0, (2.0, 0.7))
    orders = (0, 1, 3)
    targets = tuple(closed_form_norms(phi, orders))
    l, spline = solve_min_l(5, orders, targets)
    assert spline.s == 2
    np.testing.assert_allclose(closed_form_norms(spline, orders), targets, rtol=1e-10)
    assert l <= 1.0 + 1e-9
    with pytest.raises(NoSolution):
        solve_for_l(5, orders, targets, 0.9 * l)


@pytest.mark.parametrize("l, expect", [(0.5, (2.0,)), (1.0, (1.5, 0.5)), (2.0, (1.25, 0.75))])
def test_solve_for_l_examples(l, expect):
    spline = solve_for_l(3, (1, 2), (1, 1), l)
    assert spline.l == l
    np.testing.assert_allclose(spline.knots, expect, rtol=1e-9)


def test_family_open_at_lower_end():
    # lowest target above every member of the tail family: open lower end
    start = family_start(4, (1, 2, 3), (100.0, 1.0, 1.0))
    assert not start.attained
    lower = solve_min_l(4, (2, 3), (1.0, 1.0))[0]
    assert start.lower == pytest.approx(lower)
    np.testing.assert_allclose(closed_form_norms(start.spline, (1, 2, 3)), (100, 1, 1), rtol=1e-9)


def test_stage_ladder_outcomes():
    assert stage_ladder(2, (0, 1), (0.7, 1), 1.0).status == "complete"
    out = stage_ladder(2, (0, 1), (0.3, 1), 1.0)
    assert out.status == "below" and out.index == 0
    assert out.margins[0] == pytest.approx(-0.2)
    assert stage_ladder(2, (0, 1), (0.5, 1), 1.0).status == "equal"


def test_compare_is_relative():
    assert compare(1.0, 1.0 + 1e-12, 1e-9) == 0
    assert compare(1e-20, 2e-20, 1e-9) == -1
    assert compare(2.0, 1.0, 1e-9) == 1


@pytest.mark.parametrize("seed", range(30))
def test_round_trip(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(2, 9))
    n = int(rng.integers(1, min(r, 6) + 1))
    orders = tuple(sorted(int(v) for v in rng.choice(r, size=n, replace=False)))
    while True:
        knots = np.sort(rng.uniform(0.1, 3.0, n))[::-1]
        if n == 1 or np.min(-np.diff(knots)) > 0.05:
            break
    phi = AlternatingSpline(r, 1.0, tuple(knots))
    system = MomentSystem(r, orders, tuple(closed_form_norms(phi, orders)), l=1.0)
    for _ in range(2):
        guess = np.sort(knots * rng.uniform(0.97, 1.03, n))[::-1]
        got = solve_fixed_count(system, tuple(guess))
        np.testing.assert_allclose(got, knots, rtol=1e-8)
