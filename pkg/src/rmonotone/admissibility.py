"""Decide whether prescribed derivative norms belong to an r-monotone function.

Two regimes:

* the top order is ``r``: fix ``l = M_r`` and run the staged construction of
  :func:`rmonotone.knots.stage_ladder`; the first order whose target falls
  below, equals or exceeds the running witness decides the outcome;
* every order is below ``r``: the tail must be admissible and the lowest
  target must strictly exceed the large-``l`` limit of the lowest-order norm
  along the tail's spline family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import knots as ks
from .errors import InvalidArgument, NumericalFailure, SolverError
from .spline import (
    AlternatingSpline,
    MonotoneSpline,
    NormTargets,
    OrderSpec,
    closed_form_norms,
    measure_norms,
)


class SplineType(str, enum.Enum):
    TYPE1 = "Type1"
    TYPE2 = "Type2"
    TYPE3 = "Type3"
    # all orders below r, lowest order positive, lowest target above every
    # spline with d-1 knots: the witness needs d knots
    EXTENDED = "Extended"


class Certainty(str, enum.Enum):
    CERTAIN = "certain"
    BOUNDARY = "boundary-at-tolerance"


@dataclass(frozen=True)
class DecisionConfig:
    equality_tolerance: float = 1e-9
    limit_factor: float = 4.0
    limit_stages: int = 20
    limit_tolerance: float = 1e-10
    grid_size: int = 10_001

    def __post_init__(self):
        if not 0 < self.equality_tolerance < 1e-3:
            raise InvalidArgument("equality_tolerance must lie in (0, 1e-3)", field="tolerance")
        if not self.limit_factor > 1:
            raise InvalidArgument("limit_factor must exceed 1", field="limit_factor")
        if self.limit_stages < 3:
            raise InvalidArgument("limit_stages must be at least 3", field="limit_stages")
        if not self.limit_tolerance > 0:
            raise InvalidArgument("limit_tolerance must be positive", field="limit_tolerance")
        if self.grid_size < 2:
            raise InvalidArgument("grid_size must be at least 2", field="grid_size")


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    spline_type: SplineType | None
    witness: AlternatingSpline | None
    binding_stage: int
    margins: tuple
    certainty: Certainty
    r: int
    orders: tuple
    norms: tuple
    limit: float | None = None

    @property
    def stage_bound(self):
        """Threshold the lowest target was compared against."""
        return self.norms[0] - self.margins[0]

    def describe(self):
        """One-line human summary, 6 significant digits."""
        if self.admissible:
            label = self.spline_type.value.replace("Type", "Type ")
            knots = ", ".join(f"{a:.6g}" for a in self.witness.knots)
            text = f"admissible, {label}, knots [{knots}]"
            if self.witness.constant > 0:
                text += f", constant {self.witness.constant:.6g}"
            if self.witness.l != self.norms[-1] or self.orders[-1] != self.r:
                text += f", l {self.witness.l:.6g}"
        else:
            i = self.binding_stage
            need = self.norms[i] - self.margins[i]
            rel = ">" if self.orders[-1] < self.r and i == 0 else "≥"
            if math.isfinite(need):
                text = f"inadmissible at order {self.orders[i]}: need {rel} {need:.6g}"
            else:
                text = f"inadmissible at order {self.orders[i]}"
        if self.certainty is Certainty.BOUNDARY:
            text += " (boundary-at-tolerance)"
        return text


def _coerce(orders, targets):
    spec = orders if isinstance(orders, OrderSpec) else None
    if spec is None:
        raise InvalidArgument("orders must be an OrderSpec", field="orders")
    tg = targets if isinstance(targets, NormTargets) else NormTargets(tuple(targets))
    tg.check_against(spec)
    return spec, tg


def olov_bound(r, k1, k2, m_k2, m_r):
    """Smallest admissible norm at ``k1`` given norms at ``k2`` and ``r`` (three-norm case)."""
    for name, v in (("r", r), ("k1", k1), ("k2", k2)):
        if isinstance(v, bool) or int(v) != v:
            raise InvalidArgument(f"{name} must be an integer", field=name)
    if not (0 <= k1 < k2 < r):
        raise InvalidArgument("need 0 <= k1 < k2 < r", field="orders")
    if not (m_k2 > 0 and m_r > 0):
        raise InvalidArgument("norms must be positive", field="norms")
    e = (r - k1) / (r - k2)
    return (
        math.factorial(r - k2) ** e / math.factorial(r - k1)
        * m_k2**e
        * m_r ** ((k1 - k2) / (r - k2))
    )


# ---------------------------------------------------------------------------
# large-l limit


class LimitEstimate(NamedTuple):
    limit: float
    samples: list

    @property
    def nonincreasing(self):
        return samples_nonincreasing(self.samples)


def samples_nonincreasing(samples, slack=1e-9):
    vals = [b for _, b in samples]
    return all(b1 <= b0 * (1 + slack) for b0, b1 in zip(vals, vals[1:]))


RICHARDSON_DEGREE = 3


def _extrapolate(samples, power, degree=RICHARDSON_DEGREE):
    """Value at ``h = 0`` of the polynomial in ``h = l**-power`` through the last samples.

    The knots of the family cluster at width ``l**(-1/(r - k_top))`` as ``l``
    grows, so the norm expands in powers of that width; ``power`` is
    ``1/(r - k_top)``.
    """
    pts = samples[-(degree + 1):]
    h = np.array([l ** -power for l, _ in pts])
    b = np.array([v for _, v in pts])
    mat = np.vander(h / h[0], len(pts), increasing=True)
    return float(np.linalg.solve(mat, b)[0])


def _knot_guess(prev, l_prev, l_new):
    """Warm start for the next sample: extrapolate knots linearly in 1/l."""
    if len(prev) < 2:
        return None
    (l0, a0), (l1, a1) = prev[-2], prev[-1]
    if len(a0) != len(a1):
        return None
    a0, a1 = np.asarray(a0), np.asarray(a1)
    u0, u1, u = 1 / l0, 1 / l1, 1 / l_new
    g = a1 + (a1 - a0) * (u - u1) / (u1 - u0)
    if np.all(np.diff(g) < 0) and g[-1] > 0:
        return tuple(g)
    return None


# extrapolation is accepted at the round-off floor if successive estimates
# agree to this multiple of limit_tolerance
NOISE_ALLOWANCE = 1e3


def _limit_run(r, k1, tail_orders, tail_targets, config):
    tol = config.equality_tolerance
    power = 1.0 / (r - tail_orders[-1])
    start = ks.family_start(r, tail_orders, tail_targets, tol, config.limit_factor)
    samples, history = [], []
    best = None  # (error, estimate, sample count)
    est_prev = None
    l = start.l
    for m in range(config.limit_stages):
        if m == 0:
            spline = start.spline
        else:
            guess = _knot_guess(history, history[-1][0], l)
            try:
                spline = ks.solve_for_l(r, tail_orders, tail_targets, l, tol, guess)
            except SolverError:
                break
        bound = float(closed_form_norms(spline, (k1,))[0])
        if samples and bound > samples[-1][1] * (1 + 1e-9):
            break  # round-off floor: the family norm stopped decreasing
        samples.append((l, bound))
        history.append((l, spline.knots))
        if len(samples) >= 3:
            est = _extrapolate(samples, power)
            if est_prev is not None:
                err = abs(est - est_prev)
                if best is None or err < best[0]:
                    best = (err, est, len(samples))
                if err <= config.limit_tolerance * abs(est):
                    return LimitEstimate(est, samples), err, start
                if len(samples) >= 6 and err > 30 * best[0]:
                    break
            est_prev = est
        l *= config.limit_factor
    if best is not None and best[0] <= NOISE_ALLOWANCE * config.limit_tolerance * abs(best[1]):
        return LimitEstimate(best[1], samples[: best[2]]), best[0], start
    raise NumericalFailure("large-l extrapolation did not converge", samples=samples)


def estimate_limit(r, k1, tail_orders, tail_targets, config=None):
    """Limit of the norm at ``k1`` along the tail family as the top norm grows.

    Samples the family at ``l_start * factor**m`` (``l_start`` is where the
    tail family begins), extrapolates each run of four samples to zero knot
    width, and stops once two successive estimates agree to
    ``limit_tolerance``.  If round-off stops the sequence first, the closest
    pair of estimates is accepted when it agrees to ``NOISE_ALLOWANCE`` times
    that tolerance.
    """
    config = config or DecisionConfig()
    tail_orders = tuple(int(k) for k in tail_orders)
    if not tail_orders or k1 >= tail_orders[0] or tail_orders[-1] >= r:
        raise InvalidArgument("need k1 < tail orders < r", field="orders")
    if len(tail_orders) < 2:
        raise InvalidArgument("tail must contain at least two orders", field="orders")
    est, _, _ = _limit_run(r, k1, tail_orders, tuple(tail_targets), config)
    return est


# ---------------------------------------------------------------------------
# decision


def decide(orders: OrderSpec, targets, config: DecisionConfig | None = None) -> Verdict:
    """Classify the target norms as admissible (with type and witness) or not."""
    config = config or DecisionConfig()
    spec, tg = _coerce(orders, targets)
    try:
        if spec.top_is_r:
            return _decide_top(spec, tg, config)
        return _decide_below(spec, tg, config)
    except NumericalFailure:
        raise
    except SolverError as exc:
        raise NumericalFailure(f"solver failure: {exc}") from exc


def _verdict(spec, tg, admissible, kind, witness, stage, margins, certainty, limit=None):
    return Verdict(
        admissible,
        kind,
        witness,
        int(stage),
        tuple(float(v) for v in margins),
        certainty,
        spec.r,
        spec.orders,
        tg.values,
        limit,
    )


def _decide_top(spec, tg, config):
    r, k, M = spec.r, spec.orders, tg.values
    tol = config.equality_tolerance
    l = M[-1]
    if spec.d == 2:
        w = ks.single_knot(r, k[0], M[0], l)
        return _verdict(spec, tg, True, SplineType.TYPE1, w, 0, (0.0, 0.0), Certainty.CERTAIN)
    try:
        out = ks.stage_ladder(r, k[:-1], M[:-1], l, tol)
    except SolverError as exc:
        raise NumericalFailure(f"staged construction failed: {exc}") from exc
    margins = list(out.margins) + [0.0]
    if out.status == "complete":
        return _verdict(spec, tg, True, SplineType.TYPE1, out.witness, 0, margins, Certainty.CERTAIN)
    if out.status == "below":
        return _verdict(spec, tg, False, None, None, out.index, margins, Certainty.CERTAIN)
    # equality at out.index: lower orders must match exactly, except an excess
    # at order 0 which a positive constant absorbs
    w = out.witness
    norms = closed_form_norms(w, k)
    for j in range(out.index - 1, -1, -1):
        cmp = ks.compare(M[j], float(norms[j]), tol)
        if cmp == 0:
            continue
        if j == 0 and k[0] == 0 and cmp > 0:
            w3 = w.with_constant(M[0] - float(norms[0]))
            return _verdict(spec, tg, True, SplineType.TYPE3, w3, out.index, margins, Certainty.BOUNDARY)
        return _verdict(spec, tg, False, None, None, j, margins, Certainty.BOUNDARY)
    return _verdict(spec, tg, True, SplineType.TYPE2, w, out.index, margins, Certainty.BOUNDARY)


def _decide_below(spec, tg, config):
    r, k, M = spec.r, spec.orders, tg.values
    tol = config.equality_tolerance
    if spec.d == 2:
        w = ks.two_norm_min_l(r, k, M)
        return _verdict(spec, tg, True, SplineType.TYPE1, w, 0, (0.0, 0.0), Certainty.CERTAIN)
    tail = _decide_below(spec.tail(), tg.tail(), config)
    if not tail.admissible:
        return _verdict(
            spec, tg, False, None, None, tail.binding_stage + 1,
            (float("nan"),) + tail.margins, tail.certainty,
        )
    est, err, start = _limit_run(r, k[0], k[1:], M[1:], config)
    margins = (M[0] - est.limit,) + tail.margins
    cmp = ks.compare(M[0], est.limit, tol)
    # a margin within a few extrapolation errors is flagged, not trusted
    close = cmp == 0 or abs(M[0] - est.limit) <= 4 * err
    if cmp <= 0:
        certainty = Certainty.BOUNDARY if close else Certainty.CERTAIN
        return _verdict(spec, tg, False, None, None, 0, margins, certainty, est.limit)
    kind, witness, certainty = _witness_below(r, k, M, est, start, config)
    if close:
        certainty = Certainty.BOUNDARY
    return _verdict(spec, tg, True, kind, witness, 0, margins, certainty, est.limit)


def _witness_below(r, k, M, est, start, config):
    """Witness for an admissible set whose orders are all below r."""
    tol = config.equality_tolerance
    factor = config.limit_factor
    hit = ks.cross_family(r, k, M, start, tol, factor, max_stages=config.limit_stages + 60)
    if hit.status == "found":
        if hit.spline.s < len(k) - 1:
            return SplineType.TYPE2, hit.spline, Certainty.BOUNDARY
        return SplineType.TYPE1, hit.spline, Certainty.CERTAIN
    if hit.status == "below":
        raise NumericalFailure("could not bracket the witness", samples=est.samples)
    # the lowest target is above every spline of the tail family that could be reached
    b0 = est.samples[0][1]
    if k[0] == 0 and start.attained:
        return SplineType.TYPE3, start.spline.with_constant(M[0] - b0), Certainty.CERTAIN
    l_e = start.l * factor if start.attained else start.l
    tail = ks.solve_for_l(r, k[1:], M[1:], l_e, tol)
    system = ks.MomentSystem(r, k[1:], M[1:], l=l_e)
    spline, _ = ks.grow_knot(tail, k[0], M[0], system)
    return SplineType.EXTENDED, spline, Certainty.CERTAIN


# ---------------------------------------------------------------------------
# extremal comparison


@dataclass(frozen=True)
class ExtremalReport:
    """Comparison of a function against a verdict's witness at one order.

    ``signed_difference`` is ``(-1)**gap * (||x^(k)|| - ||phi^(k)||)``; the
    extremal property says it is nonnegative.  For the top-order check
    (orders all below r) ``gap`` is ``None`` and the sign is +1.
    """

    order: int
    gap: int | None
    x_norm: float
    witness_norm: float
    signed_difference: float
    ok: bool
    strict: bool


def _gap_index(orders, k):
    return sum(1 for o in orders if o < k)


def extremal_check(x: MonotoneSpline, verdict: Verdict, k: int, tol=1e-8):
    """Sign comparison of ``||x^(k)||`` against the witness at an unconstrained order."""
    if not verdict.admissible:
        raise InvalidArgument("verdict is not admissible", field="verdict")
    r, orders = verdict.r, verdict.orders
    if x.r != r:
        raise InvalidArgument("function and verdict have different r", field="x")
    if k in orders and not (k == r and orders[-1] < r):
        raise InvalidArgument(f"order {k} is constrained", field="order")
    if not 0 <= k <= r:
        raise InvalidArgument(f"order must lie in [0, {r}]", field="order")
    xn = measure_norms(x, orders)
    wn = closed_form_norms(verdict.witness, orders)
    if not np.allclose(xn, wn, rtol=tol, atol=0):
        raise InvalidArgument("function and witness disagree at a constrained order", field="x")
    x_k = float(measure_norms(x, (k,))[0])
    w_k = float(closed_form_norms(verdict.witness, (k,))[0])
    if k == r and orders[-1] < r:
        gap, sign = None, 1.0
    else:
        gap = _gap_index(orders, k)
        sign = -1.0 if gap % 2 else 1.0
    diff = sign * (x_k - w_k)
    scale = max(abs(x_k), abs(w_k), 1e-300)
    return ExtremalReport(k, gap, x_k, w_k, diff, diff >= -tol * scale, diff > tol * scale)


def extremal_checks(x: MonotoneSpline, verdict: Verdict, tol=1e-8):
    """All applicable extremal comparisons for ``x`` against ``verdict``.

    Intermediate orders are compared only when the top order is ``r``; when
    all orders are below ``r`` the top-derivative comparison is made instead
    (skipped for :attr:`SplineType.EXTENDED`, whose ``l`` is not extremal).
    """
    r, orders = verdict.r, verdict.orders
    reports = []
    if orders[-1] == r:
        for k in range(r + 1):
            if k not in orders:
                reports.append(extremal_check(x, verdict, k, tol))
    elif verdict.spline_type is not SplineType.EXTENDED:
        reports.append(extremal_check(x, verdict, r, tol))
    return reports
