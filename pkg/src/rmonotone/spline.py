"""Truncated-power splines on the negative half-line.

Two representations are provided:

* :class:`AlternatingSpline` -- ``C + (l/r!) * sum_j (-1)**(j+1) * (t + a_j)_+**r``
  with knots ``a_1 > a_2 > ... > a_s > 0``.  These are the extremal functions.
* :class:`MonotoneSpline` -- ``C + sum_j c_j (t + b_j)_+**r / r!`` with
  nonnegative prefix sums of the coefficients, which is exactly the condition
  for the function to be r-monotone on ``t <= 0``.

Every derivative of order below ``r`` of an r-monotone function is
nonnegative and nondecreasing on the half-line, so its sup-norm is its value
at ``t = 0``.  That is what makes all norms available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument

MAX_ORDER = 30
DEFAULT_GRID = 10_001


def _check_r(r):
    if not isinstance(r, (int, np.integer)) or isinstance(r, bool):
        raise InvalidArgument(f"r must be an integer, got {r!r}", field="r")
    if r < 1:
        raise InvalidArgument(f"r must be positive, got {r}", field="r")
    if r > MAX_ORDER:
        raise InvalidArgument(f"r={r} exceeds the supported maximum {MAX_ORDER}", field="r")
    return int(r)


@dataclass(frozen=True)
class OrderSpec:
    """Highest order ``r`` and the strictly increasing derivative orders ``k``."""

    r: int
    orders: tuple

    def __post_init__(self):
        r = _check_r(self.r)
        try:
            orders = tuple(int(k) for k in self.orders)
        except (TypeError, ValueError):
            raise InvalidArgument("orders must be a sequence of integers", field="orders")
        if any(int(k) != k for k in self.orders):
            raise InvalidArgument("orders must be integers", field="orders")
        if len(orders) < 2:
            raise InvalidArgument("at least two orders are required", field="orders")
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise InvalidArgument(f"orders must be strictly increasing, got {list(orders)}", field="orders")
        if orders[0] < 0 or orders[-1] > r:
            raise InvalidArgument(f"orders must lie in [0, {r}], got {list(orders)}", field="orders")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "orders", orders)

    @property
    def d(self):
        return len(self.orders)

    @property
    def top_is_r(self):
        """True when the last prescribed order is the highest derivative."""
        return self.orders[-1] == self.r

    def tail(self):
        return OrderSpec(self.r, self.orders[1:])


@dataclass(frozen=True)
class NormTargets:
    """Positive target norms aligned with :attr:`OrderSpec.orders`."""

    values: tuple

    def __post_init__(self):
        try:
            values = tuple(float(v) for v in self.values)
        except (TypeError, ValueError):
            raise InvalidArgument("norms must be numbers", field="norms")
        if not all(math.isfinite(v) and v > 0 for v in values):
            raise InvalidArgument(f"norms must be finite and positive, got {list(values)}", field="norms")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def check_against(self, spec: OrderSpec):
        if len(self.values) != spec.d:
            raise InvalidArgument(
                f"got {len(self.values)} norms for {spec.d} orders", field="norms"
            )
        return self

    def tail(self):
        return NormTargets(self.values[1:])


@dataclass(frozen=True)
class AlternatingSpline:
    """``C + (l/r!) * sum_j (-1)**(j+1) (t + a_j)_+**r`` on ``t <= 0``.

    An empty ``knots`` tuple is allowed and denotes the constant ``C``; it is
    used only as a building block and never counts as a member of the
    alternating family.
    """

    r: int
    l: float
    knots: tuple
    constant: float = 0.0

    def __post_init__(self):
        r = _check_r(self.r)
        knots = tuple(float(a) for a in self.knots)
        l = float(self.l)
        c = float(self.constant)
        if not (math.isfinite(l) and l > 0):
            raise InvalidArgument(f"l must be positive, got {l}", field="l")
        if not all(math.isfinite(a) and a > 0 for a in knots):
            raise InvalidArgument(f"knots must be positive, got {list(knots)}", field="knots")
        if any(b >= a for a, b in zip(knots, knots[1:])):
            raise InvalidArgument(f"knots must be strictly decreasing, got {list(knots)}", field="knots")
        if not (math.isfinite(c) and c >= 0):
            raise InvalidArgument(f"constant must be nonnegative, got {c}", field="constant")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "constant", c)

    @property
    def s(self):
        return len(self.knots)

    def coefficients(self):
        return np.array([self.l if j % 2 == 0 else -self.l for j in range(self.s)])

    def to_monotone(self) -> "MonotoneSpline":
        return MonotoneSpline(self.r, tuple(zip(self.knots, self.coefficients())), self.constant)

    def with_constant(self, constant) -> "AlternatingSpline":
        return AlternatingSpline(self.r, self.l, self.knots, constant)


@dataclass(frozen=True)
class MonotoneSpline:
    """``C + sum_j c_j (t + b_j)_+**r / r!`` with knots ``b_1 > ... > b_m > 0``.

    The prefix sums ``c_1 + ... + c_j`` are the values of the r-th derivative
    on successive knot intervals; they must be nonnegative.  Construction does
    not enforce that (so invalid objects can be diagnosed), use
    :func:`validate_r_monotone` or :meth:`is_r_monotone`.
    """

    r: int
    terms: tuple = field(default=())
    constant: float = 0.0

    def __post_init__(self):
        r = _check_r(self.r)
        terms = tuple((float(b), float(c)) for b, c in self.terms)
        if not all(math.isfinite(b) and b > 0 and math.isfinite(c) for b, c in terms):
            raise InvalidArgument("terms must have positive knots and finite coefficients", field="terms")
        bs = [b for b, _ in terms]
        if any(y >= x for x, y in zip(bs, bs[1:])):
            raise InvalidArgument(f"knots must be strictly decreasing, got {bs}", field="terms")
        c = float(self.constant)
        if not (math.isfinite(c) and c >= 0):
            raise InvalidArgument(f"constant must be nonnegative, got {c}", field="constant")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "constant", c)

    @property
    def knots(self):
        return tuple(b for b, _ in self.terms)

    def coefficients(self):
        return np.array([c for _, c in self.terms], dtype=float)

    def prefix_sums(self):
        return np.cumsum(self.coefficients())

    def is_r_monotone(self, tol=0.0):
        ps = self.prefix_sums()
        scale = np.max(np.abs(self.coefficients()), initial=0.0)
        return bool(np.all(ps >= -tol * scale))


@dataclass(frozen=True)
class ScaleTransform:
    """``x -> alpha * x(lam * t)``; scales the k-th derivative norm by ``alpha * lam**k``."""

    alpha: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "lam"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgument(f"{name} must be positive, got {v}", field=name)
            object.__setattr__(self, name, v)

    def factor(self, k):
        return self.alpha * self.lam**k

    def inverse(self):
        return ScaleTransform(1.0 / self.alpha, 1.0 / self.lam)

    def apply_targets(self, orders: Sequence[int], values: Sequence[float]):
        return tuple(v * self.factor(k) for k, v in zip(orders, values))


def _terms(spline):
    """Knots, coefficients and constant of either spline kind as arrays."""
    if isinstance(spline, AlternatingSpline):
        return np.asarray(spline.knots, dtype=float), spline.coefficients(), spline.constant
    if isinstance(spline, MonotoneSpline):
        return np.asarray(spline.knots, dtype=float), spline.coefficients(), spline.constant
    raise InvalidArgument(f"unsupported spline type {type(spline).__name__}")


def _check_order(k, r):
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= r:
        raise InvalidArgument(f"derivative order must be an integer in [0, {r}], got {k}", field="order")
    return int(k)


def eval_derivative(spline, k, t):
    """Value of the k-th derivative at ``t <= 0``; vectorised over ``t``.

    The r-th derivative is a step function, taken right-continuous at knots.
    """
    r = spline.r
    k = _check_order(k, r)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr > 0):
        raise InvalidArgument("evaluation points must be nonpositive", field="t")
    b, c, const = _terms(spline)
    shifted = t_arr[..., None] + b
    p = r - k
    if p == 0:
        basis = (shifted >= 0).astype(float)
    else:
        basis = np.where(shifted > 0, shifted, 0.0) ** p / math.factorial(p)
    out = basis @ c if b.size else np.zeros(t_arr.shape)
    if k == 0:
        out = out + const
    return float(out) if np.ndim(out) == 0 else out


def _alternating_sums(knots, powers):
    """``sum_j (-1)**(j+1) a_j**p`` for each ``p`` in ``powers``."""
    knots = np.asarray(knots, dtype=float)
    powers = np.asarray(powers, dtype=float)
    signs = np.where(np.arange(knots.size) % 2 == 0, 1.0, -1.0)
    return (knots[None, :] ** powers[:, None]) @ signs


def closed_form_norms(spline: AlternatingSpline, orders):
    """Sup-norms of the requested derivatives of an alternating spline."""
    r = spline.r
    orders = _orders_of(orders)
    for k in orders:
        _check_order(k, r)
    out = np.empty(len(orders))
    low = [i for i, k in enumerate(orders) if k < r]
    if low:
        p = np.array([r - orders[i] for i in low])
        sums = _alternating_sums(spline.knots, p) if spline.s else np.zeros(len(low))
        fact = np.array([math.factorial(int(q)) for q in p], dtype=float)
        out[low] = spline.l * sums / fact
    for i, k in enumerate(orders):
        if k == r:
            out[i] = spline.l if spline.s else 0.0
        elif k == 0:
            out[i] += spline.constant
    return out


def measure_norms(x: MonotoneSpline, orders):
    """Sup-norms of derivatives of an r-monotone truncated-power function.

    Orders below ``r`` are read off at ``t = 0``; the r-th norm is the largest
    prefix sum of the coefficients.
    """
    if isinstance(x, AlternatingSpline):
        x = x.to_monotone()
    r = x.r
    orders = _orders_of(orders)
    b, c, const = _terms(x)
    out = np.empty(len(orders))
    for i, k in enumerate(orders):
        k = _check_order(k, r)
        if k == r:
            out[i] = max(0.0, float(np.max(np.cumsum(c)))) if c.size else 0.0
        else:
            p = r - k
            out[i] = float(np.sum(c * b**p)) / math.factorial(p) if c.size else 0.0
            if k == 0:
                out[i] += const
    return out


def _orders_of(orders):
    if isinstance(orders, OrderSpec):
        return orders.orders
    if isinstance(orders, (int, np.integer)):
        return (int(orders),)
    return tuple(orders)


def rescale(spline, transform: ScaleTransform):
    """Return the spline for ``alpha * x(lam * t)``."""
    a, lam = transform.alpha, transform.lam
    if isinstance(spline, AlternatingSpline):
        return AlternatingSpline(
            spline.r,
            spline.l * a * lam**spline.r,
            tuple(k / lam for k in spline.knots),
            spline.constant * a,
        )
    if isinstance(spline, MonotoneSpline):
        f = a * lam**spline.r
        return MonotoneSpline(
            spline.r, tuple((b / lam, c * f) for b, c in spline.terms), spline.constant * a
        )
    raise InvalidArgument(f"unsupported spline type {type(spline).__name__}")


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of :func:`validate_r_monotone`; truthy when no violation was found."""

    ok: bool
    order: int | None = None
    t: float | None = None
    value: float | None = None

    def __bool__(self):
        return self.ok


def sample_grid(spline, grid_size=DEFAULT_GRID):
    """Uniform grid on ``[-(largest knot) - 1, 0]``."""
    b, _, _ = _terms(spline)
    left = -(float(b.max()) if b.size else 0.0) - 1.0
    return np.linspace(left, 0.0, int(grid_size))


def validate_r_monotone(spline, grid_size=DEFAULT_GRID, tol=1e-12):
    """Sample every derivative ``0..r`` on a grid and report the first negative value.

    A value counts as negative when it is below ``-tol`` times the largest
    magnitude seen at that derivative level.
    """
    if grid_size < 2:
        raise InvalidArgument("grid_size must be at least 2", field="grid_size")
    grid = sample_grid(spline, grid_size)
    for k in range(spline.r + 1):
        vals = np.asarray(eval_derivative(spline, k, grid))
        scale = max(float(np.max(np.abs(vals))), 1e-300)
        bad = np.nonzero(vals < -tol * scale)[0]
        if bad.size:
            i = int(bad[0])
            return MonotonicityReport(False, k, float(grid[i]), float(vals[i]))
    return MonotonicityReport(True)
