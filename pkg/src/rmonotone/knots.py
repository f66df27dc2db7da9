"""Solvers for the nonlinear moment systems that pin spline knots to norms.

For an alternating spline with knots ``a_1 > ... > a_s > 0`` and top
derivative ``l`` the norm of order ``k < r`` is::

    l / (r-k)! * sum_j (-1)**(j+1) * a_j**(r-k)

so prescribing ``s`` norms gives a square polynomial system in the knots.
Its Jacobian is, up to column signs and row factors, a generalized
Vandermonde matrix, which is nonsingular on the ordered cone; solutions are
unique there.  Everything below relies on those two facts.

All solves are carried out in normalized units (largest knot and ``l`` of
order one) and mapped back afterwards.
"""

from __future__ import annotations

import copy
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgument, MaxIterations, NoSolution, PathCollision, SolverError
from .spline import AlternatingSpline, ScaleTransform, _check_r, closed_form_norms

EPS = np.finfo(float).eps
RESIDUAL_RTOL = 1e-12
MERGE_RTOL = 1e-10
MAX_HALVINGS = 60


@dataclass(frozen=True)
class MomentSystem:
    """Norm equalities for the orders in ``orders`` (all below ``r``).

    ``l`` is the fixed top-derivative norm, or ``None`` when it is an
    unknown; the knot count is whatever makes the system square.
    """

    r: int
    orders: tuple
    targets: tuple
    l: float | None = None

    def __post_init__(self):
        r = _check_r(self.r)
        orders = tuple(int(k) for k in self.orders)
        targets = tuple(float(m) for m in self.targets)
        if len(orders) != len(targets):
            raise InvalidArgument("orders and targets differ in length", field="targets")
        if not orders:
            raise InvalidArgument("at least one constrained order is required", field="orders")
        if any(b <= a for a, b in zip(orders, orders[1:])) or orders[0] < 0 or orders[-1] >= r:
            raise InvalidArgument(
                f"constrained orders must increase strictly within [0, {r - 1}], got {list(orders)}",
                field="orders",
            )
        if not all(math.isfinite(m) and m > 0 for m in targets):
            raise InvalidArgument("targets must be positive", field="targets")
        if self.l is not None:
            l = float(self.l)
            if not (math.isfinite(l) and l > 0):
                raise InvalidArgument("l must be positive", field="l")
            object.__setattr__(self, "l", l)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "targets", targets)
        if self.n_knots < 1:
            raise InvalidArgument("system needs at least one knot", field="orders")

    @property
    def n_knots(self):
        return len(self.orders) - (1 if self.l is None else 0)

    @property
    def powers(self):
        return np.array([self.r - k for k in self.orders], dtype=float)


# ---------------------------------------------------------------------------
# residual, Jacobian, determinant


def _signs(n):
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def residual(knots, l, system: MomentSystem):
    """``F_i = l/(r-k_i)! * sum_j (-1)**(j+1) a_j**(r-k_i) - M_i``."""
    knots = np.asarray(knots, dtype=float)
    expected = system.n_knots
    if knots.ndim != 1 or knots.size != expected:
        raise InvalidArgument(f"expected {expected} knots, got {knots.size}", field="knots")
    _check_ordered(knots)
    p = system.powers
    fact = np.array([math.factorial(int(q)) for q in p])
    sums = (knots[None, :] ** p[:, None]) @ _signs(knots.size)
    return l * sums / fact - np.asarray(system.targets)


def jacobian(knots, l, system: MomentSystem):
    """Derivatives of the residual with respect to the knots."""
    knots = np.asarray(knots, dtype=float)
    p = system.powers
    fact = np.array([math.factorial(int(q) - 1) for q in p])
    return l * (knots[None, :] ** (p[:, None] - 1)) * _signs(knots.size)[None, :] / fact[:, None]


def _check_ordered(x, what="knots"):
    x = np.asarray(x, dtype=float)
    if x.size and (np.any(np.diff(x) >= 0) or x[-1] <= 0 or not np.all(np.isfinite(x))):
        raise InvalidArgument(f"{what} must be strictly decreasing and positive", field=what)


def vandermonde_det(x, exponents):
    """Determinant of ``[x_j ** alpha_i]`` for decreasing ``x > 0`` and decreasing ``alpha``.

    Such matrices are totally positive, so the value is strictly positive.
    The float computation is cross-checked by an extended-precision one when
    the matrix is poorly conditioned, so the sign is always reliable.
    """
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(exponents, dtype=float)
    if x.ndim != 1 or alpha.shape != x.shape or x.size == 0:
        raise InvalidArgument("x and exponents must be nonempty vectors of equal length")
    _check_ordered(x, "x")
    if np.any(np.diff(alpha) >= 0) or not np.all(np.isfinite(alpha)):
        raise InvalidArgument("exponents must be strictly decreasing", field="exponents")
    mat = x[None, :] ** alpha[:, None]
    if x.size == 1:
        return float(mat[0, 0])
    # equilibrate: the matrix is strongly graded, the scaled one usually is not
    rows = np.max(mat, axis=1)
    scaled = mat / rows[:, None]
    cols = np.max(scaled, axis=0)
    scaled = scaled / cols[None, :]
    cond = np.linalg.cond(scaled)
    log_scale = float(np.sum(np.log(rows)) + np.sum(np.log(cols)))
    if np.isfinite(cond) and cond < 1e10:
        sign, logdet = np.linalg.slogdet(scaled)
        if sign > 0:
            return _finite_exp(logdet + log_scale)
    return _vandermonde_det_mp(x, alpha, cond)


def _finite_exp(logdet):
    # the determinant is positive; keep it representable
    return float(np.exp(np.clip(logdet, -745.0, 709.0))) or float(np.nextafter(0, 1))


def _vandermonde_det_mp(x, alpha, cond):
    """Extended-precision determinant, working precision sized from the condition number."""
    import mpmath

    digits = 0 if not np.isfinite(cond) else math.log10(max(cond, 1.0))
    dps = int(30 + digits)
    while dps <= 2000:
        with mpmath.workdps(dps):
            mat = mpmath.matrix([[mpmath.mpf(float(xj)) ** mpmath.mpf(float(ai)) for xj in x] for ai in alpha])
            det = mpmath.det(mat)
            if det > 0:
                return _finite_exp(float(mpmath.log(det)))
        dps *= 2
    raise MaxIterations("extended-precision determinant did not resolve")


# ---------------------------------------------------------------------------
# damped Newton on the normalized system


class _Scaled:
    """Moment equations ``norm_i / M_i - 1`` in normalized units.

    ``free_l`` appends ``l`` as the last unknown.
    """

    def __init__(self, r, orders, targets, l=None):
        self.r = r
        self.p = np.array([r - k for k in orders], dtype=float)
        self.fact = np.array([math.factorial(r - k) for k in orders], dtype=float)
        self.fact1 = np.array([math.factorial(r - k - 1) for k in orders], dtype=float)
        self.M = np.asarray(targets, dtype=float)
        self.l = l

    @property
    def free_l(self):
        return self.l is None

    def with_targets(self, targets):
        out = copy.copy(self)
        out.M = np.asarray(targets, dtype=float)
        return out

    def norms(self, x):
        a, l = self.split(x)
        return l * ((a[None, :] ** self.p[:, None]) @ _signs(a.size)) / self.fact

    def split(self, x):
        if self.free_l:
            return x[:-1], x[-1]
        return x, self.l

    def in_domain(self, x):
        a, l = self.split(x)
        return bool(
            np.all(np.isfinite(x)) and l > 0 and a[-1] > 0 and np.all(np.diff(a) < 0)
        )

    def evaluate(self, x):
        a, l = self.split(x)
        sg = _signs(a.size)
        pw = a[None, :] ** self.p[:, None]
        sums = pw @ sg
        F = l * sums / self.fact / self.M - 1.0
        J = l * (a[None, :] ** (self.p[:, None] - 1)) * sg / (self.fact1 * self.M)[:, None]
        if self.free_l:
            J = np.hstack([J, (sums / self.fact / self.M)[:, None]])
        # attainable accuracy: rounding in the alternating sum relative to the target
        floor = 16 * EPS * l * (pw @ np.ones(a.size)) / self.fact / self.M
        tol = np.maximum(RESIDUAL_RTOL, floor)
        return F, J, tol


def _refine(system: _Scaled, x, F, J, steps=3):
    """Extra Newton steps past the tolerance, kept while the residual shrinks."""
    norm = np.max(np.abs(F))
    for _ in range(steps):
        try:
            cand = x + np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        if not system.in_domain(cand):
            break
        Fc, Jc, _ = system.evaluate(cand)
        nc = np.max(np.abs(Fc))
        if not nc < norm:
            break
        x, F, J, norm = cand, Fc, Jc, nc
    return x


def _newton(system: _Scaled, x0, max_iter=60):
    """Damped Newton iteration confined to the ordered positive cone."""
    x = np.array(x0, dtype=float)
    if not system.in_domain(x):
        raise NoSolution("initial guess outside the ordered positive cone")
    F, J, tol = system.evaluate(x)
    for it in range(max_iter):
        if np.all(np.abs(F) <= tol):
            return _refine(system, x, F, J), it
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise NoSolution("singular Jacobian")
        if not np.all(np.isfinite(step)):
            raise NoSolution("non-finite Newton step")
        merit = float(np.sum((F / tol) ** 2))
        t = 1.0
        accepted = False
        left_domain = False
        for _ in range(MAX_HALVINGS):
            cand = x + t * step
            if system.in_domain(cand):
                Fc, Jc, tolc = system.evaluate(cand)
                if float(np.sum((Fc / tolc) ** 2)) < merit * (1 - 1e-4 * t):
                    accepted = True
                    break
            else:
                left_domain = True
            t *= 0.5
        if not accepted:
            if np.all(np.abs(F) <= 64 * tol):
                return x, it
            reason = "iterate leaves the ordered positive cone" if left_domain else "residual stalls"
            raise NoSolution(f"Newton failed: {reason} (max |F| = {np.max(np.abs(F)):.3e})")
        x, F, J, tol = cand, Fc, Jc, tolc
    if np.all(np.abs(F) <= tol):
        return x, max_iter
    raise MaxIterations(f"Newton did not converge in {max_iter} iterations (max |F| = {np.max(np.abs(F)):.3e})")


HOMOTOPY_STEPS = 400


def _target_homotopy(eqs: _Scaled, x0, max_iter):
    """Follow the solution from the guess's own norms to the targets.

    The guess solves the system exactly for its own norms; the targets are
    moved geometrically towards the requested ones and each step is
    corrected by Newton.  The Jacobian is nonsingular on the ordered cone,
    so the path only fails by leaving it, which means the targets are not
    attainable with this knot count.
    """
    start = eqs.norms(x0)
    if not np.all(start > 0):
        raise NoSolution("guess has a nonpositive norm")
    log0, log1 = np.log(start), np.log(eqs.M)
    x, t, dt = np.array(x0, dtype=float), 0.0, 0.25
    for _ in range(HOMOTOPY_STEPS):
        t_new = min(1.0, t + dt)
        sub = eqs.with_targets(np.exp(log0 + t_new * (log1 - log0)))
        try:
            x_new, _ = _newton(sub, x, max_iter=max_iter if t_new == 1.0 else 20)
        except (NoSolution, MaxIterations):
            dt *= 0.5
            if dt < 1e-9:
                raise NoSolution("targets not attainable: solution path leaves the ordered cone")
            continue
        x, t = x_new, t_new
        if t == 1.0:
            return x
        dt = min(2 * dt, 1.0)
    raise MaxIterations("target homotopy did not reach the targets")


def _normalizer(r, largest_knot, l):
    """Transform taking a spline with these parameters to largest knot 1 and l = 1."""
    lam = float(largest_knot)
    return ScaleTransform(1.0 / (l * lam**r), lam)


def solve_fixed_count(system: MomentSystem, initial_knots, initial_l=None, max_iter=60):
    """Solve a square moment system from an ordered initial guess.

    Returns the knots, or ``(knots, l)`` when ``system.l`` is ``None``.  The
    ordered solution is unique, so any converged run returns the same answer.
    Damped Newton is tried first, then a homotopy in the targets starting
    from the guess's own norms, then (for fixed ``l``) the staged knot-growing
    construction, which needs no guess.  Raises :class:`NoSolution` when the
    targets are not attainable with this knot count, :class:`MaxIterations`
    when an iteration budget runs out.
    """
    try:
        return _solve_square(system, initial_knots, initial_l, max_iter)
    except (NoSolution, MaxIterations):
        if system.l is None or system.n_knots < 2:
            raise
    out = stage_ladder(system.r, system.orders, system.targets, system.l)
    if out.status != "complete":
        raise NoSolution("targets not attainable with this knot count")
    return _solve_square(system, out.witness.knots, None, max_iter, homotopy=False)


def _solve_square(system, initial_knots, initial_l=None, max_iter=60, homotopy=True):
    guess = np.asarray(initial_knots, dtype=float)
    if guess.ndim != 1 or guess.size != system.n_knots:
        raise InvalidArgument(
            f"expected {system.n_knots} initial knots, got {guess.size}", field="initial_knots"
        )
    _check_ordered(guess, "initial_knots")
    r = system.r
    p = system.powers
    if system.l is None:
        if initial_l is None:
            # match the last equation exactly with the guessed knots
            sums = (guess[None, :] ** p[-1:, None]) @ _signs(guess.size)
            initial_l = system.targets[-1] * math.factorial(int(p[-1])) / float(sums[0])
            if not initial_l > 0:
                initial_l = 1.0
        l_guess = float(initial_l)
    else:
        l_guess = system.l
    tr = _normalizer(r, guess[0], l_guess)
    scaled_targets = tr.apply_targets(system.orders, system.targets)
    if system.l is None:
        eqs = _Scaled(r, system.orders, scaled_targets)
        x0 = np.append(guess / tr.lam, 1.0)
    else:
        eqs = _Scaled(r, system.orders, scaled_targets, l=1.0)
        x0 = guess / tr.lam
    try:
        x, _ = _newton(eqs, x0, max_iter=max_iter)
    except (NoSolution, MaxIterations):
        if not homotopy:
            raise
        x = _target_homotopy(eqs, x0, max_iter)
    a, l = eqs.split(x)
    knots = a * tr.lam
    if system.l is None:
        return knots, l / (tr.alpha * tr.lam**r)
    return knots


def single_knot(r, order, target, l):
    """The one-knot spline with norm ``target`` at ``order`` and top norm ``l``."""
    p = r - order
    a = (math.factorial(p) * target / l) ** (1.0 / p)
    return AlternatingSpline(r, l, (a,))


def two_norm_min_l(r, orders, targets):
    """One-knot spline matching two norms below order r; its ``l`` is forced."""
    (k1, k2), (m1, m2) = orders, targets
    p1, p2 = r - k1, r - k2
    a = (m1 * math.factorial(p1) / (m2 * math.factorial(p2))) ** (1.0 / (p1 - p2))
    l = m2 * math.factorial(p2) / a**p2
    return AlternatingSpline(r, l, (a,))


# ---------------------------------------------------------------------------
# continuation: grow a new smallest knot


@dataclass(frozen=True)
class TraceStep:
    new_knot: float
    knots: tuple
    norm: float


@dataclass
class ContinuationTrace:
    steps: list = field(default_factory=list)
    reason: str = ""
    crossings: int = 0


def grow_knot(witness: AlternatingSpline, new_order, new_target, system: MomentSystem,
              max_steps=5000):
    """Add a smallest knot to ``witness`` until the norm at ``new_order`` hits ``new_target``.

    The witness must satisfy ``system`` (fixed ``l``).  A new knot starts at
    0, where the spline is unchanged, and moves right; the remaining knots
    follow the implicit-function path that keeps every constrained norm
    fixed.  Along that path the norm at ``new_order`` grows without bound, so
    the first crossing of ``new_target`` exists and is returned together with
    the trace of the path.
    """
    r = witness.r
    if system.l is None or system.r != r:
        raise InvalidArgument("system must have fixed l and the witness's r", field="system")
    if witness.s != system.n_knots:
        raise InvalidArgument("witness knot count does not match the system", field="witness")
    if not (isinstance(new_order, (int, np.integer)) and 0 <= new_order < system.orders[0]):
        raise InvalidArgument("new_order must be below every constrained order", field="new_order")
    current = float(closed_form_norms(witness, (new_order,))[0])
    if not new_target > current:
        raise InvalidArgument(
            f"new target {new_target} must exceed the current norm {current}", field="new_target"
        )

    tr = _normalizer(r, witness.knots[0], witness.l)
    undo = tr.inverse()
    s = witness.s
    orders = system.orders
    M = np.asarray(tr.apply_targets(orders, system.targets))
    m_new = new_target * tr.factor(new_order)
    fixed = _Scaled(r, orders, M, l=1.0)
    full = _Scaled(r, (new_order,) + orders, np.append(m_new, M), l=1.0)
    q = r - new_order
    sign_new = 1.0 if s % 2 == 0 else -1.0
    fq = math.factorial(q)

    a = np.asarray(witness.knots, dtype=float) / tr.lam
    a, _ = _newton(fixed, a)

    def h(a_, tau):
        return ((_signs(s) @ a_**q) + sign_new * tau**q) / fq - m_new

    def with_tau(a_, tau):
        # fixed system with the new knot frozen: shift targets by its contribution
        shift = sign_new * tau**fixed.p / fixed.fact
        return _Scaled(r, orders, M - shift, l=1.0)

    def correct(a_guess, tau):
        eqs = with_tau(a_guess, tau)
        if not (eqs.M > 0).all():
            raise NoSolution("new knot contribution exceeds a target")
        sol, _ = _newton(eqs, a_guess, max_iter=30)
        if sol[-1] <= tau:
            raise NoSolution("new knot overtook the smallest tracked knot")
        return sol

    def tangent(a_, tau):
        eqs = with_tau(a_, tau)
        _, J, _ = eqs.evaluate(a_)
        dG = sign_new * tau ** (fixed.p - 1) / (fixed.fact1 * eqs.M)
        try:
            return np.linalg.solve(J, -dG)
        except np.linalg.LinAlgError:
            return np.zeros_like(a_)

    trace = ContinuationTrace()

    def record(a_, tau):
        norm = (h(a_, tau) + m_new) / tr.factor(new_order)
        trace.steps.append(TraceStep(tau * tr.lam, tuple(a_ * tr.lam), float(norm)))

    tau = 0.0
    record(a, tau)
    h0 = h(a, tau)
    dtau = 0.05 * a[-1]
    for _ in range(max_steps):
        # relative step floor: below this the path has effectively ended
        if dtau < 1e-14 * max(a[0], 1.0):
            gaps = np.diff(np.append(a, tau))
            if np.min(np.abs(gaps)) < MERGE_RTOL * a[0] * 1e3:
                trace.reason = "collision"
                raise PathCollision("tracked knots merged before the target was reached")
            trace.reason = "step underflow"
            raise MaxIterations("continuation step size underflowed")
        tau_new = tau + dtau
        pred = a + dtau * tangent(a, tau)
        if not (np.all(np.diff(pred) < 0) and pred[-1] > tau_new):
            pred = a
        try:
            a_new = correct(pred, tau_new)
        except (NoSolution, MaxIterations):
            dtau *= 0.5
            continue
        h_new = h(a_new, tau_new)
        gaps = np.diff(np.append(a_new, tau_new))
        if np.min(np.abs(gaps)) < MERGE_RTOL * a_new[0]:
            trace.reason = "collision"
            raise PathCollision("tracked knots merged before the target was reached")
        if h_new >= 0:
            trace.crossings = 1
            knots = _locate_crossing(full, a, tau, h0, a_new, tau_new, h_new, correct, h)
            record(knots[:-1], knots[-1])
            trace.reason = "target reached"
            spline = AlternatingSpline(r, 1.0, tuple(knots))
            return rescale_spline(spline, undo), trace
        a, tau, h0 = a_new, tau_new, h_new
        record(a, tau)
        dtau *= 1.3
    trace.reason = "max steps"
    raise MaxIterations("continuation did not reach the target")


def rescale_spline(spline, transform):
    from .spline import rescale

    return rescale(spline, transform)


def _locate_crossing(full, a0, tau0, h0, a1, tau1, h1, correct, h):
    """Knots (including the new one) where the grown norm equals its target."""
    w = -h0 / (h1 - h0)
    guess = np.append(a0 + w * (a1 - a0), tau0 + w * (tau1 - tau0))
    try:
        if full.in_domain(guess):
            sol, _ = _newton(full, guess)
            return sol
    except (NoSolution, MaxIterations):
        pass
    # bracketing fallback on the new knot, then polish on the square system
    lo, hi, a_lo, a_hi = tau0, tau1, a0, a1

    def g(tau):
        nonlocal a_lo
        frac = (tau - lo) / (hi - lo) if hi > lo else 0.0
        a_t = correct(a_lo + frac * (a_hi - a_lo), tau)
        return h(a_t, tau), a_t

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val, a_mid = g(mid)
        if val >= 0:
            hi, a_hi = mid, a_mid
        else:
            lo, a_lo = mid, a_mid
        if hi - lo <= 4 * EPS * hi:
            break
    guess = np.append(a_hi, hi)
    try:
        sol, _ = _newton(full, guess)
        return sol
    except (NoSolution, MaxIterations):
        return guess


# ---------------------------------------------------------------------------
# staged construction for a fixed top-derivative norm


@dataclass
class StageOutcome:
    """Result of the staged knot construction.

    ``status`` is ``"complete"`` (every order matched by a spline with one
    knot per order), ``"below"`` (the target at ``index`` is smaller than the
    current witness allows) or ``"equal"`` (the target at ``index`` equals
    the witness norm within tolerance; lower orders were not consumed).
    ``margins[i]`` is target minus witness norm for order ``i`` measured
    against the witness in force when that order was examined.
    """

    status: str
    index: int
    witness: AlternatingSpline
    margins: list
    traces: list = field(default_factory=list)


def compare(target, value, tol):
    """Three-way comparison with relative tolerance: -1, 0 or +1."""
    if abs(target - value) <= tol * max(abs(target), abs(value)):
        return 0
    return 1 if target > value else -1


def stage_ladder(r, orders, targets, l, tol=1e-9):
    """Staged construction for the norms at ``orders`` (all below ``r``) with top norm ``l``.

    Start from the one-knot spline matching the highest order, then move down
    the orders: a target below the current witness norm stops with
    ``"below"``, an equal one stops with ``"equal"``, a larger one grows the
    witness by one knot.
    """
    orders = tuple(int(k) for k in orders)
    targets = tuple(float(m) for m in targets)
    m = len(orders)
    first = single_knot(r, orders[-1], targets[-1], l)
    tr = _normalizer(r, first.knots[0], l)
    undo = tr.inverse()
    M = tr.apply_targets(orders, targets)
    witness = AlternatingSpline(r, 1.0, (1.0,))
    margins = [0.0] * m
    traces = []

    def finish(status, index):
        w = rescale_spline(witness, undo)
        w = AlternatingSpline(r, l, w.knots, w.constant)  # keep l exact
        if status != "complete":
            norms = closed_form_norms(w, orders)
            for j in range(index + 1):
                margins[j] = targets[j] - float(norms[j])
        return StageOutcome(status, index, w, [float(v) for v in margins], traces)

    for i in range(m - 2, -1, -1):
        value = float(closed_form_norms(witness, (orders[i],))[0])
        cmp = compare(M[i], value, tol)
        if cmp < 0:
            return finish("below", i)
        if cmp == 0:
            return finish("equal", i)
        margins[i] = (M[i] - value) / tr.factor(orders[i])
        system = MomentSystem(r, orders[i + 1:], M[i + 1:], l=1.0)
        witness, trace = grow_knot(witness, orders[i], M[i], system)
        traces.append(trace)
    return finish("complete", 0)


def _remaining_equal(outcome, orders, targets, tol):
    """For an ``"equal"`` outcome: index of the first lower order that differs, or None."""
    norms = closed_form_norms(outcome.witness, orders)
    for j in range(outcome.index - 1, -1, -1):
        if compare(targets[j], float(norms[j]), tol) != 0:
            return j
    return None


# ---------------------------------------------------------------------------
# free top-derivative norm


def solve_for_l(r, orders, targets, l, tol=1e-9, guess=None):
    """Spline with top norm ``l`` matching all ``targets`` (orders below r).

    Has one knot per target, or one fewer exactly at the minimal ``l``.
    ``guess`` (knots) enables a Newton warm start before falling back to the
    staged construction.
    """
    orders = tuple(int(k) for k in orders)
    targets = tuple(float(m) for m in targets)
    if any(k >= r for k in orders):
        raise InvalidArgument("orders must be below r", field="orders")
    if guess is not None and len(guess) == len(orders):
        try:
            knots = _solve_square(MomentSystem(r, orders, targets, l=l), guess)
            return AlternatingSpline(r, l, tuple(knots))
        except (NoSolution, MaxIterations, InvalidArgument):
            pass
    if len(orders) == 1:
        return single_knot(r, orders[0], targets[0], l)
    out = stage_ladder(r, orders, targets, l, tol)
    if out.status == "complete":
        return out.witness
    if out.status == "equal" and _remaining_equal(out, orders, targets, tol) is None:
        return out.witness
    raise NoSolution(f"no spline with top norm {l} matches the targets")


def _bound_at(r, order, tail_orders, tail_targets, l, tol, guess=None):
    spline = solve_for_l(r, tail_orders, tail_targets, l, tol, guess)
    return float(closed_form_norms(spline, (order,))[0]), spline


@dataclass(frozen=True)
class FamilyStart:
    """Where the family of splines matching a set of targets begins.

    ``lower`` is the infimum of the admissible top norms.  When it is
    attained (``attained``) ``l == lower`` and ``spline`` is the minimizer,
    which has one knot fewer than there are targets.  Otherwise the family
    is open at ``lower`` and ``spline`` is its member at ``l = lower * factor``.
    """

    l: float
    spline: AlternatingSpline
    attained: bool
    lower: float


@dataclass(frozen=True)
class Crossing:
    """Outcome of :func:`cross_family`.

    ``status`` is ``"found"`` (``spline`` matches every target at top norm
    ``l``), ``"above"`` (the lowest target exceeds every member reached) or
    ``"below"`` (it stays under every member up to the largest ``l`` tried).
    """

    status: str
    l: float | None = None
    spline: AlternatingSpline | None = None


def _polish(r, orders, targets, l, spline):
    system = MomentSystem(r, orders, targets, l=None)
    if spline.s != len(orders) - 1:
        return spline
    try:
        knots, l = solve_fixed_count(system, spline.knots, initial_l=l)
        return AlternatingSpline(r, l, tuple(knots))
    except (NoSolution, MaxIterations, PathCollision):
        return spline


def cross_family(r, orders, targets, start: FamilyStart, tol=1e-9, factor=4.0, max_stages=60):
    """Walk the family matching ``targets[1:]`` until the norm at ``orders[0]`` hits ``targets[0]``.

    Along the family that norm decreases in ``l``.  Above ``start.l`` the
    walk is geometric; below it (only when the family is open at
    ``start.lower``, where the norm grows without bound) the gap to the
    lower end is halved repeatedly.  The crossing is refined by Brent's
    method in ``log l`` and polished on the square system with ``l`` free.
    """
    k0, target = orders[0], float(targets[0])
    tail_o, tail_t = tuple(orders[1:]), tuple(targets[1:])
    b0 = float(closed_form_norms(start.spline, (k0,))[0])
    cmp = compare(target, b0, tol)
    if cmp == 0:
        return Crossing("found", start.l, start.spline)
    if cmp > 0:
        if start.attained:
            return Crossing("above")
        hi, lo = start.l, None
        gap = start.l / start.lower - 1.0
        guess = start.spline.knots
        for _ in range(max_stages):
            gap *= 0.5
            l = start.lower * (1.0 + gap)
            if gap < 1e-9:
                break
            try:
                b, spline = _bound_at(r, k0, tail_o, tail_t, l, tol, guess)
            except SolverError:
                break
            guess = spline.knots
            if b >= target:
                lo = l
                break
            hi = l
        if lo is None:
            return Crossing("above")
    else:
        lo, hi, guess = start.l, None, start.spline.knots
        for _ in range(max_stages):
            l = lo * factor
            b, spline = _bound_at(r, k0, tail_o, tail_t, l, tol, guess)
            guess = spline.knots
            if b <= target:
                hi = l
                break
            lo = l
        if hi is None:
            return Crossing("below")

    known = []  # (log l, knots) of solved members, for warm starts

    def g(logl):
        near = min(known, key=lambda e: abs(e[0] - logl), default=(None, None))[1]
        b, sp = _bound_at(r, k0, tail_o, tail_t, math.exp(logl), tol, near)
        if sp.s == len(tail_o):
            known.append((logl, sp.knots))
        return b - target

    glo, ghi = g(math.log(lo)), g(math.log(hi))
    if glo == 0.0:
        l_star = lo
    elif ghi == 0.0 or glo < 0.0:
        # the bracket can only degenerate through rounding at the ends
        l_star = hi if abs(ghi) <= abs(glo) else lo
    else:
        l_star = math.exp(brentq(g, math.log(lo), math.log(hi), xtol=1e-15, rtol=4 * EPS))
    near = min(known, key=lambda e: abs(e[0] - math.log(l_star)), default=(None, None))[1]
    spline = solve_for_l(r, tail_o, tail_t, l_star, tol, near)
    spline = _polish(r, orders, targets, l_star, spline)
    return Crossing("found", spline.l, spline)


@functools.lru_cache(maxsize=512)
def family_start(r, orders, targets, tol=1e-9, factor=4.0):
    """Lower end of the top norms ``l`` for which a spline matching ``targets`` exists.

    Two targets: closed form, always attained.  More targets: cross the
    family of the tail; if the lowest target is above every member the
    family is open and starts where the tail's family starts.
    """
    orders = tuple(int(k) for k in orders)
    targets = tuple(float(m) for m in targets)
    if len(orders) < 2:
        raise InvalidArgument("at least two constrained orders are required", field="orders")
    if len(orders) == 2:
        spline = two_norm_min_l(r, orders, targets)
        return FamilyStart(spline.l, spline, True, spline.l)
    tail = family_start(r, orders[1:], targets[1:], tol, factor)
    hit = cross_family(r, orders, targets, tail, tol, factor)
    if hit.status == "found":
        return FamilyStart(hit.l, hit.spline, True, hit.l)
    if hit.status == "below":
        raise NoSolution("lowest target is at or below the large-l limit")
    l = tail.lower * factor
    guess = tail.spline.knots if tail.l == l else None
    try:
        spline = solve_for_l(r, orders, targets, l, tol, guess)
    except PathCollision as exc:
        raise NoSolution(f"family is empty near l = {l}") from exc
    return FamilyStart(l, spline, False, tail.lower)


def solve_min_l(r, orders, targets, tol=1e-9, factor=4.0):
    """Smallest top norm ``l`` and the spline with one knot fewer than targets attaining it.

    With ``m`` targets the minimizer has ``m - 1`` knots.  It is located on
    the one-parameter family of splines that match all but the lowest order:
    along that family the lowest-order norm decreases with ``l``, so the
    minimizer is the point where it equals its target.  Raises
    :class:`NoSolution` when no such spline exists (the lowest target is too
    large or too small for the family).
    """
    orders = tuple(int(k) for k in orders)
    targets = tuple(float(m) for m in targets)
    m = len(orders)
    if m < 2:
        raise InvalidArgument("at least two constrained orders are required", field="orders")
    if any(k >= r for k in orders) or any(b <= a for a, b in zip(orders, orders[1:])):
        raise InvalidArgument("orders must increase strictly and stay below r", field="orders")
    if not all(v > 0 for v in targets):
        raise InvalidArgument("targets must be positive", field="targets")
    if m == 2:
        spline = two_norm_min_l(r, orders, targets)
        return spline.l, spline
    tail = family_start(r, orders[1:], targets[1:], tol, factor)
    hit = cross_family(r, orders, targets, tail, tol, factor)
    if hit.status == "above":
        raise NoSolution("lowest target exceeds every spline of the family")
    if hit.status == "below":
        raise NoSolution("lowest target is at or below the large-l limit")
    return hit.l, hit.spline
