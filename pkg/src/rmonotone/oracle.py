"""Brute-force checks: random r-monotone functions and grid-sampled norms.

Nothing here uses the closed-form norm formulas for alternating splines or
the knot solvers, so it can serve as an independent reference for both.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .admissibility import DecisionConfig, SplineType, decide, extremal_checks
from .errors import InvalidArgument, NumericalFailure, SolverError
from .spline import (
    MonotoneSpline,
    NormTargets,
    OrderSpec,
    closed_form_norms,
    eval_derivative,
    measure_norms,
    sample_grid,
)


@dataclass(frozen=True)
class GeneratorConfig:
    r: int
    pieces: int
    knot_range: tuple = (0.1, 3.0)
    coefficient_range: tuple = (0.1, 2.0)
    constant_range: tuple = (0.0, 0.0)
    zero_prefix_prob: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.r <= 12:
            raise InvalidArgument("r must lie in [1, 12]", field="r")
        if not 0 <= self.pieces <= 10:
            raise InvalidArgument("pieces must lie in [0, 10]", field="pieces")
        for name in ("knot_range", "coefficient_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise InvalidArgument(f"{name} must be a nonempty positive interval", field=name)
        lo, hi = self.constant_range
        if not 0 <= lo <= hi:
            raise InvalidArgument("constant_range must be a nonnegative interval", field="constant_range")


def generate(config: GeneratorConfig) -> MonotoneSpline:
    """Random r-monotone truncated-power function.

    Prefix sums of the coefficients (the values of the r-th derivative on
    successive knot intervals) are drawn nonnegative, the first one strictly
    positive, and differenced; no rejection step is needed.
    """
    rng = np.random.default_rng(config.seed)
    n = config.pieces
    lo, hi = config.knot_range
    while True:
        knots = np.sort(rng.uniform(lo, hi, n))[::-1]
        if n < 2 or np.min(-np.diff(knots)) > 1e-3 * (hi - lo):
            break
    clo, chi = config.coefficient_range
    prefix = rng.uniform(clo, chi, n)
    if n > 1:
        zero = rng.random(n) < config.zero_prefix_prob
        zero[0] = False
        prefix[zero] = 0.0
    coeffs = np.diff(np.concatenate([[0.0], prefix]))
    const = rng.uniform(*config.constant_range) if config.constant_range[1] > 0 else 0.0
    return MonotoneSpline(config.r, tuple(zip(knots, coeffs)), const)


def numeric_sup_norm(x, k, levels=12, start=1025, rtol=1e-9):
    """Grid supremum of ``|x^(k)|`` with doubling refinement.

    Stops when two successive grids agree to ``rtol``; raises
    :class:`NumericalFailure` after ``levels`` doublings.
    """
    if not 0 <= k <= x.r:
        raise InvalidArgument(f"order must lie in [0, {x.r}]", field="order")
    n = start
    prev = None
    for _ in range(levels + 1):
        grid = sample_grid(x, n)
        cur = float(np.max(np.abs(eval_derivative(x, k, grid))))
        if prev is not None and abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
        n = 2 * n - 1
    raise NumericalFailure(f"grid supremum of order {k} did not stabilize")


# ---------------------------------------------------------------------------
# comparison suite


@dataclass
class TrialFailure:
    trial: int
    seed: int
    reason: str
    r: int
    orders: list
    norms: list
    stage: int | None = None


@dataclass
class SuiteReport:
    trials: int = 0
    admissible: int = 0
    top_r_trials: int = 0
    below_r_trials: int = 0
    extremal_checks: int = 0
    perturbation_checks: int = 0
    failures: list = field(default_factory=list)
    worst_extremal: float = math.inf
    worst_witness_error: float = 0.0
    worst_perturbed_margin: float = -math.inf
    seconds: float = 0.0

    @property
    def failure_count(self):
        return len(self.failures)

    def to_dict(self):
        out = asdict(self)
        out["failure_count"] = self.failure_count
        for key in ("worst_extremal", "worst_perturbed_margin"):
            if not math.isfinite(out[key]):
                out[key] = None
        return out


def random_orders(rng, r, d, top_is_r):
    """Random strictly increasing orders; the last is ``r`` when ``top_is_r``."""
    if top_is_r:
        low = np.sort(rng.choice(r, size=d - 1, replace=False))
        return tuple(int(v) for v in low) + (r,)
    return tuple(int(v) for v in np.sort(rng.choice(r, size=d, replace=False)))


def run_trial(x, orders, config=None, tol=1e-8):
    """Decide the measured norms of ``x`` and run the extremal and perturbation checks.

    Returns ``(verdict, reports, perturbed_verdict)``; the perturbed verdict is
    ``None`` when there is no stage bound (``d == 2``).
    """
    spec = OrderSpec(x.r, orders)
    norms = measure_norms(x, spec)
    verdict = decide(spec, NormTargets(tuple(norms)), config)
    if not verdict.admissible:
        return verdict, [], None
    reports = extremal_checks(x, verdict, tol)
    perturbed = None
    bound = verdict.stage_bound
    if spec.d >= 3 and math.isfinite(bound) and bound > 0:
        lowered = (bound / 10.0,) + tuple(norms[1:])
        perturbed = decide(spec, NormTargets(lowered), config)
    return verdict, reports, perturbed


def comparison_suite(trials, seed=0, r_max=6, d_max=5, pieces_max=6, config=None, tol=1e-8):
    """Random end-to-end check of the decision engine against realizable norms.

    Every generated function is r-monotone, so its measured norms must be
    admissible; the witness must reproduce them; the extremal sign pattern
    must hold at unconstrained orders; and dividing the lowest target by 10
    below its stage bound must make the set inadmissible.  Failures are
    collected with their seeds rather than raised.
    """
    if trials < 1:
        raise InvalidArgument("trials must be positive", field="trials")
    config = config or DecisionConfig()
    report = SuiteReport()
    t0 = time.perf_counter()
    for trial in range(trials):
        trial_seed = int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])
        rng = np.random.default_rng(trial_seed)
        r = int(rng.integers(2, r_max + 1))
        top = bool(rng.integers(0, 2))
        d_hi = min(d_max, r + 1 if top else r)
        d = int(rng.integers(2, d_hi + 1))
        orders = random_orders(rng, r, d, top)
        gen = GeneratorConfig(r=r, pieces=int(rng.integers(1, pieces_max + 1)), seed=trial_seed)
        x = generate(gen)
        norms = [float(v) for v in measure_norms(x, orders)]
        report.trials += 1
        if top:
            report.top_r_trials += 1
        else:
            report.below_r_trials += 1

        def fail(reason, stage=None):
            report.failures.append(TrialFailure(trial, trial_seed, reason, r, list(orders), norms, stage))

        try:
            verdict, reports, perturbed = run_trial(x, orders, config, tol)
        except (SolverError, InvalidArgument) as exc:
            fail(f"{type(exc).__name__}: {exc}", getattr(exc, "stage", None))
            continue
        if not verdict.admissible:
            fail("realizable norms judged inadmissible", verdict.binding_stage)
            continue
        report.admissible += 1
        wn = closed_form_norms(verdict.witness, orders)
        err = float(np.max(np.abs(wn - norms) / np.asarray(norms)))
        report.worst_witness_error = max(report.worst_witness_error, err)
        if err > 1e-9:
            fail(f"witness misses the targets by {err:.3e}")
        if verdict.spline_type is SplineType.TYPE3 and orders[0] != 0:
            fail("constant offset reported with a positive lowest order")
        for rep in reports:
            report.extremal_checks += 1
            scale = max(rep.x_norm, rep.witness_norm)
            report.worst_extremal = min(report.worst_extremal, rep.signed_difference / scale)
            if not rep.ok:
                fail(f"extremal sign violated at order {rep.order} (difference {rep.signed_difference:.3e})")
        if perturbed is not None:
            report.perturbation_checks += 1
            report.worst_perturbed_margin = max(report.worst_perturbed_margin, perturbed.margins[0])
            if perturbed.admissible:
                fail("lowest target divided by 10 below its bound stayed admissible", 0)
    report.seconds = time.perf_counter() - t0
    return report
