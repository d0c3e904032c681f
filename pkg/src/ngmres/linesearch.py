"""Wolfe-condition line search with bracketing, cubic interpolation, and a
hard evaluation budget.

The search accepts a step ``b`` along direction ``p`` from ``x`` when both

* sufficient decrease:  ``f(x + b*p) <= f(x) + c1 * b * g(x)'p``
* curvature:            ``g(x + b*p)'p >= c2 * g(x)'p``

hold (the standard, not strong, curvature form).  Every trial point costs one
combined f/g evaluation; when the budget runs out the lowest trial point seen
is returned instead, flagged so callers know the Wolfe guarantees are absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    EvalCounter,
    NotDescentDirection,
    Objective,
    Vector,
    evaluate,
)

# Bracketing bounds: trials are clamped to [STEP_MIN, STEP_MAX], and the step
# doubles while the curvature condition keeps failing.
STEP_MIN = 1e-20
STEP_MAX = 1e20
EXPANSION = 2.0


@dataclass(frozen=True)
class WolfeParams:
    """Acceptance coefficients, starting step, and evaluation budget."""

    c1: float = 1e-4
    c2: float = 1e-2
    initial_step: float = 1.0
    max_fg_evals: int = 20

    def __post_init__(self) -> None:
        if not (0.0 < self.c1 < self.c2 < 1.0):
            raise ValueError("coefficients must satisfy 0 < c1 < c2 < 1")
        if self.initial_step <= 0.0:
            raise ValueError("initial_step must be positive")
        if self.max_fg_evals < 1:
            raise ValueError("max_fg_evals must be a positive integer")


class LineSearchStatus(Enum):
    WOLFE_SATISFIED = "wolfe_satisfied"
    BUDGET_EXHAUSTED_BEST_FOUND = "budget_exhausted_best_found"


@dataclass(frozen=True)
class LineSearchResult:
    """Outcome of one search.

    ``f_new`` and ``g_new`` are exactly the values evaluated at ``x_new``.
    With status BUDGET_EXHAUSTED_BEST_FOUND, ``x_new`` is the trial point with
    the lowest f seen and ``f_new <= f(x)`` is NOT guaranteed.
    """

    step: float
    x_new: Vector
    f_new: float
    g_new: Vector
    status: LineSearchStatus


@dataclass(frozen=True)
class SearchAudit:
    """Scalar log of one search, sufficient to re-check both Wolfe tests."""

    f0: float
    dphi0: float
    step: float
    f_new: float
    dphi_new: float
    c1: float
    c2: float
    status: LineSearchStatus

    def sufficient_decrease_ok(self) -> bool:
        return self.f_new <= self.f0 + self.c1 * self.step * self.dphi0

    def curvature_ok(self) -> bool:
        return self.dphi_new >= self.c2 * self.dphi0


def _cubic_min(a: float, fa: float, da: float,
               b: float, fb: float, db: float) -> float | None:
    """Minimizer of the cubic through (a, fa, da) and (b, fb, db)."""
    if a == b:
        return None
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0.0:
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = db - da + 2.0 * d2
    if denom == 0.0:
        return None
    t = b - (b - a) * (db + d2 - d1) / denom
    return t if math.isfinite(t) else None


def line_search(obj: Objective, x: Vector, p: Vector, f0: float, g0: Vector,
                params: WolfeParams, counter: EvalCounter,
                audit: list[SearchAudit] | None = None) -> LineSearchResult:
    """Find a step along ``p`` from ``x`` satisfying both Wolfe conditions.

    ``f0`` and ``g0`` must already hold f(x) and grad f(x); they are neither
    re-evaluated nor counted.  At most ``params.max_fg_evals`` evaluations are
    spent.  Raises :class:`NotDescentDirection` when ``g0'p >= 0``.
    """
    p = np.asarray(p, dtype=float)
    dphi0 = float(g0 @ p)
    if dphi0 >= 0.0:
        raise NotDescentDirection(
            f"directional derivative {dphi0:g} is not negative")

    c1, c2 = params.c1, params.c2
    budget = params.max_fg_evals
    evals = 0
    best: tuple[float, float, Vector, Vector, float] | None = None

    def trial(step: float) -> tuple[Vector, float, Vector, float]:
        nonlocal evals, best
        x_t = x + step * p
        f_t, g_t = evaluate(obj, x_t, counter)
        evals += 1
        d_t = float(g_t @ p)
        if best is None or f_t < best[0]:
            best = (f_t, step, x_t, g_t, d_t)
        return x_t, f_t, g_t, d_t

    def finish(step: float, x_t: Vector, f_t: float, g_t: Vector, d_t: float,
               status: LineSearchStatus) -> LineSearchResult:
        if audit is not None:
            audit.append(SearchAudit(f0, dphi0, step, f_t, d_t, c1, c2, status))
        return LineSearchResult(step, x_t, f_t, g_t, status)

    def best_found() -> LineSearchResult:
        assert best is not None
        f_t, step, x_t, g_t, d_t = best
        return finish(step, x_t, f_t, g_t, d_t,
                      LineSearchStatus.BUDGET_EXHAUSTED_BEST_FOUND)

    def zoom(lo: float, f_lo: float, d_lo: float,
             hi: float, f_hi: float, d_hi: float) -> LineSearchResult | None:
        # Invariants: lo satisfies sufficient decrease with the lowest such f
        # seen, and d_lo * (hi - lo) < 0 so the interval brackets a Wolfe step.
        insufficient = False
        while evals < budget:
            left, right = (lo, hi) if lo < hi else (hi, lo)
            width = right - left
            if width <= 4.0 * np.finfo(float).eps * max(1.0, abs(right)):
                break
            step = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            margin = 0.1 * width
            if step is None or not (left < step < right):
                step = left + 0.5 * width
                insufficient = False
            elif min(right - step, step - left) < margin:
                # Repeated interpolation onto the boundary stalls; force an
                # interior point the second time it happens in a row.
                if insufficient:
                    step = (right - margin
                            if abs(step - right) < abs(step - left)
                            else left + margin)
                    insufficient = False
                else:
                    insufficient = True
            else:
                insufficient = False
            step = min(max(step, STEP_MIN), STEP_MAX)
            x_t, f_t, g_t, d_t = trial(step)
            if f_t > f0 + c1 * step * dphi0 or f_t >= f_lo:
                hi, f_hi, d_hi = step, f_t, d_t
            else:
                if d_t >= c2 * dphi0:
                    return finish(step, x_t, f_t, g_t, d_t,
                                  LineSearchStatus.WOLFE_SATISFIED)
                if d_t * (hi - lo) >= 0.0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = step, f_t, d_t
        return None

    prev_step, prev_f, prev_d = 0.0, f0, dphi0
    step = min(max(params.initial_step, STEP_MIN), STEP_MAX)
    first = True
    while evals < budget:
        x_t, f_t, g_t, d_t = trial(step)
        if f_t > f0 + c1 * step * dphi0 or (not first and f_t >= prev_f):
            res = zoom(prev_step, prev_f, prev_d, step, f_t, d_t)
            return res if res is not None else best_found()
        if d_t >= c2 * dphi0:
            return finish(step, x_t, f_t, g_t, d_t,
                          LineSearchStatus.WOLFE_SATISFIED)
        if step >= STEP_MAX:
            break
        prev_step, prev_f, prev_d = step, f_t, d_t
        step = min(step * EXPANSION, STEP_MAX)
        first = False
    return best_found()
