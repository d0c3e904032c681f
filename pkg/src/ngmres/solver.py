"""Three-step accelerated descent driver with pluggable preconditioners.

Each outer iteration performs:

I.   a one-step update process ("preconditioner") producing a preliminary
     iterate ``u_bar`` with its value and gradient;
II.  a recombination of the window of previous iterates around ``u_bar``,
     choosing coefficients that minimize the linearized gradient norm, which
     yields the accelerated iterate ``u_hat``;
III. a Wolfe line search from ``u_bar`` towards ``u_hat`` when that direction
     is a strict descent direction; otherwise a restart that keeps ``u_bar``
     and shrinks the window back to a single entry.

Two steepest-descent preconditioners are provided: one with its own Wolfe
line search (convergent stand-alone) and one with a predefined small step
(cheap, one evaluation, no descent promise).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

import numpy as np

from .core import (
    AlreadyStationary,
    ConvergenceHistory,
    EvalCounter,
    NumericalFailure,
    Objective,
    SolveStatus,
    StepKind,
    Vector,
    evaluate,
)
from .leastsq import RecombinationSystem, solve_recombination
from .linesearch import LineSearchResult, SearchAudit, WolfeParams, line_search


class Preconditioner(Protocol):
    """One-step update process: maps the current iterate (with its value and
    gradient already in hand) to a preliminary iterate with *its* value and
    gradient, so the driver never re-evaluates."""

    def __call__(self, x: Vector, f_x: float, g_x: Vector, obj: Objective,
                 counter: EvalCounter) -> tuple[Vector, float, Vector]: ...


@dataclass(frozen=True)
class SdParams:
    """Predefined-step steepest descent: step length ``min(delta, ||g||)``."""

    delta: float = 1e-4

    def __post_init__(self) -> None:
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")


@dataclass(frozen=True)
class NGmresConfig:
    window_w: int = 20
    max_iters: int = 1000
    grad_tol: float = 0.0
    # (f_star, tol): stop when |f - f_star| < tol.  Benchmark criterion only;
    # the library criterion is the gradient norm.
    fval_tol: tuple[float, float] | None = None
    wolfe: WolfeParams = field(default_factory=WolfeParams)

    def __post_init__(self) -> None:
        if self.window_w < 1:
            raise ValueError("window_w must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.grad_tol < 0.0:
            raise ValueError("grad_tol must be nonnegative")


class Window:
    """Bounded history of (iterate, gradient) pairs used by recombination."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("window capacity must be at least 1")
        self.entries: deque[tuple[Vector, Vector]] = deque(maxlen=capacity)

    @property
    def capacity(self) -> int:
        return self.entries.maxlen  # type: ignore[return-value]

    def append(self, u: Vector, g: Vector) -> None:
        self.entries.append((u, g))

    def restart(self, u: Vector, g: Vector) -> None:
        self.entries.clear()
        self.entries.append((u, g))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def precondition_sd(x: Vector, f_x: float, g_x: Vector, obj: Objective,
                    params: SdParams, counter: EvalCounter,
                    ) -> tuple[Vector, float, Vector]:
    """Steepest-descent step of predefined length ``min(delta, ||g||)``.

    Costs exactly one evaluation and makes no descent promise; its job is to
    supply a fresh direction for the recombination window.  The step shrinks
    with the gradient norm once ``||g|| <= delta`` so the update vanishes as a
    stationary point is approached.
    """
    gnorm = float(np.linalg.norm(g_x))
    if gnorm == 0.0:
        raise AlreadyStationary
    step = min(params.delta, gnorm)
    x_bar = x - (step / gnorm) * g_x
    f_bar, g_bar = evaluate(obj, x_bar, counter)
    return x_bar, f_bar, g_bar


def precondition_sdls(x: Vector, f_x: float, g_x: Vector, obj: Objective,
                      wolfe: WolfeParams, counter: EvalCounter,
                      audit: list[SearchAudit] | None = None,
                      ) -> tuple[Vector, float, Vector]:
    """Steepest-descent step with a Wolfe line search along ``-g/||g||``."""
    gnorm = float(np.linalg.norm(g_x))
    if gnorm == 0.0:
        raise AlreadyStationary
    res = line_search(obj, x, -g_x / gnorm, f_x, g_x, wolfe, counter, audit)
    return res.x_new, res.f_new, res.g_new


@dataclass(frozen=True)
class SdPreconditioner:
    params: SdParams = field(default_factory=SdParams)

    def __call__(self, x, f_x, g_x, obj, counter):
        return precondition_sd(x, f_x, g_x, obj, self.params, counter)


@dataclass(frozen=True)
class SdlsPreconditioner:
    wolfe: WolfeParams = field(default_factory=WolfeParams)
    audit: list[SearchAudit] | None = None

    def __call__(self, x, f_x, g_x, obj, counter):
        return precondition_sdls(x, f_x, g_x, obj, self.wolfe, counter,
                                 audit=self.audit)


def gmres_accelerate(window: Window, x_bar: Vector, g_bar: Vector,
                     ) -> tuple[Vector, Vector]:
    """Accelerated iterate from recombining the window around ``x_bar``.

    Returns ``(u_hat, alphas)`` with
    ``u_hat = x_bar + sum_j alphas[j] * (x_bar - u_j)`` where the coefficients
    minimize ``||g_bar + sum_j alphas[j] * (g_bar - g_j)||_2`` over the stored
    window gradients.  No new evaluations are made.
    """
    if len(window) == 0:
        raise ValueError("recombination window is empty")
    us = np.column_stack([u for u, _ in window])
    gs = np.column_stack([g for _, g in window])
    columns = [g_bar - gs[:, j] for j in range(gs.shape[1])]
    alphas, _ = solve_recombination(RecombinationSystem(g_bar, columns))
    u_hat = x_bar + (x_bar[:, None] - us) @ alphas
    return u_hat, alphas


@dataclass
class NGmresState:
    """Current iterate with its value/gradient and the recombination window."""

    u: Vector
    f: float
    g: Vector
    window: Window


@dataclass(frozen=True)
class StepTrace:
    """Optional per-iteration introspection emitted via the solve observer."""

    iter_index: int
    u_bar: Vector
    f_bar: float
    g_bar: Vector
    u_hat: Vector
    alphas: Vector
    recomb_residual: float
    step_kind: StepKind
    search: LineSearchResult | None


def ngmres_step(state: NGmresState, obj: Objective, precond: Preconditioner,
                config: NGmresConfig, counter: EvalCounter,
                audit: list[SearchAudit] | None = None,
                trace_out: list[StepTrace] | None = None,
                iter_index: int = 0,
                ) -> tuple[Vector, float, Vector, StepKind]:
    """Advance the iteration by one outer step, mutating ``state``.

    The descent test is strict (``g_bar'(u_hat - u_bar) < 0``); a zero
    directional derivative admits no Wolfe step, so ties restart.  On restart
    the window is cleared to hold only the new iterate; otherwise the new
    iterate is appended, evicting the oldest entry beyond capacity.
    """
    u_bar, f_bar, g_bar = precond(state.u, state.f, state.g, obj, counter)
    u_hat, alphas = gmres_accelerate(state.window, u_bar, g_bar)

    recomb_residual = float("nan")
    if trace_out is not None:
        gs = np.column_stack([g for _, g in state.window])
        recomb_residual = float(np.linalg.norm(
            g_bar + (g_bar[:, None] - gs) @ alphas))

    p = u_hat - u_bar
    slope = float(g_bar @ p)
    search: LineSearchResult | None = None
    if slope < 0.0:
        # Initial trial step 1 so an accepted unit step recovers u_hat exactly.
        wolfe = replace(config.wolfe, initial_step=1.0)
        search = line_search(obj, u_bar, p, f_bar, g_bar, wolfe, counter, audit)
        u_next, f_next, g_next = search.x_new, search.f_new, search.g_new
        kind = StepKind.ACCELERATED
        state.window.append(u_next, g_next)
    else:
        u_next, f_next, g_next = u_bar, f_bar, g_bar
        kind = StepKind.RESTART
        state.window.restart(u_next, g_next)

    if trace_out is not None:
        trace_out.append(StepTrace(iter_index, u_bar, f_bar, g_bar, u_hat,
                                   alphas, recomb_residual, kind, search))
    state.u, state.f, state.g = u_next, f_next, g_next
    return u_next, f_next, g_next, kind


def ngmres_solve(obj: Objective, precond: Preconditioner, config: NGmresConfig,
                 x0: Vector, counter: EvalCounter,
                 audit: list[SearchAudit] | None = None,
                 observer: Callable[[StepTrace], None] | None = None,
                 ) -> tuple[Vector, ConvergenceHistory, SolveStatus]:
    """Run the accelerated iteration from ``x0`` until a stopping criterion.

    Stops when ``||g||_2 <= grad_tol``, when the optional benchmark criterion
    ``|f - f_star| < tol`` is met, or after ``max_iters`` outer iterations.
    The window grows naturally from the single initial guess up to capacity.
    A numerical failure aborts with the partial history and status FAILED.
    """
    history = ConvergenceHistory()
    x0 = np.array(x0, dtype=float)
    try:
        f, g = evaluate(obj, x0, counter)
    except NumericalFailure:
        return x0, history, SolveStatus.FAILED
    history.add(0, counter, f, g, StepKind.PRECONDITION)

    window = Window(config.window_w)
    window.append(x0, g)
    state = NGmresState(x0, f, g, window)

    it = 0
    while True:
        if float(np.linalg.norm(state.g)) <= config.grad_tol:
            return state.u, history, SolveStatus.GRAD_TOL
        if config.fval_tol is not None:
            f_star, tol = config.fval_tol
            if abs(state.f - f_star) < tol:
                return state.u, history, SolveStatus.FVAL_TOL
        if it >= config.max_iters:
            return state.u, history, SolveStatus.MAX_ITERS
        it += 1
        traces: list[StepTrace] | None = [] if observer is not None else None
        try:
            _, f, g, kind = ngmres_step(state, obj, precond, config, counter,
                                        audit=audit, trace_out=traces,
                                        iter_index=it)
        except AlreadyStationary:
            return state.u, history, SolveStatus.GRAD_TOL
        except NumericalFailure:
            return state.u, history, SolveStatus.FAILED
        history.add(it, counter, f, g, kind)
        if observer is not None and traces:
            observer(traces[0])
