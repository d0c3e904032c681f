"""Reference optimizers: steepest descent with line search, Polak-Ribiere
nonlinear CG, and two-loop L-BFGS.

All three share the same Wolfe line search as the accelerated solver so that
evaluation counts compare the algorithms, not the searches.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConvergenceHistory,
    EvalCounter,
    NumericalFailure,
    Objective,
    SolveStatus,
    StepKind,
    Vector,
    evaluate,
)
from .linesearch import SearchAudit, WolfeParams, line_search

# Pairs with s'y at or below this relative threshold are skipped: they carry
# no usable curvature and would destroy positive definiteness.
_CURVATURE_SKIP = 1e-10


@dataclass(frozen=True)
class DescentConfig:
    """Shared stopping rules and line-search parameters for the baselines."""

    wolfe: WolfeParams = field(default_factory=WolfeParams)
    max_iters: int = 1000
    grad_tol: float = 0.0
    fval_tol: tuple[float, float] | None = None


@dataclass(frozen=True)
class NcgConfig(DescentConfig):
    pass


@dataclass(frozen=True)
class LbfgsConfig(DescentConfig):
    memory_m: int = 5

    def __post_init__(self) -> None:
        if self.memory_m < 1:
            raise ValueError("memory_m must be at least 1")


def _stop_status(f: float, g: Vector, it: int,
                 config: DescentConfig) -> SolveStatus | None:
    if float(np.linalg.norm(g)) <= config.grad_tol:
        return SolveStatus.GRAD_TOL
    if config.fval_tol is not None:
        f_star, tol = config.fval_tol
        if abs(f - f_star) < tol:
            return SolveStatus.FVAL_TOL
    if it >= config.max_iters:
        return SolveStatus.MAX_ITERS
    return None


def steepest_descent_solve(obj: Objective, config: DescentConfig, x0: Vector,
                           counter: EvalCounter,
                           audit: list[SearchAudit] | None = None,
                           ) -> tuple[Vector, ConvergenceHistory, SolveStatus]:
    """Stand-alone steepest descent: Wolfe search along ``-g/||g||``."""
    history = ConvergenceHistory()
    x = np.array(x0, dtype=float)
    try:
        f, g = evaluate(obj, x, counter)
    except NumericalFailure:
        return x, history, SolveStatus.FAILED
    history.add(0, counter, f, g, StepKind.PRECONDITION)

    it = 0
    while True:
        status = _stop_status(f, g, it, config)
        if status is not None:
            return x, history, status
        it += 1
        p = -g / float(np.linalg.norm(g))
        try:
            res = line_search(obj, x, p, f, g, config.wolfe, counter, audit)
        except NumericalFailure:
            return x, history, SolveStatus.FAILED
        x, f, g = res.x_new, res.f_new, res.g_new
        history.add(it, counter, f, g, StepKind.PRECONDITION)


def ncg_solve(obj: Objective, config: NcgConfig, x0: Vector,
              counter: EvalCounter,
              audit: list[SearchAudit] | None = None,
              ) -> tuple[Vector, ConvergenceHistory, SolveStatus]:
    """Nonlinear conjugate gradient with the Polak-Ribiere update.

    The direction is reset to ``-g`` whenever the updated direction fails the
    strict descent test, the minimal safeguard keeping every line search
    well defined.
    """
    history = ConvergenceHistory()
    x = np.array(x0, dtype=float)
    try:
        f, g = evaluate(obj, x, counter)
    except NumericalFailure:
        return x, history, SolveStatus.FAILED
    history.add(0, counter, f, g, StepKind.PRECONDITION)

    p = -g
    it = 0
    while True:
        status = _stop_status(f, g, it, config)
        if status is not None:
            return x, history, status
        it += 1
        if float(p @ g) >= 0.0:
            p = -g
        assert float(p @ g) < 0.0
        try:
            res = line_search(obj, x, p, f, g, config.wolfe, counter, audit)
        except NumericalFailure:
            return x, history, SolveStatus.FAILED
        g_new = res.g_new
        beta = float(g_new @ (g_new - g)) / float(g @ g)
        p = -g_new + beta * p
        x, f, g = res.x_new, res.f_new, g_new
        history.add(it, counter, f, g, StepKind.PRECONDITION)


def lbfgs_direction(g: Vector,
                    memory: deque[tuple[Vector, Vector, float]]) -> Vector:
    """Two-loop recursion: returns the quasi-Newton direction ``-H g``.

    ``memory`` holds ``(s, y, rho)`` triples, oldest first.  The seed matrix
    is ``gamma * I`` with ``gamma = s'y / y'y`` from the most recent pair;
    with no pairs stored the direction reduces to ``-g``.
    """
    q = g.copy()
    alphas: list[float] = []
    for s, y, rho in reversed(memory):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if memory:
        s, y, _ = memory[-1]
        gamma = float(s @ y) / float(y @ y)
    else:
        gamma = 1.0
    r = gamma * q
    for (s, y, rho), a in zip(memory, reversed(alphas)):
        b = rho * float(y @ r)
        r += (a - b) * s
    return -r


def lbfgs_solve(obj: Objective, config: LbfgsConfig, x0: Vector,
                counter: EvalCounter,
                audit: list[SearchAudit] | None = None,
                ) -> tuple[Vector, ConvergenceHistory, SolveStatus]:
    """Limited-memory BFGS with the two-loop recursion.

    Pairs failing the curvature threshold are skipped rather than stored;
    Wolfe-satisfied steps guarantee ``s'y > 0`` for every pair that is kept.
    """
    history = ConvergenceHistory()
    x = np.array(x0, dtype=float)
    try:
        f, g = evaluate(obj, x, counter)
    except NumericalFailure:
        return x, history, SolveStatus.FAILED
    history.add(0, counter, f, g, StepKind.PRECONDITION)

    memory: deque[tuple[Vector, Vector, float]] = deque(maxlen=config.memory_m)
    it = 0
    while True:
        status = _stop_status(f, g, it, config)
        if status is not None:
            return x, history, status
        it += 1
        p = lbfgs_direction(g, memory)
        if float(p @ g) >= 0.0:
            p = -g
        try:
            res = line_search(obj, x, p, f, g, config.wolfe, counter, audit)
        except NumericalFailure:
            return x, history, SolveStatus.FAILED
        s = res.x_new - x
        y = res.g_new - g
        sy = float(s @ y)
        if sy > _CURVATURE_SKIP * float(np.linalg.norm(s) * np.linalg.norm(y)):
            assert sy > 0.0
            memory.append((s, y, 1.0 / sy))
        x, f, g = res.x_new, res.f_new, res.g_new
        history.add(it, counter, f, g, StepKind.PRECONDITION)
