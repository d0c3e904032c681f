"""Core domain types shared by every optimizer in the package.

The central contract is :class:`Objective`: a deterministic callable that
returns the objective value and its gradient together.  Value and gradient
always travel as a pair and cost one unit on the run's :class:`EvalCounter`;
nothing in this package ever evaluates f without g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, TypeAlias

import numpy as np
from numpy.typing import NDArray

Vector: TypeAlias = NDArray[np.float64]

FgFunc: TypeAlias = Callable[[Vector], tuple[float, Vector]]


class NumericalFailure(RuntimeError):
    """A non-finite value appeared where finite data is required."""

    def __init__(self, message: str, x: Vector | None = None,
                 value: float | None = None):
        super().__init__(message)
        self.x = x
        self.value = value


class NotDescentDirection(ValueError):
    """A line search was started along a direction with nonnegative slope."""


class InvalidProblem(ValueError):
    """Benchmark-problem parameters violate that problem's requirements."""


class AlreadyStationary(Exception):
    """The gradient is exactly zero; there is no direction left to follow."""


class StepKind(Enum):
    """What produced an iterate.

    PRECONDITION marks plain one-step line-search updates (including the
    initial point of a run), ACCELERATED marks iterates produced by the
    recombination step followed by a line search, and RESTART marks iterates
    kept from the preconditioner after the recombination window was discarded.
    """

    PRECONDITION = "precondition"
    ACCELERATED = "accelerated"
    RESTART = "restart"


class SolveStatus(Enum):
    GRAD_TOL = "grad_tol"
    FVAL_TOL = "fval_tol"
    MAX_ITERS = "max_iters"
    FAILED = "failed"


@dataclass(frozen=True)
class Objective:
    """A smooth unconstrained objective with analytic gradient.

    ``fg`` must be deterministic and side-effect free: calling it twice at
    the same point returns bit-identical results.  ``known_optimum``, when
    present, is ``(u_star, f_star)`` and is used by the benchmark tooling.
    """

    n: int
    fg: FgFunc
    known_optimum: tuple[Vector, float] | None = None
    name: str = ""


class EvalCounter:
    """Counts combined value/gradient evaluations, one unit per ``fg`` call."""

    __slots__ = ("fg_evals",)

    def __init__(self) -> None:
        self.fg_evals = 0


def evaluate(obj: Objective, x: Vector, counter: EvalCounter) -> tuple[float, Vector]:
    """Evaluate ``obj`` at ``x``, incrementing ``counter`` by exactly one.

    Raises :class:`NumericalFailure` if the point or any returned entry is
    non-finite; downstream least-squares and line-search steps all assume
    finite data.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.n,):
        raise ValueError(f"point has shape {x.shape}, expected ({obj.n},)")
    if not np.isfinite(x).all():
        raise NumericalFailure("non-finite point", x=x)
    f, g = obj.fg(x)
    counter.fg_evals += 1
    f = float(f)
    g = np.asarray(g, dtype=float)
    if g.shape != (obj.n,):
        raise ValueError(f"gradient has shape {g.shape}, expected ({obj.n},)")
    if not np.isfinite(f):
        raise NumericalFailure("objective value is non-finite", x=x, value=f)
    if not np.isfinite(g).all():
        bad = float(g[~np.isfinite(g)][0])
        raise NumericalFailure("gradient entry is non-finite", x=x, value=bad)
    return f, g


@dataclass(frozen=True)
class IterationRecord:
    """Telemetry for one outer iteration of any solver in this package."""

    iter_index: int
    fg_evals_cumulative: int
    f_value: float
    grad_norm_2: float
    grad_norm_inf: float
    step_kind: StepKind


@dataclass
class ConvergenceHistory:
    """Per-iteration records accumulated by a single solver run."""

    records: list[IterationRecord] = field(default_factory=list)

    def add(self, iter_index: int, counter: EvalCounter, f: float, g: Vector,
            step_kind: StepKind) -> IterationRecord:
        rec = IterationRecord(
            iter_index=iter_index,
            fg_evals_cumulative=counter.fg_evals,
            f_value=float(f),
            grad_norm_2=float(np.linalg.norm(g)),
            grad_norm_inf=float(np.abs(g).max()) if len(g) else 0.0,
            step_kind=step_kind,
        )
        self.records.append(rec)
        return rec

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)
