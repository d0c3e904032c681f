"""Benchmark harness: seeded trials, multi-seed summary tables, window-size
sweeps, and the SPD-quadratic equivalence check against linear GMRES.

A trial is fully determined by its :class:`TrialConfig`: the initial guess is
drawn uniformly from [0,1)^n using the trial seed, and a trial converges when
``|f - f_star|`` falls below the value tolerance.  Within a table every
method sees the identical initial guesses, so evaluation counts compare
algorithms on equal footing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .baselines import (
    DescentConfig,
    LbfgsConfig,
    NcgConfig,
    lbfgs_solve,
    ncg_solve,
    steepest_descent_solve,
)
from .core import (
    ConvergenceHistory,
    EvalCounter,
    Objective,
    SolveStatus,
    Vector,
)
from .linesearch import SearchAudit, WolfeParams
from .problems import (
    ProblemKind,
    QuadraticSpec,
    linear_gmres_oracle,
    make_problem,
    quadratic_objective,
)
from .solver import (
    NGmresConfig,
    SdlsPreconditioner,
    SdParams,
    SdPreconditioner,
    StepKind,
    StepTrace,
    ngmres_solve,
)

# Identifier of the pseudo-random generator behind all seeded draws; recorded
# in output manifests so reruns can state their provenance.
PRNG_ID = "numpy.random.default_rng (PCG64)"

# Gradient floor: trials stop early at (numerically) stationary points even
# when the value tolerance was not reached; such trials count as DNF.
GRAD_FLOOR = 1e-13

# Seed for the random orthogonal factor of problem C when the caller does not
# fix one: the factor is part of the problem, held fixed across trial seeds.
DEFAULT_PROBLEM_SEED = 987654321


class Method(Enum):
    NGMRES_SDLS = "ngmres-sdls"
    NGMRES_SD = "ngmres-sd"
    NCG = "ncg"
    LBFGS = "lbfgs"
    SDLS = "sdls"


_ITER_CAP_LARGE = ("A", "B", "C")


def default_iter_cap(tag: str) -> int:
    return 1500 if tag in _ITER_CAP_LARGE else 500


@dataclass(frozen=True)
class TrialConfig:
    problem: ProblemKind
    method: Method
    window_w: int = 20
    delta: float = 1e-4
    seed: int = 0
    fval_tol: float = 1e-6
    iter_cap: int | None = None  # None: 1500 for A-C, 500 for D-G
    wolfe: WolfeParams = field(default_factory=WolfeParams)

    def resolved_iter_cap(self) -> int:
        return self.iter_cap if self.iter_cap is not None \
            else default_iter_cap(self.problem.tag)


@dataclass
class TrialResult:
    config: TrialConfig
    x0: Vector
    x_final: Vector
    history: ConvergenceHistory
    status: SolveStatus
    f_star: float
    converged: bool
    fg_evals_to_tol: int | None


@dataclass
class RunSummary:
    """Aggregate over a seed set for one (problem, method) cell.

    ``mean_fg_evals_to_tol`` averages converged trials only; trials that
    never reach the tolerance (or fail) are tallied in ``dnf_count``.
    """

    problem: ProblemKind
    method: Method
    trials: int
    mean_fg_evals_to_tol: float
    dnf_count: int
    per_trial: list[TrialResult]


def initial_guess(n: int, seed: int) -> Vector:
    """Uniform [0,1)^n start, deterministic in the seed."""
    return np.random.default_rng(seed).random(n)


def resolve_problem_seed(kind: ProblemKind) -> ProblemKind:
    if kind.tag == "C" and kind.seed is None:
        return ProblemKind(kind.tag, kind.n, DEFAULT_PROBLEM_SEED)
    return kind


@lru_cache(maxsize=None)
def _cached_problem(kind: ProblemKind) -> Objective:
    return make_problem(kind)


@lru_cache(maxsize=None)
def penalty_reference(n: int, seed: int = 0) -> float:
    """Reference optimal value for problem G, which has no analytic optimum.

    Runs both L-BFGS and nonlinear CG from the same seeded start down to a
    tiny gradient norm and accepts the value only when the two independent
    routes agree to 1e-10.
    """
    obj = _cached_problem(ProblemKind("G", n))
    x0 = initial_guess(n, seed)
    wolfe = WolfeParams()
    values = []
    runs = (
        (lbfgs_solve, LbfgsConfig(wolfe=wolfe, max_iters=50000,
                                  grad_tol=GRAD_FLOOR)),
        (ncg_solve, NcgConfig(wolfe=wolfe, max_iters=50000,
                              grad_tol=GRAD_FLOOR)),
    )
    for solve, cfg in runs:
        x, history, status = solve(obj, cfg, x0, EvalCounter())
        if status is not SolveStatus.GRAD_TOL:
            raise RuntimeError(
                f"penalty reference run ended with {status} instead of "
                f"reaching the gradient floor")
        values.append(history.final.f_value)
    if abs(values[0] - values[1]) >= 1e-10:
        raise RuntimeError(
            f"penalty reference values disagree: {values[0]!r} vs {values[1]!r}")
    return min(values)


def reference_value(kind: ProblemKind) -> float:
    """f at the optimum: analytic where known, computed reference for G."""
    if kind.tag == "G":
        return penalty_reference(kind.n)
    obj = _cached_problem(resolve_problem_seed(kind))
    assert obj.known_optimum is not None
    return obj.known_optimum[1]


def _dispatch(cfg: TrialConfig, obj: Objective, x0: Vector,
              counter: EvalCounter, f_star: float,
              audit: list[SearchAudit] | None,
              ) -> tuple[Vector, ConvergenceHistory, SolveStatus]:
    cap = cfg.resolved_iter_cap()
    fval_tol = (f_star, cfg.fval_tol)
    if cfg.method in (Method.NGMRES_SDLS, Method.NGMRES_SD):
        config = NGmresConfig(window_w=cfg.window_w, max_iters=cap,
                              grad_tol=GRAD_FLOOR, fval_tol=fval_tol,
                              wolfe=cfg.wolfe)
        if cfg.method is Method.NGMRES_SDLS:
            precond = SdlsPreconditioner(cfg.wolfe, audit=audit)
        else:
            precond = SdPreconditioner(SdParams(cfg.delta))
        return ngmres_solve(obj, precond, config, x0, counter, audit=audit)
    if cfg.method is Method.SDLS:
        config = DescentConfig(wolfe=cfg.wolfe, max_iters=cap,
                               grad_tol=GRAD_FLOOR, fval_tol=fval_tol)
        return steepest_descent_solve(obj, config, x0, counter, audit=audit)
    if cfg.method is Method.NCG:
        config = NcgConfig(wolfe=cfg.wolfe, max_iters=cap,
                           grad_tol=GRAD_FLOOR, fval_tol=fval_tol)
        return ncg_solve(obj, config, x0, counter, audit=audit)
    config = LbfgsConfig(wolfe=cfg.wolfe, max_iters=cap, grad_tol=GRAD_FLOOR,
                         fval_tol=fval_tol, memory_m=5)
    return lbfgs_solve(obj, config, x0, counter, audit=audit)


def run_trial(cfg: TrialConfig, x0: Vector | None = None,
              audit: list[SearchAudit] | None = None) -> TrialResult:
    """Run one seeded trial; deterministic given the config.

    ``x0`` overrides the seeded initial guess (used by tests and the
    equivalence tooling); by default it is drawn from ``cfg.seed``.
    """
    kind = resolve_problem_seed(cfg.problem)
    obj = _cached_problem(kind)
    f_star = reference_value(kind)
    if x0 is None:
        x0 = initial_guess(kind.n, cfg.seed)
    counter = EvalCounter()
    x_final, history, status = _dispatch(cfg, obj, x0, counter, f_star, audit)

    fg_to_tol: int | None = None
    for rec in history:
        if abs(rec.f_value - f_star) < cfg.fval_tol:
            fg_to_tol = rec.fg_evals_cumulative
            break
    return TrialResult(config=cfg, x0=x0, x_final=x_final, history=history,
                       status=status, f_star=f_star,
                       converged=fg_to_tol is not None,
                       fg_evals_to_tol=fg_to_tol)


def _summarize(kind: ProblemKind, method: Method,
               results: list[TrialResult]) -> RunSummary:
    converged = [r.fg_evals_to_tol for r in results if r.converged]
    mean = float(np.mean(converged)) if converged else math.inf
    return RunSummary(problem=kind, method=method, trials=len(results),
                      mean_fg_evals_to_tol=mean,
                      dnf_count=len(results) - len(converged),
                      per_trial=results)


def run_table(problems: list[ProblemKind], methods: list[Method],
              trials: int = 10, seed0: int = 0,
              window_w: int = 20, delta: float = 1e-4,
              fval_tol: float = 1e-6, iter_cap: int | None = None,
              wolfe: WolfeParams | None = None,
              ) -> dict[tuple[ProblemKind, Method], RunSummary]:
    """Summaries for each (problem, method) cell over a shared seed set.

    Trial k of every method uses seed ``seed0 + k`` and therefore the
    identical initial guess; this is asserted, not assumed.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    wolfe = wolfe or WolfeParams()
    out: dict[tuple[ProblemKind, Method], RunSummary] = {}
    for kind in problems:
        kind = resolve_problem_seed(kind)
        starts = [initial_guess(kind.n, seed0 + k) for k in range(trials)]
        for method in methods:
            results = []
            for k in range(trials):
                cfg = TrialConfig(problem=kind, method=method,
                                  window_w=window_w, delta=delta,
                                  seed=seed0 + k, fval_tol=fval_tol,
                                  iter_cap=iter_cap, wolfe=wolfe)
                res = run_trial(cfg)
                assert np.array_equal(res.x0, starts[k])
                results.append(res)
            out[(kind, method)] = _summarize(kind, method, results)
    return out


def run_window_sweep(problem: ProblemKind, method: Method,
                     w_values: list[int], trials: int = 10, seed0: int = 0,
                     delta: float = 1e-4, fval_tol: float = 1e-6,
                     iter_cap: int | None = None,
                     ) -> dict[int, RunSummary]:
    """One summary per window size; methods other than the accelerated
    variants have no window to sweep."""
    if method not in (Method.NGMRES_SDLS, Method.NGMRES_SD):
        raise ValueError("window sweep applies to the accelerated variants")
    out: dict[int, RunSummary] = {}
    for w in w_values:
        table = run_table([problem], [method], trials=trials, seed0=seed0,
                          window_w=w, delta=delta, fval_tol=fval_tol,
                          iter_cap=iter_cap)
        out[w] = table[(resolve_problem_seed(problem), method)]
    return out


def gmres_equivalence(n: int, seed: int = 0, delta: float = 1e-4,
                      window_w: int | None = None,
                      ) -> tuple[list[float], list[float]]:
    """Residual histories of the accelerated solver vs. linear GMRES.

    On the SPD quadratic ``0.5 u' D u - b' u`` with ``D = diag(1..n)`` the
    recombination step reproduces linear GMRES exactly: the accelerated
    iterate of outer iteration i minimizes ``||b - A u||_2`` over the order-i
    Krylov space.  Returns per-iteration ``||b - A u_hat||_2`` (truncated at
    the first restart, if any) alongside the independent oracle values.
    """
    d = np.arange(1.0, n + 1.0)
    spec = QuadraticSpec(np.diag(d), d.copy())
    obj = quadratic_objective(spec)
    x0 = initial_guess(n, seed)
    w = window_w if window_w is not None else n

    traces: list[StepTrace] = []
    config = NGmresConfig(window_w=w, max_iters=4 * n + 40, grad_tol=1e-14,
                          wolfe=WolfeParams())
    ngmres_solve(obj, SdPreconditioner(SdParams(delta)), config, x0,
                 EvalCounter(), observer=traces.append)

    a = np.asarray(spec.matrix)
    b = np.asarray(spec.rhs)
    ours: list[float] = []
    for tr in traces:
        if tr.step_kind is StepKind.RESTART:
            break
        ours.append(float(np.linalg.norm(b - a @ tr.u_hat)))
    return ours, linear_gmres_oracle(spec, x0, n)


# ---------------------------------------------------------------------------
# serialization


def history_csv(history: ConvergenceHistory, f_star: float | None) -> str:
    """CSV rendering, one row per outer iteration."""
    lines = ["iter,fg_evals,f,log10_abs_f_err,gnorm2,gnorminf,step_kind"]
    for rec in history:
        if f_star is None:
            err = ""
        else:
            gap = abs(rec.f_value - f_star)
            err = repr(math.log10(gap)) if gap > 0.0 else "-inf"
        lines.append(",".join([
            str(rec.iter_index), str(rec.fg_evals_cumulative),
            repr(rec.f_value), err, repr(rec.grad_norm_2),
            repr(rec.grad_norm_inf), rec.step_kind.value,
        ]))
    return "\n".join(lines) + "\n"


def _cell_text(summary: RunSummary) -> str:
    if math.isinf(summary.mean_fg_evals_to_tol):
        mean = "-"
    else:
        mean = f"{summary.mean_fg_evals_to_tol:.0f}"
    if summary.dnf_count:
        mean += f"({summary.dnf_count})"
    return mean


def summaries_text(summaries: dict[tuple[ProblemKind, Method], RunSummary],
                   ) -> str:
    """Aligned text table, problems as rows and methods as columns.
    DNF counts appear in brackets after the mean."""
    problems = list(dict.fromkeys(kind for kind, _ in summaries))
    methods = list(dict.fromkeys(method for _, method in summaries))
    header = ["problem"] + [m.value for m in methods]
    rows = [header]
    for kind in problems:
        row = [f"{kind.tag} n={kind.n}"]
        for m in methods:
            row.append(_cell_text(summaries[(kind, m)]))
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows) + "\n"


def _manifest(summaries: dict[tuple[ProblemKind, Method], RunSummary]) -> dict:
    seeds = sorted({r.config.seed
                    for s in summaries.values() for r in s.per_trial})
    any_summary = next(iter(summaries.values()))
    cfg = any_summary.per_trial[0].config
    manifest = {
        "prng": PRNG_ID,
        "seeds": seeds,
        "window_w": cfg.window_w,
        "delta": cfg.delta,
        "fval_tol": cfg.fval_tol,
        "grad_floor": GRAD_FLOOR,
        "wolfe": {"c1": cfg.wolfe.c1, "c2": cfg.wolfe.c2,
                  "initial_step": cfg.wolfe.initial_step,
                  "max_fg_evals": cfg.wolfe.max_fg_evals},
        "references": {
            f"{kind.tag}:{kind.n}": summaries[(kind, m)].per_trial[0].f_star
            for kind, m in summaries},
    }
    return manifest


def summaries_json(summaries: dict[tuple[ProblemKind, Method], RunSummary],
                   ) -> str:
    """JSON rendering carrying the full reproducibility manifest."""
    cells = []
    for (kind, method), s in summaries.items():
        cells.append({
            "problem": {"tag": kind.tag, "n": kind.n, "seed": kind.seed},
            "method": method.value,
            "trials": s.trials,
            "mean_fg_evals_to_tol": (None
                                     if math.isinf(s.mean_fg_evals_to_tol)
                                     else s.mean_fg_evals_to_tol),
            "dnf_count": s.dnf_count,
            "per_trial": [{
                "seed": r.config.seed,
                "converged": r.converged,
                "fg_evals_to_tol": r.fg_evals_to_tol,
                "status": r.status.value,
                "final_f": r.history.final.f_value,
                "final_gnorm2": r.history.final.grad_norm_2,
                "iterations": len(r.history) - 1,
            } for r in s.per_trial],
        })
    return json.dumps({"manifest": _manifest(summaries), "cells": cells},
                      indent=2, sort_keys=True) + "\n"
