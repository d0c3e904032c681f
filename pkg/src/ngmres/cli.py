"""Command-line interface for single runs, summary tables, window sweeps,
gradient checks, and the linear-GMRES equivalence check."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .core import SolveStatus
from .harness import (
    Method,
    default_iter_cap,
    gmres_equivalence,
    history_csv,
    initial_guess,
    resolve_problem_seed,
    run_table,
    run_trial,
    run_window_sweep,
    summaries_json,
    summaries_text,
    TrialConfig,
)
from .problems import ProblemKind, finite_difference_gradient, make_problem

_METHOD_NAMES = [m.value for m in Method]


def _add_common(p: argparse.ArgumentParser, *, method: bool = True) -> None:
    p.add_argument("--problem", choices=list("ABCDEFG"), required=True)
    p.add_argument("--n", type=int, required=True)
    if method:
        p.add_argument("--method", choices=_METHOD_NAMES, required=True)
    p.add_argument("--window", type=int, default=20)
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fval-tol", type=float, default=1e-6)
    p.add_argument("--iter-cap", type=int, default=None)
    p.add_argument("--problem-seed", type=int, default=None,
                   help="seed of the random orthogonal factor (problem C)")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when any trial fails")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _kind(args) -> ProblemKind:
    return resolve_problem_seed(
        ProblemKind(args.problem, args.n, args.problem_seed))


def _cmd_run(args) -> int:
    cfg = TrialConfig(problem=_kind(args), method=Method(args.method),
                      window_w=args.window, delta=args.delta, seed=args.seed,
                      fval_tol=args.fval_tol, iter_cap=args.iter_cap)
    res = run_trial(cfg)
    if args.format == "csv":
        _emit(history_csv(res.history, res.f_star), args.out)
    else:
        summaries = {(cfg.problem, cfg.method): _single_summary(res)}
        text = (summaries_json(summaries) if args.format == "json"
                else summaries_text(summaries))
        _emit(text, args.out)
    failed = res.status is SolveStatus.FAILED
    return 1 if (args.strict and failed) else 0


def _single_summary(res):
    from .harness import _summarize
    return _summarize(res.config.problem, res.config.method, [res])


def _methods(args) -> list[Method]:
    if args.method:
        return [Method(m) for m in args.method]
    return list(Method)


def _cmd_table(args) -> int:
    summaries = run_table([_kind(args)], _methods(args), trials=args.trials,
                          seed0=args.seed, window_w=args.window,
                          delta=args.delta, fval_tol=args.fval_tol,
                          iter_cap=args.iter_cap)
    text = (summaries_json(summaries) if args.format == "json"
            else summaries_text(summaries))
    _emit(text, args.out)
    failed = any(r.status is SolveStatus.FAILED
                 for s in summaries.values() for r in s.per_trial)
    return 1 if (args.strict and failed) else 0


def _cmd_sweep(args) -> int:
    sweep = run_window_sweep(_kind(args), Method(args.method),
                             w_values=args.window, trials=args.trials,
                             seed0=args.seed, delta=args.delta,
                             fval_tol=args.fval_tol, iter_cap=args.iter_cap)
    lines = ["w,mean_fg_evals_to_tol,dnf_count,trials"]
    for w, s in sweep.items():
        mean = "" if s.mean_fg_evals_to_tol == float("inf") \
            else repr(s.mean_fg_evals_to_tol)
        lines.append(f"{w},{mean},{s.dnf_count},{s.trials}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_gradcheck(args) -> int:
    kind = _kind(args)
    obj = make_problem(kind)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.points):
        x = rng.random(kind.n)
        _, g = obj.fg(x)
        fd = finite_difference_gradient(obj, x, h=1e-6)
        scale = max(float(np.linalg.norm(g)), 1.0)
        worst = max(worst, float(np.linalg.norm(g - fd)) / scale)
    ok = worst <= args.tol
    print(f"problem {kind.tag} n={kind.n}: max relative gradient deviation "
          f"{worst:.3e} ({'OK' if ok else 'FAIL'} at {args.tol:g})")
    return 0 if ok else 1


def _cmd_gmres_equiv(args) -> int:
    ours, oracle = gmres_equivalence(args.n, seed=args.seed, delta=args.delta)
    print("iter  accelerated_residual  gmres_oracle_residual  rel_diff")
    worst = 0.0
    for i, (a, o) in enumerate(zip(ours, oracle), start=1):
        if o < args.cutoff:
            break
        rel = abs(a - o) / o
        worst = max(worst, rel)
        print(f"{i:4d}  {a:20.12e}  {o:21.12e}  {rel:.3e}")
    ok = worst <= args.tol
    print(f"max relative difference {worst:.3e} "
          f"({'OK' if ok else 'FAIL'} at {args.tol:g})")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ngmres",
        description="Accelerated descent benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single seeded trial")
    _add_common(p_run)
    p_run.add_argument("--format", choices=["csv", "json", "table"],
                       default="csv")
    p_run.set_defaults(func=_cmd_run)

    p_table = sub.add_parser("table", help="multi-seed summary table")
    _add_common(p_table, method=False)
    p_table.add_argument("--method", choices=_METHOD_NAMES, action="append",
                         default=None, help="repeatable; default all methods")
    p_table.add_argument("--trials", type=int, default=10)
    p_table.add_argument("--format", choices=["json", "table"],
                         default="table")
    p_table.set_defaults(func=_cmd_table)

    p_sweep = sub.add_parser("sweep-window", help="window-size sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--trials", type=int, default=10)
    # --window is repurposed as the list of sizes to sweep
    for action in p_sweep._actions:
        if action.dest == "window":
            action.nargs = "+"
            action.default = [1, 2, 3, 5, 10, 20, 30]
    p_sweep.set_defaults(func=_cmd_sweep)

    p_grad = sub.add_parser("gradcheck",
                            help="analytic vs finite-difference gradient")
    _add_common(p_grad, method=False)
    p_grad.add_argument("--points", type=int, default=20)
    p_grad.add_argument("--tol", type=float, default=1e-5)
    p_grad.set_defaults(func=_cmd_gradcheck)

    p_equiv = sub.add_parser("gmres-equiv",
                             help="SPD-quadratic equivalence with linear GMRES")
    p_equiv.add_argument("--n", type=int, default=10)
    p_equiv.add_argument("--seed", type=int, default=0)
    p_equiv.add_argument("--delta", type=float, default=1e-4)
    p_equiv.add_argument("--cutoff", type=float, default=1e-10)
    p_equiv.add_argument("--tol", type=float, default=1e-6)
    p_equiv.set_defaults(func=_cmd_gmres_equiv)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
