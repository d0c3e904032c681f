"""Nonlinear GMRES optimization with steepest-descent preconditioning,
reference optimizers, benchmark problems, and a reproducible harness."""

from .core import (
    AlreadyStationary,
    ConvergenceHistory,
    EvalCounter,
    InvalidProblem,
    IterationRecord,
    NotDescentDirection,
    NumericalFailure,
    Objective,
    SolveStatus,
    StepKind,
    Vector,
    evaluate,
)
from .linesearch import (
    LineSearchResult,
    LineSearchStatus,
    SearchAudit,
    WolfeParams,
    line_search,
)
from .leastsq import RecombinationSystem, solve_recombination
from .solver import (
    NGmresConfig,
    NGmresState,
    Preconditioner,
    SdlsPreconditioner,
    SdParams,
    SdPreconditioner,
    StepTrace,
    Window,
    gmres_accelerate,
    ngmres_solve,
    ngmres_step,
    precondition_sd,
    precondition_sdls,
)
from .baselines import (
    DescentConfig,
    LbfgsConfig,
    NcgConfig,
    lbfgs_direction,
    lbfgs_solve,
    ncg_solve,
    steepest_descent_solve,
)
from .problems import (
    ProblemKind,
    QuadraticSpec,
    finite_difference_gradient,
    linear_gmres_oracle,
    make_problem,
    quadratic_objective,
    random_orthogonal,
)
from .harness import (
    Method,
    RunSummary,
    TrialConfig,
    TrialResult,
    gmres_equivalence,
    history_csv,
    initial_guess,
    penalty_reference,
    run_table,
    run_trial,
    run_window_sweep,
    summaries_json,
    summaries_text,
)

__all__ = [name for name in dir() if not name.startswith("_")]
