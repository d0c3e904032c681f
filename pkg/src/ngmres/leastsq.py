"""Small dense least-squares solve for the recombination coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NumericalFailure, Vector

# Ridge factor applied to the Gram diagonal; proportional scaling keeps the
# solve equivariant under uniform rescaling of the system.
_RIDGE = 1e-12


@dataclass(frozen=True)
class RecombinationSystem:
    """Minimize ``||base_residual + sum_j alphas[j] * columns[j]||_2``."""

    base_residual: Vector
    columns: list[Vector]


def solve_recombination(system: RecombinationSystem) -> tuple[Vector, float]:
    """Return ``(alphas, residual_norm)`` for the recombination system.

    Solves the k x k normal equations with a small ridge proportional to the
    largest Gram diagonal entry.  Degenerate or numerically singular systems
    fall back to ``alphas = 0`` (a harmless no-op for the caller), so the
    achieved residual norm never exceeds ``||base_residual||``.
    """
    base = np.asarray(system.base_residual, dtype=float)
    if base.ndim != 1:
        raise ValueError("base residual must be a vector")
    if not system.columns:
        raise ValueError("at least one column is required")
    cols = np.column_stack([np.asarray(c, dtype=float) for c in system.columns])
    if cols.shape[0] != base.shape[0]:
        raise ValueError("column length does not match base residual")
    if not (np.isfinite(base).all() and np.isfinite(cols).all()):
        raise NumericalFailure("recombination system has non-finite entries")

    k = cols.shape[1]
    base_norm = float(np.linalg.norm(base))
    zeros = np.zeros(k)

    gram = cols.T @ cols
    peak = float(gram.diagonal().max())
    if peak <= 0.0:
        return zeros, base_norm
    try:
        alphas = np.linalg.solve(gram + (_RIDGE * peak) * np.eye(k),
                                 -(cols.T @ base))
    except np.linalg.LinAlgError:
        return zeros, base_norm
    if not np.isfinite(alphas).all():
        return zeros, base_norm
    residual_norm = float(np.linalg.norm(base + cols @ alphas))
    if residual_norm > base_norm:
        return zeros, base_norm
    return alphas, residual_norm
