"""Benchmark objectives A-G with analytic gradients, plus verification
oracles (central finite differences and an explicit-basis linear GMRES).

A    quadratic with SPD diagonal matrix diag(1..n), condition number n
B    problem A composed with a paraboloid coordinate change (banana valleys)
C    problem B with a seeded random orthogonal similarity, kappa = n
D    extended Rosenbrock (n even)
E    Brown almost-linear function
F    trigonometric function
G    penalty function I

D-G are half sums of squared residual terms; their gradients are assembled
from ``g_k = sum_j t_j * dt_j/du_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidProblem, NumericalFailure, Objective, Vector

VALID_TAGS = ("A", "B", "C", "D", "E", "F", "G")


@dataclass(frozen=True)
class ProblemKind:
    """Identifies one benchmark instance.  C needs a seed for its random
    orthogonal factor (checked when the objective is built); D needs an even
    dimension."""

    tag: str
    n: int
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.tag not in VALID_TAGS:
            raise InvalidProblem(f"unknown problem tag {self.tag!r}")
        if self.n < 1:
            raise InvalidProblem("dimension must be positive")
        if self.tag == "D" and self.n % 2 != 0:
            raise InvalidProblem("problem D requires an even dimension")


def _make_a(n: int) -> Objective:
    d = np.arange(1.0, n + 1.0)
    u_star = np.ones(n)

    def fg(u: Vector) -> tuple[float, Vector]:
        diff = u - u_star
        g = d * diff
        f = 0.5 * float(diff @ g) + 1.0
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 1.0), name=f"A(n={n})")


def _paraboloid(x: Vector) -> Vector:
    y = x.copy()
    y[1:] -= 10.0 * x[0] ** 2
    return y


def _make_b(n: int) -> Objective:
    d = np.arange(1.0, n + 1.0)
    u_star = np.ones(n)

    def fg(u: Vector) -> tuple[float, Vector]:
        x = u - u_star
        y = _paraboloid(x)
        dy = d * y
        f = 0.5 * float(y @ dy) + 1.0
        g = dy.copy()
        g[0] -= 20.0 * x[0] * float(dy[1:].sum())
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 1.0), name=f"B(n={n})")


def random_orthogonal(n: int, seed: int) -> Vector:
    """Q factor of the QR factorization of a uniform [0,1) random matrix.

    Signs are fixed so the R diagonal is nonnegative, making Q a
    deterministic function of the seed.
    """
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.random((n, n)))
    return q * np.where(np.diag(r) >= 0.0, 1.0, -1.0)


def _make_c(n: int, seed: int) -> Objective:
    q = random_orthogonal(n, seed)
    t = (q * np.arange(1.0, n + 1.0)) @ q.T
    t = 0.5 * (t + t.T)
    u_star = np.ones(n)

    def fg(u: Vector) -> tuple[float, Vector]:
        x = u - u_star
        y = _paraboloid(x)
        ty = t @ y
        f = 0.5 * float(y @ ty) + 1.0
        g = ty.copy()
        g[0] -= 20.0 * x[0] * float(ty[1:].sum())
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 1.0),
                     name=f"C(n={n},seed={seed})")


def _make_d(n: int) -> Objective:
    u_star = np.ones(n)

    def fg(u: Vector) -> tuple[float, Vector]:
        uo = u[0::2]
        ue = u[1::2]
        t_odd = 10.0 * (ue - uo ** 2)
        t_even = 1.0 - uo
        f = 0.5 * (float(t_odd @ t_odd) + float(t_even @ t_even))
        g = np.empty_like(u)
        g[0::2] = t_odd * (-20.0 * uo) - t_even
        g[1::2] = 10.0 * t_odd
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 0.0), name=f"D(n={n})")


def _make_e(n: int) -> Objective:
    u_star = np.ones(n)

    def fg(u: Vector) -> tuple[float, Vector]:
        total = float(u.sum())
        t_head = u[:-1] + total - (n + 1.0)
        prod = float(u.prod())
        t_last = prod - 1.0
        f = 0.5 * (float(t_head @ t_head) + t_last * t_last)
        # Partial products prod_{i != k} u_i, with exact-zero entries handled.
        zero = u == 0.0
        nz = int(zero.sum())
        if nz == 0:
            partial = prod / u
        elif nz == 1:
            partial = np.zeros(n)
            partial[int(np.argmax(zero))] = float(np.prod(u[~zero]))
        else:
            partial = np.zeros(n)
        g = float(t_head.sum()) + np.append(t_head, 0.0) + t_last * partial
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 0.0), name=f"E(n={n})")


def _make_f(n: int) -> Objective:
    u_star = np.zeros(n)
    j = np.arange(1.0, n + 1.0)

    def fg(u: Vector) -> tuple[float, Vector]:
        c = np.cos(u)
        s = np.sin(u)
        t = n - float(c.sum()) - j * (1.0 - c) - s
        f = 0.5 * float(t @ t)
        g = float(t.sum()) * s - t * (j * s + c)
        return f, g

    return Objective(n, fg, known_optimum=(u_star, 0.0), name=f"F(n={n})")


_PENALTY_COEF = math.sqrt(1e-5)


def _make_g(n: int) -> Objective:
    def fg(u: Vector) -> tuple[float, Vector]:
        t = _PENALTY_COEF * (u - 1.0)
        t_last = float(u @ u) - 0.25
        f = 0.5 * (float(t @ t) + t_last * t_last)
        g = _PENALTY_COEF * t + (2.0 * t_last) * u
        return f, g

    return Objective(n, fg, known_optimum=None, name=f"G(n={n})")


def make_problem(kind: ProblemKind) -> Objective:
    """Build the objective for ``kind`` with its analytic gradient."""
    if kind.tag == "A":
        return _make_a(kind.n)
    if kind.tag == "B":
        return _make_b(kind.n)
    if kind.tag == "C":
        if kind.seed is None:
            raise InvalidProblem("problem C requires a seed")
        return _make_c(kind.n, kind.seed)
    if kind.tag == "D":
        return _make_d(kind.n)
    if kind.tag == "E":
        return _make_e(kind.n)
    if kind.tag == "F":
        return _make_f(kind.n)
    return _make_g(kind.n)


def finite_difference_gradient(obj: Objective, x: Vector, h: float) -> Vector:
    """Central-difference gradient oracle, ``(f(x+h e_k) - f(x-h e_k))/2h``."""
    if not 1e-8 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-8, 1e-3]")
    x = np.asarray(x, dtype=float)
    g = np.empty(obj.n)
    for k in range(obj.n):
        xp = x.copy()
        xp[k] += h
        xm = x.copy()
        xm[k] -= h
        g[k] = (obj.fg(xp)[0] - obj.fg(xm)[0]) / (2.0 * h)
    if not np.isfinite(g).all():
        raise NumericalFailure("finite-difference gradient is non-finite", x=x)
    return g


@dataclass(frozen=True)
class QuadraticSpec:
    """SPD quadratic ``f(u) = 0.5 u'Au - b'u`` used by the linear oracle."""

    matrix: Vector
    rhs: Vector

    def __post_init__(self) -> None:
        a = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if b.shape != (a.shape[0],):
            raise ValueError("rhs length must match the matrix")
        if np.abs(a - a.T).max() > 1e-12:
            raise ValueError("matrix must be symmetric within 1e-12")
        if (np.diag(a) <= 0.0).any():
            raise ValueError("matrix diagonal must be positive")


def quadratic_objective(spec: QuadraticSpec) -> Objective:
    """Objective form of ``spec`` (gradient ``Au - b``, i.e. minus residual)."""
    a = np.asarray(spec.matrix, dtype=float)
    b = np.asarray(spec.rhs, dtype=float)

    def fg(u: Vector) -> tuple[float, Vector]:
        au = a @ u
        return 0.5 * float(u @ au) - float(b @ u), au - b

    u_star = np.linalg.solve(a, b)
    f_star = 0.5 * float(u_star @ (a @ u_star)) - float(b @ u_star)
    return Objective(len(b), fg, known_optimum=(u_star, f_star),
                     name=f"quadratic(n={len(b)})")


def linear_gmres_oracle(spec: QuadraticSpec, x0: Vector, k: int) -> list[float]:
    """Residual two-norms of linear GMRES on ``A u = b`` from ``x0``.

    Entry ``i`` (0-based) is the minimum of ``||b - A x||_2`` over
    ``x in x0 + K_{i+1}(A, r0)``, computed independently of the main solver
    path: an explicit orthonormal Krylov basis plus a dense least-squares
    solve.  The list is truncated early once the residual reaches zero.
    """
    a = np.asarray(spec.matrix, dtype=float)
    b = np.asarray(spec.rhs, dtype=float)
    n = len(b)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    x0 = np.asarray(x0, dtype=float)
    r0 = b - a @ x0
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm == 0.0:
        return []

    norms: list[float] = []
    basis: list[Vector] = []
    images: list[Vector] = []
    v = r0.copy()
    for _ in range(k):
        for q in basis:
            v = v - float(q @ v) * q
        vnorm = float(np.linalg.norm(v))
        if vnorm <= 1e-14 * r0_norm:
            break  # Krylov space saturated; previous residual was already zero
        q = v / vnorm
        basis.append(q)
        images.append(a @ q)
        w = np.column_stack(images)
        coeffs, *_ = np.linalg.lstsq(w, r0, rcond=None)
        res = float(np.linalg.norm(r0 - w @ coeffs))
        norms.append(res)
        if res <= 1e-14 * r0_norm:
            break
        v = images[-1].copy()
    return norms
