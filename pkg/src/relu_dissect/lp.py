"""Dense linear-program solver sized for many small problems.

Solves

    maximize    c . x
    subject to  A x <= b
                lo_i <= x_i <= hi_i   (optional, per variable)

with a two-phase tableau simplex using Bland's rule throughout, so the
iteration never cycles.  Variables are free unless bounds are given.  The
solver is deliberately minimal: the workload it serves is a very large
number of very small feasibility and Chebyshev-center LPs, where per-call
setup cost matters far more than per-iteration sophistication.

Everything here is stateless and safe to call from parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import MalformedProblem, ReluDissectError

#: Default absolute tolerance on constraint satisfaction.
LP_TOL = 1e-9

# Pivot threshold: entries smaller than this are treated as zero when
# selecting pivots.  Kept well below LP_TOL so tolerance decisions are
# made on residuals, not on pivot noise.
_PIVOT_TOL = 1e-11

_MAX_ITER_FACTOR = 200


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    """A dense LP: maximize ``objective . x`` s.t. ``constraint_matrix @ x <= constraint_rhs``.

    ``bounds`` is an optional sequence of ``(lo, hi)`` pairs, one per
    variable; ``None`` entries mean unbounded on that side.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    constraint_rhs: np.ndarray
    bounds: list[tuple[float | None, float | None]] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.constraint_matrix = np.asarray(self.constraint_matrix, dtype=float)
        self.constraint_rhs = np.asarray(self.constraint_rhs, dtype=float)

    def validate(self) -> None:
        c, A, b = self.objective, self.constraint_matrix, self.constraint_rhs
        if A.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise MalformedProblem(
                f"expected A 2-D, c and b 1-D; got shapes {A.shape}, {c.shape}, {b.shape}"
            )
        m, n = A.shape
        if b.shape[0] != m:
            raise MalformedProblem(f"A has {m} rows but b has {b.shape[0]} entries")
        if c.shape[0] != n:
            raise MalformedProblem(f"A has {n} columns but c has {c.shape[0]} entries")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise MalformedProblem("non-finite entry in LP data")
        if self.bounds is not None:
            if len(self.bounds) != n:
                raise MalformedProblem(
                    f"bounds has {len(self.bounds)} pairs for {n} variables"
                )
            for i, (lo, hi) in enumerate(self.bounds):
                lo = -np.inf if lo is None else lo
                hi = np.inf if hi is None else hi
                if np.isnan(lo) or np.isnan(hi) or lo > hi:
                    raise MalformedProblem(f"invalid bounds for variable {i}: ({lo}, {hi})")


@dataclass
class LpOutcome:
    """Result of :func:`solve_lp`; ``point`` and ``objective_value`` are set iff optimal."""

    status: LpStatus
    point: np.ndarray | None = None
    objective_value: float | None = None


def solve_lp(problem: LpProblem, tol: float = LP_TOL) -> LpOutcome:
    """Solve ``problem``; on OPTIMAL the point is feasible within ``tol``."""
    if tol <= 0:
        raise MalformedProblem(f"tol must be positive, got {tol}")
    problem.validate()
    A, b = _fold_bounds(problem)
    n = problem.objective.shape[0]
    status, x = _solve_free(problem.objective, A, b, tol)
    if status is not LpStatus.OPTIMAL:
        return LpOutcome(status)
    value = float(problem.objective @ x) if n else 0.0
    return LpOutcome(LpStatus.OPTIMAL, point=x, objective_value=value)


def feasible(constraint_matrix, constraint_rhs, tol: float = LP_TOL) -> bool:
    """True iff ``{x : A x <= b}`` is nonempty (phase-1 only; never 'unbounded')."""
    A = np.asarray(constraint_matrix, dtype=float)
    b = np.asarray(constraint_rhs, dtype=float)
    problem = LpProblem(np.zeros(A.shape[1] if A.ndim == 2 else 0), A, b)
    return solve_lp(problem, tol).status is not LpStatus.INFEASIBLE


def _fold_bounds(problem: LpProblem) -> tuple[np.ndarray, np.ndarray]:
    """Append variable bounds as ordinary inequality rows."""
    A, b = problem.constraint_matrix, problem.constraint_rhs
    if problem.bounds is None:
        return A, b
    n = A.shape[1]
    extra_rows = []
    extra_rhs = []
    for i, (lo, hi) in enumerate(problem.bounds):
        if hi is not None and np.isfinite(hi):
            row = np.zeros(n)
            row[i] = 1.0
            extra_rows.append(row)
            extra_rhs.append(hi)
        if lo is not None and np.isfinite(lo):
            row = np.zeros(n)
            row[i] = -1.0
            extra_rows.append(row)
            extra_rhs.append(-lo)
    if not extra_rows:
        return A, b
    return np.vstack([A, extra_rows]), np.concatenate([b, extra_rhs])


def _solve_free(c, A, b, tol):
    """maximize c.x s.t. A x <= b with x free, via the split x = u - v."""
    m, n = A.shape
    if n == 0:
        # No variables: feasible iff b >= 0.
        ok = m == 0 or bool((b >= -tol).all())
        return (LpStatus.OPTIMAL, np.zeros(0)) if ok else (LpStatus.INFEASIBLE, None)
    A2 = np.hstack([A, -A])
    c2 = np.concatenate([c, -c])
    status, z = _two_phase(c2, A2, b, tol)
    if status is not LpStatus.OPTIMAL:
        return status, None
    return LpStatus.OPTIMAL, z[:n] - z[n:]


def _two_phase(c, A, b, tol):
    """maximize c.z s.t. A z <= b, z >= 0.  Returns (status, z)."""
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    n_art = int((sign < 0).sum())
    ncols = n + m + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = A * sign[:, None]
    T[np.arange(m), n + np.arange(m)] = sign
    T[:m, -1] = b * sign

    basis = n + np.arange(m)
    art_rows = np.nonzero(sign < 0)[0]
    for k, r in enumerate(art_rows):
        T[r, n + m + k] = 1.0
        basis[r] = n + m + k

    n_real = n + m  # artificial columns may never (re-)enter

    rows = np.arange(m)
    if n_art:
        cost1 = np.zeros(ncols)
        cost1[n_real:] = 1.0
        _set_objective(T, basis, cost1)
        _pivot_loop(T, basis, n_real)
        feas_tol = tol * max(1.0, float(np.abs(b).max(initial=0.0)))
        if -T[-1, -1] > feas_tol:
            return LpStatus.INFEASIBLE, None
        T, basis, rows = _expel_artificials(T, basis, n_real, rows)

    cost2 = np.zeros(T.shape[1] - 1)
    cost2[:n] = -c  # maximize c.z == minimize -c.z
    _set_objective(T, basis, cost2)
    if not _pivot_loop(T, basis, n_real):
        return LpStatus.UNBOUNDED, None

    z = np.zeros(T.shape[1] - 1)
    z[basis] = T[:-1, -1]
    z = _refine_basic_solution(A, b, rows, basis, z)
    return LpStatus.OPTIMAL, z[:n]


def _set_objective(T, basis, cost):
    """Install ``cost`` (a minimization objective) as the tableau's reduced-cost row."""
    T[-1, :-1] = cost
    T[-1, -1] = 0.0
    for i, j in enumerate(basis):
        cj = T[-1, j]
        if cj != 0.0:
            T[-1, :] -= cj * T[i, :]


def _pivot_loop(T, basis, n_enterable):
    """Bland-rule pivoting to optimality.  Returns False if unbounded."""
    red = T[-1, :n_enterable]
    max_iter = _MAX_ITER_FACTOR * max(T.shape[0], n_enterable)
    for _ in range(max_iter):
        neg = np.nonzero(red < -_PIVOT_TOL)[0]
        if neg.size == 0:
            return True
        j = int(neg[0])  # Bland: smallest improving index enters
        col = T[:-1, j]
        pos = col > _PIVOT_TOL
        if not pos.any():
            return False
        ratios = np.full(col.shape[0], np.inf)
        rhs = T[:-1, -1]
        ratios[pos] = rhs[pos] / col[pos]
        rmin = ratios.min()
        ties = np.nonzero(ratios <= rmin + _PIVOT_TOL * (1.0 + abs(rmin)))[0]
        i = int(ties[np.argmin(basis[ties])])  # Bland: smallest basic index leaves
        _pivot(T, basis, i, j)
    raise ReluDissectError("simplex iteration limit exceeded")


def _pivot(T, basis, i, j):
    T[i, :] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i, :])
    T[:, j] = 0.0
    T[i, j] = 1.0
    basis[i] = j


def _expel_artificials(T, basis, n_real, rows):
    """Pivot basic artificials out after phase 1; drop redundant rows."""
    drop = []
    for i in range(T.shape[0] - 1):
        if basis[i] < n_real:
            continue
        row = T[i, :n_real]
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > _PIVOT_TOL:
            _pivot(T, basis, i, j)
        else:
            drop.append(i)  # 0 = 0 row: original constraint was dependent
    if drop:
        keep = [i for i in range(T.shape[0] - 1) if i not in drop]
        T = T[keep + [T.shape[0] - 1], :]
        basis = basis[keep]
        rows = rows[keep]
    return T, basis, rows


def _refine_basic_solution(A, b, rows, basis, z_tab):
    """Re-solve the final basis against the original data.

    Tableau updates accumulate rounding, and a forced pivot on a tiny
    element amplifies it by 1/|pivot|.  The optimal basis itself is
    combinatorial, so the basic solution can be recovered from pristine
    inputs: solve [A | I][rows, basis] @ z_B = b[rows].  Keep whichever
    of the two candidate points violates the constraints less.
    """
    m, n = A.shape
    if basis.size == 0:
        return z_tab
    cols = np.hstack([A, np.eye(m)])
    M = cols[np.ix_(rows, basis)]
    try:
        zb = np.linalg.solve(M, b[rows])
    except np.linalg.LinAlgError:
        return z_tab
    if not np.isfinite(zb).all():
        return z_tab
    z_ref = np.zeros_like(z_tab)
    z_ref[basis] = zb

    def violation(z):
        if m == 0:
            return 0.0
        return float(np.maximum(A @ z[:n] - b, 0.0).max(initial=0.0))

    return z_ref if violation(z_ref) <= violation(z_tab) else z_tab
