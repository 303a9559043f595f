"""H-representation polyhedra and the geometric predicates the region
enumeration needs: emptiness, interior point, containment, proper
hyperplane intersection, bisection, redundancy removal.

A polyhedron is stored as a stacked matrix ``H`` with rows ``[w, b]``
meaning ``w . x + b >= 0``.  Row normals are *not* normalized at
construction: rows keep an exact one-to-one correspondence with the
network weight rows they came from, and the Chebyshev LP accounts for
``||w||`` explicitly.

"Empty" throughout means *no full-dimensional interior*: a polyhedron is
empty when no ball of radius ``tol`` fits inside.  Measure-zero slivers
therefore count as empty, which is what keeps them out of the region
tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyRegion, UnboundedRegion
from .lp import LP_TOL, LpProblem, LpStatus, feasible, solve_lp

#: Default geometric tolerance: bounds an inscribed-ball radius, so it is
#: kept looser than the LP residual tolerance.
GEO_TOL = 1e-7


@dataclass(frozen=True)
class Halfspace:
    """The set ``{x : normal . x + offset >= 0}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.atleast_1d(np.asarray(self.normal, dtype=float))
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))
        if normal.ndim != 1 or normal.shape[0] < 1:
            raise DimensionMismatch(f"normal must be a vector, got shape {normal.shape}")
        if not (np.isfinite(normal).all() and np.isfinite(self.offset)):
            raise DimensionMismatch("non-finite halfspace data")
        if not normal.any():
            raise DimensionMismatch("degenerate halfspace: zero normal")

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def flipped(self) -> "Halfspace":
        return Halfspace(-self.normal, -self.offset)

    def as_row(self) -> np.ndarray:
        return np.concatenate([self.normal, [self.offset]])


class HPolyhedron:
    """Intersection of halfspaces, stored as the stacked matrix ``H``.

    ``H`` has shape ``(m, d + 1)``; row ``[w, b]`` encodes ``w.x + b >= 0``.
    Instances are immutable: every operation returns a new polyhedron, so
    they can be shared freely across parallel workers.
    """

    __slots__ = ("H", "dim", "_norms")

    def __init__(self, H, dim: int | None = None):
        H = np.atleast_2d(np.asarray(H, dtype=float))
        if H.size == 0:
            if dim is None:
                raise DimensionMismatch("empty H matrix needs an explicit dim")
            H = H.reshape(0, dim + 1)
        if H.ndim != 2 or H.shape[1] < 2:
            raise DimensionMismatch(f"H must be (m, d+1) with d >= 1, got {H.shape}")
        if not np.isfinite(H).all():
            raise DimensionMismatch("non-finite entry in H matrix")
        if dim is not None and dim != H.shape[1] - 1:
            raise DimensionMismatch(f"dim {dim} inconsistent with H shape {H.shape}")
        self.H = H
        self.dim = H.shape[1] - 1
        self._norms = None

    @classmethod
    def from_halfspaces(cls, rows: list[Halfspace]) -> "HPolyhedron":
        if not rows:
            raise DimensionMismatch("at least one halfspace required")
        d = rows[0].dim
        for h in rows:
            if h.dim != d:
                raise DimensionMismatch("halfspaces disagree on dimension")
        return cls(np.array([h.as_row() for h in rows]))

    @classmethod
    def from_bounds(cls, lower, upper) -> "HPolyhedron":
        """Axis-aligned box ``lower <= x <= upper``."""
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape:
            raise DimensionMismatch("lower/upper bound shapes differ")
        if (lower >= upper).any():
            raise EmptyRegion("box bounds define an empty or degenerate box")
        d = lower.shape[0]
        rows = []
        for i in range(d):
            lo_row = np.zeros(d + 1)
            lo_row[i] = 1.0
            lo_row[d] = -lower[i]  # x_i >= lo
            hi_row = np.zeros(d + 1)
            hi_row[i] = -1.0
            hi_row[d] = upper[i]  # x_i <= hi
            rows.extend([lo_row, hi_row])
        return cls(np.array(rows))

    @classmethod
    def box(cls, dim: int, half_width: float) -> "HPolyhedron":
        """The centered box ``[-half_width, half_width]^dim``."""
        return cls.from_bounds(np.full(dim, -half_width), np.full(dim, half_width))

    @property
    def nrows(self) -> int:
        return self.H.shape[0]

    @property
    def normals(self) -> np.ndarray:
        return self.H[:, :-1]

    @property
    def offsets(self) -> np.ndarray:
        return self.H[:, -1]

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(row[:-1], row[-1]) for row in self.H]

    def row_norms(self) -> np.ndarray:
        if self._norms is None:
            self._norms = np.linalg.norm(self.normals, axis=1)
        return self._norms

    def with_row(self, normal, offset) -> "HPolyhedron":
        normal = np.asarray(normal, dtype=float)
        if normal.shape[0] != self.dim:
            raise DimensionMismatch("row dimension mismatch")
        row = np.concatenate([normal, [offset]])
        return HPolyhedron(np.vstack([self.H, row]))

    def __repr__(self):
        return f"HPolyhedron(dim={self.dim}, rows={self.nrows})"


def _check_point(poly: HPolyhedron, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (poly.dim,):
        raise DimensionMismatch(f"point shape {x.shape} vs dim {poly.dim}")
    return x


def chebyshev_center(poly: HPolyhedron, lp_tol: float = LP_TOL) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball.

    Solves ``maximize r  s.t.  w_i.x + b_i >= r ||w_i||`` with both x and r
    free, so an empty polyhedron comes back with a *negative* radius rather
    than an error.  Raises :class:`UnboundedRegion` when nothing bounds the
    ball (no finite optimum).
    """
    if poly.nrows == 0:
        raise UnboundedRegion("polyhedron with no rows has no Chebyshev center")
    d = poly.dim
    norms = poly.row_norms()
    # -w_i.x + ||w_i|| r <= b_i
    A = np.hstack([-poly.normals, norms[:, None]])
    c = np.zeros(d + 1)
    c[-1] = 1.0
    out = solve_lp(LpProblem(c, A, poly.offsets.copy()), tol=lp_tol)
    if out.status is LpStatus.UNBOUNDED:
        raise UnboundedRegion("Chebyshev ball is unbounded: region has no bounding rows")
    if out.status is not LpStatus.OPTIMAL:
        # With x and r free the LP is feasible whenever some row has a
        # nonzero normal; a zero-normal row with negative offset is the one
        # way to be genuinely infeasible.
        return np.zeros(d), -np.inf
    return out.point[:d], float(out.point[d])


def is_empty(poly: HPolyhedron, tol: float = GEO_TOL, lp_tol: float = LP_TOL) -> bool:
    """True iff no ball of radius ``tol`` fits inside ``poly``.

    Equivalent to ``chebyshev radius < tol`` but runs as a single
    feasibility LP on the margin-shifted system ``w_i.x >= tol ||w_i|| - b_i``.
    """
    if poly.nrows == 0:
        return False
    shifted = poly.offsets - tol * poly.row_norms()
    return not feasible(-poly.normals, shifted, tol=lp_tol)


def contains(poly: HPolyhedron, x, tol: float = GEO_TOL) -> bool:
    """True iff every row satisfies ``w.x + b >= -tol``."""
    x = _check_point(poly, x)
    if poly.nrows == 0:
        return True
    return bool((poly.normals @ x + poly.offsets >= -tol).all())


def intersects_hyperplane(poly: HPolyhedron, h: Halfspace, tol: float = GEO_TOL) -> bool:
    """True iff the hyperplane of ``h`` properly bisects ``poly``.

    Proper means both closed sides keep a full-dimensional piece; a
    hyperplane merely supporting a face does not count.
    """
    if h.dim != poly.dim:
        raise DimensionMismatch("hyperplane dimension mismatch")
    plus, minus = bisect(poly, h)
    return not is_empty(plus, tol) and not is_empty(minus, tol)


def bisect(poly: HPolyhedron, h: Halfspace) -> tuple[HPolyhedron, HPolyhedron]:
    """Split ``poly`` along ``h``: append ``(w, b)`` for the plus side and
    ``(-w, -b)`` for the minus side, new row last, parent rows untouched."""
    if h.dim != poly.dim:
        raise DimensionMismatch("hyperplane dimension mismatch")
    return poly.with_row(h.normal, h.offset), poly.with_row(-h.normal, -h.offset)


def bounding_box(poly: HPolyhedron, lp_tol: float = LP_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis extent of ``poly`` via 2d support LPs.

    Raises :class:`UnboundedRegion` if any direction is unbounded and
    :class:`EmptyRegion` if the polyhedron is infeasible.
    """
    d = poly.dim
    A = -poly.normals
    b = poly.offsets.copy()
    lo = np.empty(d)
    hi = np.empty(d)
    for i in range(d):
        c = np.zeros(d)
        c[i] = 1.0
        for sign, store in ((1.0, hi), (-1.0, lo)):
            out = solve_lp(LpProblem(sign * c, A, b), tol=lp_tol)
            if out.status is LpStatus.UNBOUNDED:
                raise UnboundedRegion(f"polyhedron unbounded along axis {i}")
            if out.status is LpStatus.INFEASIBLE:
                raise EmptyRegion("cannot bound an empty polyhedron")
            store[i] = sign * out.objective_value
    return lo, hi


def remove_redundant(poly: HPolyhedron, tol: float = GEO_TOL, lp_tol: float = LP_TOL) -> HPolyhedron:
    """Drop every row whose removal leaves the point set unchanged.

    One LP per row: minimize the row's slack subject to all currently kept
    other rows (with the candidate row relaxed by 1 so the LP stays
    bounded).  If the minimum slack is >= -tol the row is implied.
    """
    if is_empty(poly, tol, lp_tol):
        raise EmptyRegion("remove_redundant requires a nonempty polyhedron")
    H = poly.H
    keep = np.ones(H.shape[0], dtype=bool)
    for i in range(H.shape[0]):
        others = H[keep & (np.arange(H.shape[0]) != i)]
        w_i, b_i = H[i, :-1], H[i, -1]
        # minimize w_i.x + b_i  s.t.  others hold and w_i.x + b_i >= -1
        A = np.vstack([-others[:, :-1], -w_i[None, :]])
        rhs = np.concatenate([others[:, -1], [b_i + 1.0]])
        out = solve_lp(LpProblem(-w_i, A, rhs), tol=lp_tol)
        if out.status is LpStatus.OPTIMAL:
            min_slack = -(out.objective_value) + b_i
            if min_slack >= -tol:
                keep[i] = False
    return HPolyhedron(H[keep])
