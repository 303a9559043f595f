"""Partition of a polyhedral domain by a set of hyperplanes.

Hyperplanes are inserted one at a time into a binary region tree.  An
insertion descends from the root and prunes every subtree whose region
the hyperplane does not properly intersect: a hyperplane that misses a
region cannot meet any of its subregions, so the whole subtree keeps a
single sign.  Leaves that are properly cut get bisected, the new row
appended last.

Each original hyperplane receives a sign per region: +1 when the
region's interior point v satisfies w . v + b >= 0 (ties count as +1),
-1 otherwise.  Geometrically duplicate hyperplanes are split only once
and their signs copied, with orientation tracked so an input flipped
relative to the stored representative still reports its own sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyRegion, OutOfRange
from .geometry import (
    GEO_TOL,
    Halfspace,
    HPolyhedron,
    bisect,
    chebyshev_center,
    intersects_hyperplane,
    is_empty,
)

#: Decimal places used when hashing a normalized hyperplane for duplicate
#: detection.  A missed duplicate merely re-splits and resolves to a pending
#: sign, so correctness does not ride on this value.
_DEDUP_DECIMALS = 9


@dataclass
class SignedRegion:
    """A full-dimensional cell together with its hyperplane side vector."""

    polyhedron: HPolyhedron
    signs: np.ndarray
    interior_point: np.ndarray
    radius: float

    @property
    def pattern(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


@dataclass
class ArrangementResult:
    regions: list[SignedRegion]
    n_hyperplanes: int
    n_unique: int

    def __len__(self):
        return len(self.regions)

    @property
    def patterns(self) -> list[str]:
        return [r.pattern for r in self.regions]


@dataclass
class _Node:
    region: HPolyhedron
    center: np.ndarray
    radius: float
    pending: list = field(default_factory=list)  # (hyperplane id, sign)
    split_id: int = -1
    plus: "_Node | None" = None
    minus: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split_id < 0


def zaslavsky_bound(n: int, d: int) -> int:
    """Maximum number of full-dimensional cells n hyperplanes cut in R^d:
    sum_{j=0}^{d} C(n, j).  Exact integer arithmetic, no overflow."""
    if n < 0:
        raise OutOfRange(f"hyperplane count must be nonnegative, got {n}")
    if d < 1:
        raise OutOfRange(f"dimension must be positive, got {d}")
    return sum(math.comb(n, j) for j in range(d + 1))


def _canonical_key(h: Halfspace) -> tuple[tuple, int]:
    """(hashable key, orientation) identifying the geometric hyperplane of
    ``h`` regardless of row scaling or sign."""
    row = h.as_row()
    row = row / np.linalg.norm(h.normal)
    lead = int(np.argmax(np.abs(row[:-1])))
    orient = 1 if row[lead] > 0 else -1
    key = tuple(np.round(orient * row, _DEDUP_DECIMALS).tolist())
    return key, orient


def _collapse_duplicates(
    hyperplanes: Sequence[Halfspace],
) -> tuple[list[Halfspace], list[tuple[int, int]]]:
    """Unique representatives plus, per input, (unique id, orientation)."""
    unique: list[Halfspace] = []
    seen: dict[tuple, tuple[int, int]] = {}
    mapping: list[tuple[int, int]] = []
    for h in hyperplanes:
        key, orient = _canonical_key(h)
        if key in seen:
            uid, rep_orient = seen[key]
            mapping.append((uid, orient * rep_orient))
        else:
            uid = len(unique)
            unique.append(h)
            seen[key] = (uid, orient)
            mapping.append((uid, 1))
    return unique, mapping


def _cut_is_certain(node: _Node, h: Halfspace, tol: float) -> tuple[float, bool]:
    """Signed row value at the node center, and whether the hyperplane
    certainly cuts the node's inscribed ball deep enough that both sides
    keep a ball of radius tol (no LP needed in that case)."""
    t = float(h.normal @ node.center + h.offset)
    norm = float(np.linalg.norm(h.normal))
    certain = node.radius * norm - abs(t) >= 2.0 * tol * norm
    return t, certain


def _insert(node: _Node, hid: int, h: Halfspace, tol: float) -> None:
    t, certain = _cut_is_certain(node, h, tol)
    if not node.is_leaf:
        if certain or intersects_hyperplane(node.region, h, tol):
            _insert(node.plus, hid, h, tol)
            _insert(node.minus, hid, h, tol)
        else:
            node.pending.append((hid, 1 if t >= 0.0 else -1))
        return
    if certain:
        plus_poly, minus_poly = bisect(node.region, h)
        c_p, r_p = chebyshev_center(plus_poly)
        c_m, r_m = chebyshev_center(minus_poly)
    else:
        plus_poly, minus_poly = bisect(node.region, h)
        c_p, r_p = chebyshev_center(plus_poly)
        if r_p < tol:
            node.pending.append((hid, 1 if t >= 0.0 else -1))
            return
        c_m, r_m = chebyshev_center(minus_poly)
        if r_m < tol:
            node.pending.append((hid, 1 if t >= 0.0 else -1))
            return
    node.split_id = hid
    node.plus = _Node(plus_poly, c_p, r_p)
    node.minus = _Node(minus_poly, c_m, r_m)


def _collect(node: _Node, signs: np.ndarray, out: list) -> None:
    for hid, s in node.pending:
        signs[hid] = s
    if node.is_leaf:
        out.append((node, signs.copy()))
        return
    signs[node.split_id] = 1
    _collect(node.plus, signs, out)
    signs[node.split_id] = -1
    _collect(node.minus, signs, out)


def get_regions(
    domain: HPolyhedron,
    hyperplanes: Sequence[Halfspace],
    tol: float = GEO_TOL,
) -> ArrangementResult:
    """Enumerate the full-dimensional cells the hyperplanes cut out of
    ``domain``.

    Returns regions in canonical order: lexicographic by pattern string,
    '+' before '-'.  Every region carries an interior point (its Chebyshev
    center) and inscribed-ball radius >= ``tol``.
    """
    for h in hyperplanes:
        if h.dim != domain.dim:
            raise OutOfRange(
                f"hyperplane dimension {h.dim} does not match domain dimension {domain.dim}"
            )
    if is_empty(domain, tol):
        raise EmptyRegion("cannot partition an empty domain")
    unique, mapping = _collapse_duplicates(hyperplanes)
    center, radius = chebyshev_center(domain)
    root = _Node(domain, center, radius)
    for hid, h in enumerate(unique):
        _insert(root, hid, h, tol)

    leaves: list[tuple[_Node, np.ndarray]] = []
    _collect(root, np.zeros(len(unique), dtype=np.int64), leaves)

    regions = []
    for node, uid_signs in leaves:
        signs = np.array([uid_signs[uid] * orient for uid, orient in mapping], dtype=np.int64)
        regions.append(SignedRegion(node.region, signs, node.center, node.radius))
    regions.sort(key=lambda r: r.pattern)
    return ArrangementResult(regions, len(hyperplanes), len(unique))
