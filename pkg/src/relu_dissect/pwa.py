"""Exact piecewise-affine form of a ReLU network over a bounded domain.

The converter maintains a working set of (region, P) pairs, P being a
homogeneous matrix mapping [x; 1] to the signal entering the next node.
A dense node multiplies every P by its lift T.  A ReLU node splits each
region along its neuron boundaries expressed in input coordinates (the
rows of P), then zeroes the rows that are negative at each subregion's
interior point.  What remains is the network itself, written as one
affine map per polyhedral cell: evaluating the PWA form and running the
forward pass agree to floating-point accuracy, not approximately.

Subregion tasks at a ReLU node are mutually independent; they can run
in a process pool.  Output order is canonicalized by activation pattern,
so the worker count never changes the result.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arrangement import get_regions
from .errors import (
    DimensionMismatch,
    EmptyDomain,
    IndexOutOfRange,
    OutsideDomain,
    SchemaError,
    UnboundedDomain,
    UnboundedRegion,
)
from .geometry import (
    GEO_TOL,
    Halfspace,
    HPolyhedron,
    bounding_box,
    chebyshev_center,
    contains,
    is_empty,
)
from .network import DenseLayer, Network

#: Rows whose normal falls below this norm are treated as constant-sign
#: neurons instead of hyperplanes.  Deliberately far below the geometric
#: tolerance: misclassifying a row of norm eps costs up to eps * diam(domain)
#: downstream, which must stay inside the evaluation error budget.
DEGENERATE_ROW_TOL = 1e-12


@dataclass
class LinearRegion:
    """One cell of the partition and the affine map the network applies on it.

    ``matrix`` is homogeneous: shape (output_dim + 1, input_dim + 1), last
    row e_last, acting on [x; 1].
    """

    polyhedron: HPolyhedron
    matrix: np.ndarray
    pattern: str
    interior_point: np.ndarray | None = None
    radius: float | None = None

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix[:-1, :-1] @ x + self.matrix[:-1, -1]


@dataclass
class PwaFunction:
    input_dim: int
    output_dim: int
    domain: HPolyhedron
    regions: list[LinearRegion]
    #: working-set size after each network node (conversion metadata,
    #: not serialized)
    layer_counts: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.regions)

    @property
    def patterns(self) -> list[str]:
        return [r.pattern for r in self.regions]


def neuron_hyperplanes(
    P: np.ndarray, node_width: int, tol: float = DEGENERATE_ROW_TOL
) -> tuple[list[tuple[int, Halfspace]], list[tuple[int, float]]]:
    """Neuron boundaries encoded by the rows of ``P``, in input coordinates.

    Returns ``(hyperplanes, degenerate)``: ``hyperplanes`` pairs each
    contributing row index with its Halfspace; ``degenerate`` lists rows
    whose normal norm falls below ``tol`` together with their constant
    offset (those neurons do not bend anything, they are stuck on one side).
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != node_width + 1:
        raise DimensionMismatch(
            f"P must have node_width + 1 = {node_width + 1} rows, got shape {P.shape}"
        )
    hyperplanes: list[tuple[int, Halfspace]] = []
    degenerate: list[tuple[int, float]] = []
    for i in range(node_width):
        w = P[i, :-1]
        b = float(P[i, -1])
        if np.linalg.norm(w) < tol:
            degenerate.append((i, b))
        else:
            hyperplanes.append((i, Halfspace(w, b)))
    return hyperplanes, degenerate


def apply_pattern(P: np.ndarray, inactive_rows) -> np.ndarray:
    """Copy of ``P`` with the listed neuron rows zeroed; homogeneous row kept."""
    P = np.asarray(P, dtype=float)
    out = P.copy()
    width = P.shape[0] - 1
    for i in inactive_rows:
        if not 0 <= i < width:
            raise IndexOutOfRange(f"row {i} outside the {width} neuron rows")
        out[i, :] = 0.0
    return out


def _split_region(args) -> list[tuple[np.ndarray, np.ndarray, str, np.ndarray, float]]:
    """One ReLU-node task: partition a region by its neuron boundaries and
    zero the locally inactive rows.  Top-level so a process pool can ship it."""
    H, P, tol = args
    poly = HPolyhedron(H)
    width = P.shape[0] - 1
    hyperplanes, _ = neuron_hyperplanes(P, width)
    arr = get_regions(poly, [h for _, h in hyperplanes], tol)
    out = []
    for sub in arr.regions:
        vals = P @ np.append(sub.interior_point, 1.0)
        inactive = [i for i in range(width) if vals[i] < 0.0]
        bits = "".join("+" if vals[i] >= 0.0 else "-" for i in range(width))
        out.append(
            (sub.polyhedron.H, apply_pattern(P, inactive), bits, sub.interior_point, sub.radius)
        )
    return out


def convert(
    net: Network,
    domain: HPolyhedron,
    tol: float = GEO_TOL,
    workers: int = 1,
) -> PwaFunction:
    """Rewrite ``net`` as an exact piecewise-affine function on ``domain``.

    Starts from the single pair (domain, identity).  Dense nodes compose;
    each ReLU node refines every region independently (in parallel when
    ``workers`` > 1) and zeroes inactive rows per subregion.  Regions come
    back sorted by activation pattern, so output is identical for every
    worker count.
    """
    if domain.dim != net.input_dim:
        raise DimensionMismatch(
            f"domain dimension {domain.dim} does not match network input {net.input_dim}"
        )
    if is_empty(domain, tol):
        raise EmptyDomain("conversion domain has no interior")
    try:
        bounding_box(domain)
    except UnboundedRegion as exc:
        raise UnboundedDomain(str(exc)) from exc

    d = net.input_dim
    center, radius = chebyshev_center(domain)
    # working set: (H matrix, P matrix, pattern so far, interior point, radius)
    work = [(domain.H, np.eye(d + 1), "", center, radius)]
    layer_counts: list[int] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for layer in net.layers:
            if isinstance(layer, DenseLayer):
                T = layer.homogeneous()
                work = [(H, T @ P, pat, c, r) for H, P, pat, c, r in work]
            else:
                tasks = [(H, P, tol) for H, P, _, _, _ in work]
                if pool is not None:
                    chunk = max(1, len(tasks) // (4 * workers))
                    split = list(pool.map(_split_region, tasks, chunksize=chunk))
                else:
                    split = [_split_region(t) for t in tasks]
                work = [
                    (H, P, pat + bits, c, r)
                    for (_, _, pat, _, _), subs in zip(work, split)
                    for (H, P, bits, c, r) in subs
                ]
            layer_counts.append(len(work))
    finally:
        if pool is not None:
            pool.shutdown()

    regions = [
        LinearRegion(HPolyhedron(H), P, pat, c, r) for H, P, pat, c, r in work
    ]
    regions.sort(key=lambda reg: reg.pattern)
    return PwaFunction(net.input_dim, net.output_dim, domain, regions, layer_counts)


def region_of(pwa: PwaFunction, x, tol: float = GEO_TOL) -> int:
    """Index of the first region (canonical order) containing ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (pwa.input_dim,):
        raise DimensionMismatch(f"point shape {x.shape} vs input_dim {pwa.input_dim}")
    for k, reg in enumerate(pwa.regions):
        if contains(reg.polyhedron, x, tol):
            return k
    raise OutsideDomain(f"point {x.tolist()} lies in no region")


def eval_pwa(pwa: PwaFunction, x, tol: float = GEO_TOL) -> np.ndarray:
    """Value of the piecewise function at ``x``."""
    x = np.asarray(x, dtype=float)
    return pwa.regions[region_of(pwa, x, tol)].apply(x)


def eval_many(pwa: PwaFunction, X, tol: float = GEO_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Batched evaluation: (values, region indices) for an (n, d) array.

    Matches eval_pwa's first-containing-region rule: points are claimed by
    regions in canonical order.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != pwa.input_dim:
        raise DimensionMismatch(f"batch width {X.shape[1]} vs input_dim {pwa.input_dim}")
    n = X.shape[0]
    idx = np.full(n, -1, dtype=np.int64)
    Y = np.zeros((n, pwa.output_dim))
    remaining = np.arange(n)
    for k, reg in enumerate(pwa.regions):
        if remaining.size == 0:
            break
        pts = X[remaining]
        ok = (pts @ reg.polyhedron.normals.T + reg.polyhedron.offsets >= -tol).all(axis=1)
        hit = remaining[ok]
        if hit.size:
            idx[hit] = k
            Y[hit] = X[hit] @ reg.matrix[:-1, :-1].T + reg.matrix[:-1, -1]
            remaining = remaining[~ok]
    if remaining.size:
        raise OutsideDomain(f"{remaining.size} points lie in no region")
    return Y, idx


def pwa_to_dict(pwa: PwaFunction) -> dict:
    return {
        "input_dim": pwa.input_dim,
        "output_dim": pwa.output_dim,
        "domain": {"H": pwa.domain.H.tolist()},
        "regions": [
            {
                "H": reg.polyhedron.H.tolist(),
                "P": reg.matrix.tolist(),
                "pattern": reg.pattern,
            }
            for reg in pwa.regions
        ],
    }


def pwa_from_dict(data: dict) -> PwaFunction:
    if not isinstance(data, dict):
        raise SchemaError(f"PWA document must be an object, got {type(data).__name__}")
    for key in ("input_dim", "output_dim", "domain", "regions"):
        if key not in data:
            raise SchemaError(f"missing required key {key!r}")
    input_dim = data["input_dim"]
    output_dim = data["output_dim"]
    for name, v in (("input_dim", input_dim), ("output_dim", output_dim)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise SchemaError(f"{name} must be a positive integer, got {v!r}")
    if not isinstance(data["domain"], dict) or "H" not in data["domain"]:
        raise SchemaError("domain must be an object with an 'H' matrix")
    try:
        domain = HPolyhedron(np.array(data["domain"]["H"], dtype=float))
    except (ValueError, DimensionMismatch) as exc:
        raise SchemaError(f"malformed domain: {exc}") from exc
    if domain.dim != input_dim:
        raise SchemaError(f"domain dimension {domain.dim} does not match input_dim {input_dim}")
    regions = []
    for k, spec in enumerate(data["regions"]):
        if not isinstance(spec, dict) or not {"H", "P", "pattern"} <= spec.keys():
            raise SchemaError(f"region {k}: needs 'H', 'P' and 'pattern'")
        try:
            poly = HPolyhedron(np.array(spec["H"], dtype=float))
            P = np.array(spec["P"], dtype=float)
        except (ValueError, DimensionMismatch) as exc:
            raise SchemaError(f"region {k}: malformed matrix ({exc})") from exc
        if poly.dim != input_dim:
            raise SchemaError(f"region {k}: polyhedron dimension {poly.dim} != {input_dim}")
        if P.shape != (output_dim + 1, input_dim + 1):
            raise SchemaError(
                f"region {k}: P shape {P.shape} != {(output_dim + 1, input_dim + 1)}"
            )
        pattern = spec["pattern"]
        if not isinstance(pattern, str) or set(pattern) - {"+", "-"}:
            raise SchemaError(f"region {k}: pattern must be a string over '+'/'-'")
        regions.append(LinearRegion(poly, P, pattern))
    return PwaFunction(input_dim, output_dim, domain, regions)


def save_pwa(pwa: PwaFunction, path) -> None:
    with open(path, "w") as fh:
        json.dump(pwa_to_dict(pwa), fh, separators=(",", ":"))
        fh.write("\n")


def load_pwa(path) -> PwaFunction:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return pwa_from_dict(data)
