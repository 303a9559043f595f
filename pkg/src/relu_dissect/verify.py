"""Independent checks of a converted PWA function against its network.

Every check returns a plain JSON-serializable report dict with the same
spine: ``op``, ``pass``, ``metric``, ``seed``, ``tol``, plus op-specific
fields.  Checks are read-only and deterministic given the seed.
"""

from __future__ import annotations

import numpy as np

from .arrangement import zaslavsky_bound
from .errors import DomainMismatch
from .geometry import GEO_TOL, HPolyhedron, bounding_box, contains
from .lp import LP_TOL, LpProblem, LpStatus, solve_lp
from .network import DenseLayer, Network
from .pwa import PwaFunction, eval_many

#: Facet values of adjacent maps must agree this tightly (continuity budget,
#: looser than the pointwise evaluation budget because facet points are
#: themselves located through LPs).
CONTINUITY_TOL = 1e-8
EQUIVALENCE_TOL = 1e-9


def sample_domain(domain: HPolyhedron, n: int, rng) -> np.ndarray:
    """Uniform points in ``domain`` by rejection from its bounding box."""
    lo, hi = bounding_box(domain)
    out = np.empty((n, domain.dim))
    have = 0
    while have < n:
        cand = rng.uniform(lo, hi, size=(max(n - have, 64), domain.dim))
        ok = (cand @ domain.normals.T + domain.offsets >= 0.0).all(axis=1)
        took = cand[ok][: n - have]
        out[have : have + took.shape[0]] = took
        have += took.shape[0]
    return out


def batch_patterns(net: Network, X: np.ndarray) -> list[str]:
    """Activation pattern of every row of ``X`` (ties count active)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    V = X
    chunks = []
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            V = V @ layer.weights.T + layer.bias
        else:
            chunks.append(np.where(V >= 0.0, "+", "-"))
            V = np.maximum(V, 0.0)
    if not chunks:
        return [""] * X.shape[0]
    allbits = np.concatenate(chunks, axis=1)
    return ["".join(row) for row in allbits]


def check_equivalence(
    net: Network,
    pwa: PwaFunction,
    samples: int = 10_000,
    seed: int = 0,
    tol: float = EQUIVALENCE_TOL,
) -> dict:
    """Max |forward(x) - pwa(x)| over uniform domain samples."""
    if net.input_dim != pwa.input_dim or net.output_dim != pwa.output_dim:
        raise DomainMismatch(
            f"network is {net.input_dim}->{net.output_dim}, "
            f"pwa is {pwa.input_dim}->{pwa.output_dim}"
        )
    if samples < 1:
        raise DomainMismatch("samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = sample_domain(pwa.domain, samples, rng)
    Y_pwa, _ = eval_many(pwa, X)
    diff = np.abs(Y_pwa - net.forward_many(X)).max(axis=1)
    worst = int(np.argmax(diff))
    max_diff = float(diff[worst])
    return {
        "op": "equivalence",
        "pass": bool(max_diff < tol),
        "metric": max_diff,
        "max_abs_diff": max_diff,
        "argmax_point": X[worst].tolist(),
        "samples": samples,
        "seed": seed,
        "tol": tol,
    }


def check_partition(
    pwa: PwaFunction,
    samples: int = 10_000,
    seed: int = 0,
    tol: float = GEO_TOL,
) -> dict:
    """Coverage census: every sample must fall in some region, and samples
    at least ``tol`` inside a region must belong to that region alone."""
    rng = np.random.default_rng(seed)
    X = sample_domain(pwa.domain, samples, rng)
    slack_count = np.zeros(X.shape[0], dtype=np.int64)
    strict_count = np.zeros(X.shape[0], dtype=np.int64)
    for reg in pwa.regions:
        vals = X @ reg.polyhedron.normals.T + reg.polyhedron.offsets
        norms = reg.polyhedron.row_norms()
        slack_count += (vals >= -tol * norms).all(axis=1)
        strict_count += (vals >= tol * norms).all(axis=1)
    uncovered = int((slack_count == 0).sum())
    multiply = int((strict_count >= 2).sum())
    return {
        "op": "partition",
        "pass": bool(uncovered == 0 and multiply == 0),
        "metric": uncovered + multiply,
        "uncovered": uncovered,
        "multiply_covered_interior": multiply,
        "samples": samples,
        "seed": seed,
        "tol": tol,
    }


def _row_key(row: np.ndarray) -> tuple[tuple, int]:
    scaled = row / np.linalg.norm(row[:-1])
    lead = int(np.argmax(np.abs(scaled[:-1])))
    orient = 1 if scaled[lead] > 0 else -1
    return tuple(np.round(orient * scaled, 9).tolist()), orient


def _facet_interior(
    a: HPolyhedron, b: HPolyhedron, w: np.ndarray, off: float, lp_tol: float = LP_TOL
) -> tuple[np.ndarray, float] | None:
    """Point deep inside the shared facet {w.x + off = 0} of regions a, b.

    Maximizes the margin r over all non-pinned rows of both regions while
    pinning the facet hyperplane to equality.  Returns (point, r), or None
    when the LP finds no full-dimensional facet (r below tolerance).
    """
    d = a.dim
    rows = np.vstack([a.H, b.H])
    norms = np.linalg.norm(rows[:, :-1], axis=1)
    # drop the pinned hyperplane itself (either orientation) from the margin rows
    unit = np.concatenate([w, [off]]) / np.linalg.norm(w)
    scaled = rows / norms[:, None]
    pinned = (
        (np.abs(scaled - unit).max(axis=1) < 1e-12)
        | (np.abs(scaled + unit).max(axis=1) < 1e-12)
    )
    free_rows = rows[~pinned]
    free_norms = norms[~pinned]
    # variables (x, r): maximize r
    A = np.vstack(
        [
            np.hstack([-free_rows[:, :-1], free_norms[:, None]]),
            np.concatenate([w, [0.0]])[None, :],
            np.concatenate([-w, [0.0]])[None, :],
        ]
    )
    rhs = np.concatenate([free_rows[:, -1], [-off, off]])
    c = np.zeros(d + 1)
    c[-1] = 1.0
    out = solve_lp(LpProblem(c, A, rhs), tol=lp_tol)
    if out.status is not LpStatus.OPTIMAL or out.objective_value < GEO_TOL:
        return None
    return out.point[:d], float(out.objective_value)


def check_continuity(
    pwa: PwaFunction,
    pairs: int = 100,
    tol: float = CONTINUITY_TOL,
    seed: int = 0,
    points_per_facet: int = 10,
) -> dict:
    """Adjacent regions must agree on their shared facets.

    Candidate pairs come from matching region rows that describe the same
    hyperplane with opposite orientation; each candidate is confirmed by an
    LP locating an interior point of the shared facet.  Detection is
    best-effort: an undetected adjacency reduces coverage, never soundness.
    """
    buckets: dict[tuple, list[tuple[int, int, int]]] = {}
    for k, reg in enumerate(pwa.regions):
        for ridx in range(reg.polyhedron.nrows):
            key, orient = _row_key(reg.polyhedron.H[ridx])
            buckets.setdefault(key, []).append((k, ridx, orient))
    candidates = []
    for entries in buckets.values():
        plus = [(k, r) for k, r, o in entries if o > 0]
        minus = [(k, r) for k, r, o in entries if o < 0]
        for (ka, ra) in plus:
            for (kb, _) in minus:
                if ka != kb:
                    candidates.append((ka, kb, ra))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(candidates))
    max_gap = 0.0
    facets_checked = 0
    worst_pair = None
    for idx in order:
        if facets_checked >= pairs:
            break
        ka, kb, ra = candidates[idx]
        a, b = pwa.regions[ka], pwa.regions[kb]
        row = a.polyhedron.H[ra]
        found = _facet_interior(a.polyhedron, b.polyhedron, row[:-1], float(row[-1]))
        if found is None:
            continue
        center, r_f = found
        d = pwa.input_dim
        w = row[:-1]
        pts = [center]
        if d > 1:
            for _ in range(points_per_facet - 1):
                delta = rng.standard_normal(d)
                delta -= (delta @ w) / (w @ w) * w
                nrm = np.linalg.norm(delta)
                if nrm < 1e-12:
                    continue
                pts.append(center + 0.9 * r_f * rng.uniform(0.2, 1.0) * delta / nrm)
        for p in pts:
            gap = float(np.abs(a.apply(p) - b.apply(p)).max())
            if gap > max_gap:
                max_gap = gap
                worst_pair = [ka, kb]
        facets_checked += 1
    return {
        "op": "continuity",
        "pass": bool(max_gap < tol),
        "metric": max_gap,
        "max_facet_gap": max_gap,
        "worst_pair": worst_pair,
        "facets_checked": facets_checked,
        "points_per_facet": points_per_facet,
        "seed": seed,
        "tol": tol,
    }


def count_report(net: Network, pwa: PwaFunction) -> dict:
    """Region counts per ReLU node versus the arrangement cell bounds."""
    widths = net.relu_widths
    total = sum(widths)
    patterns = pwa.patterns
    for p in patterns:
        if len(p) != total:
            raise DomainMismatch(
                f"pattern length {len(p)} does not match {total} ReLU neurons"
            )
    cuts = np.cumsum(widths) if widths else np.array([], dtype=int)
    per_layer = [len({p[:c] for p in patterns}) for c in cuts]
    d = net.input_dim
    bounds = [zaslavsky_bound(n, d) for n in widths]
    cumulative = []
    acc = 1
    for b in bounds:
        acc *= b
        cumulative.append(acc)
    ok = True
    prev = 1
    for cnt, bound in zip(per_layer, bounds):
        if cnt > prev * bound:
            ok = False
        prev = cnt
    region_count = len(pwa.regions)
    if per_layer and per_layer[-1] != region_count:
        ok = False  # duplicate or missing patterns
    return {
        "op": "count",
        "pass": bool(ok),
        "metric": region_count,
        "region_count": region_count,
        "per_layer_counts": per_layer,
        "zaslavsky_bounds": bounds,
        "zaslavsky_products": cumulative,
        "seed": None,
        "tol": None,
    }
