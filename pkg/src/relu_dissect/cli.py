"""Command-line surface.

Subcommands: convert, verify, count, export, plot-grid, simulate, bench.
Machine-readable output (JSON reports, CSV tables) goes to stdout or the
--out file; progress logs go to stderr.

Exit codes:
    0  success (verify: all checks passed)
    1  schema error in an input file
    2  conversion error (bad domain, dimension clash)
    3  plot-grid called on a non-2-D function
    4  simulated trajectory left the domain
    5  verification checks failed
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from .errors import OutsideDomain, ReluDissectError, SchemaError
from .geometry import GEO_TOL, HPolyhedron, bounding_box, remove_redundant
from .network import Network, load_network, random_network
from .pwa import (
    LinearRegion,
    PwaFunction,
    convert,
    eval_pwa,
    load_pwa,
    region_of,
    save_pwa,
)
from .verify import (
    EQUIVALENCE_TOL,
    check_continuity,
    check_equivalence,
    check_partition,
    count_report,
)

log = logging.getLogger("relu_dissect")

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_CONVERSION = 2
EXIT_NOT_PLANAR = 3
EXIT_LEFT_DOMAIN = 4
EXIT_VERIFY_FAILED = 5


def _resolve_workers(value: int | None) -> int:
    """--workers flag, RELU_DISSECT_WORKERS env, then logical core count."""
    if value is not None:
        return max(1, value)
    env = os.environ.get("RELU_DISSECT_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer RELU_DISSECT_WORKERS=%r", env)
    return os.cpu_count() or 1


def cmd_convert(args) -> int:
    try:
        net = load_network(args.network)
    except SchemaError as exc:
        log.error("schema error in %s: %s", args.network, exc)
        return EXIT_SCHEMA
    workers = _resolve_workers(args.workers)
    start = time.perf_counter()
    try:
        domain = HPolyhedron.box(net.input_dim, args.box)
        pwa = convert(net, domain, tol=args.tol, workers=workers)
    except ReluDissectError as exc:
        log.error("conversion failed: %s", exc)
        return EXIT_CONVERSION
    elapsed = time.perf_counter() - start
    save_pwa(pwa, args.out)
    log.info(
        "converted %s: %d regions in %.3f s with %d worker(s)",
        args.network,
        len(pwa),
        elapsed,
        workers,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        net = load_network(args.network)
        pwa = load_pwa(args.pwa)
    except SchemaError as exc:
        log.error("schema error: %s", exc)
        return EXIT_SCHEMA
    try:
        reports = [
            check_equivalence(net, pwa, samples=args.samples, seed=args.seed, tol=args.tol),
            check_partition(pwa, samples=args.samples, seed=args.seed),
            check_continuity(pwa, pairs=100, seed=args.seed),
            count_report(net, pwa),
        ]
    except ReluDissectError as exc:
        log.error("verification could not run: %s", exc)
        return EXIT_CONVERSION
    print(json.dumps(reports, indent=2))
    ok = all(r["pass"] for r in reports)
    for r in reports:
        log.info("%-12s %s (metric=%s)", r["op"], "pass" if r["pass"] else "FAIL", r["metric"])
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_count(args) -> int:
    try:
        net = load_network(args.network)
        pwa = load_pwa(args.pwa)
    except SchemaError as exc:
        log.error("schema error: %s", exc)
        return EXIT_SCHEMA
    try:
        rep = count_report(net, pwa)
    except ReluDissectError as exc:
        log.error("count failed: %s", exc)
        return EXIT_CONVERSION
    print(json.dumps(rep, indent=2))
    return EXIT_OK if rep["pass"] else EXIT_VERIFY_FAILED


def cmd_export(args) -> int:
    try:
        pwa = load_pwa(args.pwa)
    except SchemaError as exc:
        log.error("schema error: %s", exc)
        return EXIT_SCHEMA
    if args.remove_redundant:
        try:
            pwa = PwaFunction(
                pwa.input_dim,
                pwa.output_dim,
                pwa.domain,
                [
                    LinearRegion(
                        remove_redundant(reg.polyhedron, tol=args.tol), reg.matrix, reg.pattern
                    )
                    for reg in pwa.regions
                ],
            )
        except ReluDissectError as exc:
            log.error("redundancy removal failed: %s", exc)
            return EXIT_CONVERSION
        log.info("removed redundant rows from %d regions", len(pwa))
    save_pwa(pwa, args.out)
    log.info("wrote %s (%d regions)", args.out, len(pwa))
    return EXIT_OK


def cmd_plot_grid(args) -> int:
    try:
        pwa = load_pwa(args.pwa)
    except SchemaError as exc:
        log.error("schema error: %s", exc)
        return EXIT_SCHEMA
    if pwa.input_dim != 2:
        log.error("plot-grid needs a 2-D input space, got %d-D", pwa.input_dim)
        return EXIT_NOT_PLANAR
    if not 0 <= args.output_index < pwa.output_dim:
        log.error("output index %d outside 0..%d", args.output_index, pwa.output_dim - 1)
        return EXIT_CONVERSION
    lo, hi = bounding_box(pwa.domain)
    xs = np.linspace(lo[0], hi[0], args.resolution)
    ys = np.linspace(lo[1], hi[1], args.resolution)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", f"y{args.output_index}", "region"])
        for x2 in ys:
            for x1 in xs:
                p = np.array([x1, x2])
                try:
                    k = region_of(pwa, p)
                except OutsideDomain:
                    continue  # non-box domain corner
                y = pwa.regions[k].apply(p)[args.output_index]
                writer.writerow([f"{x1:.12g}", f"{x2:.12g}", f"{y:.12g}", k])
    log.info("wrote %s (%d x %d grid)", args.out, args.resolution, args.resolution)
    return EXIT_OK


def _parse_vector(text: str, dim: int) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != dim:
        raise ValueError(f"expected {dim} components, got {len(parts)}")
    return np.array([float(p) for p in parts])


def cmd_simulate(args) -> int:
    try:
        pwa = load_pwa(args.pwa)
    except SchemaError as exc:
        log.error("schema error: %s", exc)
        return EXIT_SCHEMA
    if pwa.output_dim != pwa.input_dim:
        log.error(
            "vector field needs output_dim == input_dim, got %d -> %d",
            pwa.input_dim,
            pwa.output_dim,
        )
        return EXIT_CONVERSION
    try:
        x = _parse_vector(args.x0, pwa.input_dim)
    except ValueError as exc:
        log.error("bad --x0: %s", exc)
        return EXIT_CONVERSION

    def field(p: np.ndarray) -> np.ndarray:
        return eval_pwa(pwa, p)

    dt = args.dt
    rows = []
    try:
        rows.append((0.0, x.copy(), region_of(pwa, x)))
        for step in range(1, args.steps + 1):
            k1 = field(x)
            k2 = field(x + 0.5 * dt * k1)
            k3 = field(x + 0.5 * dt * k2)
            k4 = field(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rows.append((step * dt, x.copy(), region_of(pwa, x)))
    except OutsideDomain:
        log.error("trajectory left the domain at t=%.6g", len(rows) * dt)
        _write_trajectory(args.out, rows, pwa.input_dim)
        return EXIT_LEFT_DOMAIN
    _write_trajectory(args.out, rows, pwa.input_dim)
    log.info("wrote %s (%d steps)", args.out, args.steps)
    return EXIT_OK


def _write_trajectory(path, rows, dim) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(dim)] + ["region"])
        for t, state, k in rows:
            writer.writerow([f"{t:.12g}"] + [f"{v:.12g}" for v in state] + [k])


def cmd_bench(args) -> int:
    dims = [int(v) for v in args.dims.split(",") if v]
    widths = [int(v) for v in args.widths.split(",") if v]
    depths = [int(v) for v in args.depths.split(",") if v]
    workers = _resolve_workers(args.workers)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["d", "widths", "region_count", "wall_time", "workers"])
    seed = args.seed
    try:
        for d in dims:
            for width in widths:
                for depth in depths:
                    for _ in range(args.trials):
                        hidden = [width] * depth
                        net = random_network(d, hidden, 1, seed=seed)
                        seed += 1
                        domain = HPolyhedron.box(d, args.box)
                        start = time.perf_counter()
                        pwa = convert(net, domain, workers=workers)
                        elapsed = time.perf_counter() - start
                        writer.writerow(
                            ["%d" % d, "x".join(map(str, hidden)) or "none",
                             len(pwa), f"{elapsed:.6f}", workers]
                        )
                        log.info(
                            "d=%d widths=%s: %d regions in %.3f s",
                            d, hidden, len(pwa), elapsed,
                        )
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relu-dissect",
        description="Exact piecewise-affine decomposition of fully connected ReLU networks.",
        epilog="Exit codes: 0 ok, 1 schema error, 2 conversion error, "
        "3 plot-grid on non-2-D input, 4 trajectory left domain, 5 verification failed.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="network JSON -> PWA JSON")
    p.add_argument("--network", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--box", type=float, default=10.0, help="domain half-width B (default 10)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--tol", type=float, default=GEO_TOL)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="run equivalence/partition/continuity/count checks")
    p.add_argument("--network", required=True)
    p.add_argument("--pwa", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=EQUIVALENCE_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="region counts per layer vs the cell bounds")
    p.add_argument("--network", required=True)
    p.add_argument("--pwa", required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("export", help="rewrite a PWA JSON, optionally pruning redundant rows")
    p.add_argument("--pwa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--remove-redundant", action="store_true")
    p.add_argument("--tol", type=float, default=GEO_TOL)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("plot-grid", help="sample a 2-D PWA on a grid, CSV output")
    p.add_argument("--pwa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--output-index", type=int, default=0)
    p.set_defaults(func=cmd_plot_grid)

    p = sub.add_parser("simulate", help="integrate dx/dt = pwa(x) with fixed-step RK4")
    p.add_argument("--pwa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--x0", required=True, help="initial state, comma separated")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="random-network conversion timings, CSV output")
    p.add_argument("--dims", default="2")
    p.add_argument("--widths", default="3,5")
    p.add_argument("--depths", default="1")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
