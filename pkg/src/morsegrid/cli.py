"""Command-line interface.

Subcommands: ``sample``, ``grid``, ``msc``, ``diff``, ``stats``,
``experiment`` and ``render``.  Every output file carries a manifest with the
full argument list, so it can be regenerated from its own header.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .analysis import diff, run_experiment, run_experiment_interpolated, ExperimentResult
from .complex import build_cubical, build_simplicial
from .fields import ANALYTIC, Rng, ScalarGrid, bilinear, builtin, sample
from .gradient import STEEPEST, compute_gradient, probabilistic
from .grids import (diagonal_triangulate, edge_direction_histogram, poisson_delaunay,
                    subdivide_suggested, vertex_degree_histogram)
from .morse import extract, simplify
from .render import render_field, render_ms


class CliError(Exception):
    pass


def parse_persistence(text: str, value_range: float) -> float:
    """``"45%"`` is a fraction of the data range; anything else is absolute."""
    t = text.strip()
    try:
        if t.endswith("%"):
            v = float(t[:-1]) / 100.0 * value_range
        else:
            v = float(t)
    except ValueError:
        raise CliError(f"bad persistence value {text!r}") from None
    if v < 0:
        raise CliError("persistence must be non-negative")
    return v


def _manifest(args, inputs=(), outputs=(), **extra):
    m = {"command": args.command, "argv": list(args.argv), "inputs": list(inputs),
         "outputs": list(outputs), "seed": getattr(args, "seed", None),
         "policy": getattr(args, "policy", None),
         "thresholds": {"persistence": getattr(args, "persistence", None)}}
    m.update(extra)
    return m


def _load_field(path):
    """A grid or mesh from a file, or a builtin fixture by name."""
    if not Path(path).exists():
        try:
            return "grid", builtin(path)
        except KeyError:
            raise CliError(f"no such file or builtin field: {path}") from None
    kind, obj = io.load(path)
    if kind not in ("grid", "mesh"):
        raise CliError(f"{path} holds a {kind}, expected a grid or mesh")
    return kind, obj


def _complex_of(kind, obj):
    return build_cubical(obj) if kind == "grid" else build_simplicial(obj)


# -- commands ----------------------------------------------------------------------


def cmd_sample(args):
    if args.function in ("matrixA", "tensorB"):
        grid = builtin(args.function)
    else:
        fn, dom = ANALYTIC[args.function]
        dom = args.domain if args.domain else dom
        grid = sample(fn, args.dims, dom)
    io.write_grid(args.out, grid, _manifest(args, outputs=[args.out]))
    print(f"wrote {args.out}: dims {list(grid.dims)}")


def cmd_grid(args):
    rng = Rng(args.seed)
    if args.kind == "poisson":
        if args.function:
            fn, dom = ANALYTIC[args.function]
            dom = args.domain if args.domain else dom
            count = args.count
        else:
            if not args.input:
                raise CliError("poisson needs --function or an input grid")
            _, grid = _load_field(args.input)
            if not isinstance(grid, ScalarGrid):
                raise CliError("poisson input must be a grid")
            dom = (grid.origin[0], grid.upper()[0], grid.origin[1], grid.upper()[1])
            count = args.count or int(np.prod(grid.dims))
            fn = np.vectorize(lambda x, y: bilinear(grid, x, y))
        if not count:
            raise CliError("poisson needs --count")
        mesh = poisson_delaunay(dom, count, args.min_dist, rng, fn)
    else:
        if not args.input:
            raise CliError(f"{args.kind} needs an input grid")
        kind, grid = _load_field(args.input)
        if kind != "grid":
            raise CliError("input must be a scalar grid")
        if args.kind == "uniform":
            io.write_grid(args.out, grid, _manifest(args, [args.input], [args.out]))
            print(f"wrote {args.out}: uniform grid {list(grid.dims)}")
            return
        mesh = diagonal_triangulate(grid) if args.kind == "diag" else subdivide_suggested(grid, rng)
    io.write_mesh(args.out, mesh, _manifest(args, [args.input] if args.input else [], [args.out]))
    print(f"wrote {args.out}: {mesh.n_vertices} vertices, {len(mesh.triangles)} triangles")


def cmd_msc(args):
    kind, obj = _load_field(args.input)
    k = _complex_of(kind, obj)
    policy = STEEPEST if args.policy == "steepest" else probabilistic(args.seed)
    g = compute_gradient(k, policy)
    ms = extract(k, g)
    thr = None
    if args.persistence is not None:
        rng_ = float(np.ptp(k.vertex_values))
        thr = parse_persistence(args.persistence, rng_)
        ms, g = simplify(ms, g, thr)
    io.write_ms(args.out, ms, _manifest(args, [args.input], [args.out], threshold_abs=thr))
    print(f"wrote {args.out}: critical counts {ms.critical_counts()}, "
          f"{len(ms.separatrices)} separatrices")


def cmd_diff(args):
    a = io.read_ms(args.a)
    b = io.read_ms(args.b)
    try:
        rep = diff(a, b)
    except ValueError as e:
        raise CliError(str(e)) from None
    t = rep.totals
    if args.out:
        Path(args.out).write_text(io.format_diff(rep, _manifest(args, [args.a, args.b], [args.out])))
    print(f"moved saddles: {t['moved_saddles']}")
    print(f"changed separatrices: {t['changed_separatrices']} "
          f"(a: {t['changed_in_a']}, b: {t['changed_in_b']})")


def cmd_stats(args):
    kind, obj = _load_field(args.input)
    src = build_cubical(obj) if kind == "grid" else obj
    h = edge_direction_histogram(src, args.bin_width)
    d = vertex_degree_histogram(src, interior_only=args.interior)
    lines = [io._manifest_line(_manifest(args, [args.input], [args.out])),
             "histogram,bin_start,bin_end,count\n"]
    for lo, hi, c in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts):
        lines.append(f"direction,{lo:g},{hi:g},{int(c)}\n")
    for lo, hi, c in zip(d.bin_edges[:-1], d.bin_edges[1:], d.counts):
        lines.append(f"degree,{lo:g},{hi:g},{int(c)}\n")
    Path(args.out).write_text("".join(lines))
    print(f"wrote {args.out}: {h.nonzero_bins()} nonzero direction bins")


def cmd_experiment(args):
    if args.interpolate:
        r = run_experiment_interpolated(args.base, args.interpolate, args.trials, args.seed)
    else:
        r = run_experiment(args.size, args.trials, args.seed)
    text = (io._manifest_line(_manifest(args, outputs=[args.out] if args.out else []))
            + ExperimentResult.CSV_HEADER + "\n" + r.csv_row() + "\n")
    if args.out:
        Path(args.out).write_text(text)
    print(f"{'x'.join(map(str, r.size))}: positional {r.n_positional}/{r.n_trials}, "
          f"connectivity {r.n_connectivity}/{r.n_trials}")


def cmd_render(args):
    kind, obj = io.load(args.input) if Path(args.input).exists() else ("grid", None)
    if obj is None:
        raise CliError(f"no such file: {args.input}")
    field = None
    if args.field:
        _, field = _load_field(args.field)
    if kind == "msc":
        svg = render_ms(obj, field, args.size)
    elif kind in ("grid", "mesh"):
        svg = render_field(obj, args.size)
    else:
        raise CliError("cannot render a diff report")
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morsegrid", description="Discrete Morse-Smale complexes on grids.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample an analytic function or builtin fixture")
    s.add_argument("function", choices=sorted(ANALYTIC) + ["matrixA", "tensorB"])
    s.add_argument("--dims", type=int, nargs=2, default=(64, 64))
    s.add_argument("--domain", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("grid", help="convert a grid into another grid type")
    s.add_argument("kind", choices=["uniform", "diag", "poisson", "suggested"])
    s.add_argument("input", nargs="?")
    s.add_argument("--function", choices=sorted(ANALYTIC))
    s.add_argument("--domain", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
    s.add_argument("--count", type=int, help="total vertex count (poisson)")
    s.add_argument("--min-dist", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("msc", help="compute a Morse-Smale complex")
    s.add_argument("input", help="grid or mesh file, or builtin name")
    s.add_argument("--policy", choices=["steepest", "probabilistic"], default="steepest")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--persistence", default=None, help="threshold: NN%% of data range or absolute")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_msc)

    s = sub.add_parser("diff", help="compare two Morse-Smale complexes")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--out")
    s.set_defaults(func=cmd_diff)

    s = sub.add_parser("stats", help="edge direction and vertex degree histograms")
    s.add_argument("input")
    s.add_argument("--bin-width", type=float, default=5.0)
    s.add_argument("--interior", action="store_true", help="degrees of interior vertices only")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("experiment", help="steepest vs probabilistic on random fields")
    s.add_argument("--size", type=int, default=4)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--interpolate", type=int, default=0, metavar="FACTOR",
                   help="resample random --base fields by FACTOR")
    s.add_argument("--base", type=int, default=4)
    s.add_argument("--out")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("render", help="draw a complex, mesh or grid as SVG")
    s.add_argument("input")
    s.add_argument("--field", help="grid or mesh drawn underneath a complex")
    s.add_argument("--size", type=int, default=600)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    try:
        args.func(args)
    except (CliError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
