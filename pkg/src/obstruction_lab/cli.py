"""Batch command-line harness.

Every invocation is a pure function of (argv, seed): result.json and the
CSV tables it references are byte-identical across reruns and thread
counts. Wall-clock time goes to stderr only, never into artifacts.

Exit codes: 0 success, 1 I/O or file-format problems, 2 domain errors,
64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import constructions as cons
from . import forest, trees, visibility
from .errors import (BadParam, DomainError, ObstructionLabError, ParseError,
                     VersionError)
from .scene import Scene, canonical_json, load_scene, save_scene
from .svgplot import export_svg
from .window import PointWindow

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(USAGE_EXIT)


@dataclass
class ExperimentResult:
    command: list
    seed: int
    constants: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    wall_clock: float = 0.0                     # stderr only, never serialized

    def envelope(self) -> dict:
        return {
            "command": list(self.command),
            "seed": self.seed,
            "constants": self.constants,
            "summary": self.summary,
            "tables": {
                name: {"file": name + ".csv", "rows": len(rows)}
                for name, (_, rows) in self.tables.items()
            },
        }


def _write_result(result: ExperimentResult, outdir: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "result.json"), "w", encoding="utf-8") as fh:
        fh.write(canonical_json(result.envelope()))
    for name, (header, rows) in result.tables.items():
        with open(os.path.join(outdir, name + ".csv"), "w", encoding="utf-8",
                  newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("OBSTRUCTION_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise BadParam("OBSTRUCTION_LAB_THREADS must be an integer")
    return 1


def _fnum(v: float) -> str:
    return "%.17g" % v


# ----------------------------------------------------------------------
# subcommands

def _cmd_gen(args) -> ExperimentResult:
    kind = args.kind
    if kind == "spiral":
        window = cons.spiral_window(cons.SpiralParams(args.kmin, args.kmax))
        annotations = {}
    elif kind == "lattice":
        window = cons.generate_window("lattice", args.W, args.seed)
        annotations = {}
    elif kind == "perturbed":
        window = cons.generate_window("perturbed_lattice", args.W, args.seed,
                                      amplitude=args.amplitude)
        annotations = {}
    elif kind == "poisson":
        window = cons.generate_window("poisson", args.W, args.seed,
                                      intensity=args.intensity)
        annotations = {}
    elif kind == "puncture":
        res = cons.puncture_construct(
            cons.PunctureParams(args.eps, args.M, args.K, args.W))
        window = res.Y_window
        annotations = {
            "puncture_m": ",".join(str(m) for m in res.m),
            "puncture_z": ";".join("%d,%d" % z for z in res.z),
            "puncture_bounds": ",".join(_fnum(b) for b in res.bounds),
        }
        removed_scene = Scene(res.removed_window, dict(annotations))
        stem, ext = os.path.splitext(args.out)
        save_scene(removed_scene, stem + ".removed" + (ext or ".json"))
    else:  # pragma: no cover - argparse restricts choices
        raise BadParam("unknown generator %r" % kind)
    save_scene(Scene(window, annotations), args.out)
    result = ExperimentResult(command=args.echo, seed=args.seed,
                              summary={"points": len(window), "out": args.out})
    sys.stderr.write("wrote %s (%d points)\n" % (args.out, len(window)))
    return result


def _load_window(path) -> PointWindow:
    return load_scene(path).window


def _cmd_vis(args) -> ExperimentResult:
    window = _load_window(args.scene)
    horizon = math.inf if args.T is None else args.T
    report = visibility.visibility_arcs((args.x, args.y), window, args.eps, horizon)
    result = ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"eps": args.eps, "horizon": "inf" if math.isinf(horizon) else horizon,
                   "window_radius": window.window_radius},
        summary={
            "query_x": args.x, "query_y": args.y,
            "free_measure": report.free.measure,
            "blocked_measure": report.blocked.measure,
            "contributing_obstacles": report.contributing_obstacles,
            "hidden_at_horizon": report.hidden,
            "blocked_render": report.blocked.render(),
        },
        tables={"arcs": (("start", "end", "kind"),
                         [(_fnum(s), _fnum(e), kind) for s, e, kind in report.arc_rows()])},
    )
    return result


def _cmd_hidden(args) -> ExperimentResult:
    window = _load_window(args.scene)
    mode = "boundary_circles" if args.boundary_circles else "grid"
    witnesses = visibility.hidden_search(
        window, args.eps, args.T, candidates=mode, spacing=args.grid,
        samples_per_circle=args.samples, max_results=args.max_witnesses,
        threads=_threads(args))
    result = ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"eps": args.eps, "T": args.T, "mode": mode,
                   "window_radius": window.window_radius},
        summary={"witnesses": len(witnesses)},
        tables={"witnesses": (("x", "y"),
                              [(_fnum(x), _fnum(y)) for x, y in witnesses])},
    )
    return result


def _cmd_constants(args) -> ExperimentResult:
    fc = forest.forest_constants(args.eps, args.R)
    constants = {
        "eps": fc.eps, "R": fc.R, "N": fc.N, "delta": fc.tangent_delta,
        "C": fc.C, "mu": fc.mu, "j": fc.j, "log2_T_min": fc.log2_T_min,
    }
    if args.dj_k is not None:
        dj = forest.dj_constants(args.dj_k, args.dj_c, args.dj_eta)
        constants["dj"] = {"r": dj.r, "j": dj.j, "Z0": dj.Z0}
    return ExperimentResult(command=args.echo, seed=args.seed, constants=constants,
                            summary=dict(constants))


def _cmd_census(args) -> ExperimentResult:
    window = _load_window(args.scene)
    fc = forest.forest_constants(args.eps, args.R)
    res = forest.frontal_census(window, fc, args.T,
                                samples_per_circle=args.samples,
                                threads=_threads(args),
                                max_circles=args.max_circles)
    rows = [(_fnum(r.z[0]), _fnum(r.z[1]), r.frontal, r.tangential, r.hidden)
            for r in res.rows]
    return ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"eps": fc.eps, "R": fc.R, "N": fc.N, "delta": fc.tangent_delta,
                   "C": fc.C, "mu": fc.mu, "j": fc.j, "log2_T_min": fc.log2_T_min,
                   "T": args.T, "mgon_count": fc.mgon_count(args.T),
                   "window_radius": window.window_radius},
        summary={"total": res.total, "frontal": res.frontal,
                 "tangential_only": res.tangential_only,
                 "hidden_witnesses": len(res.hidden_witnesses)},
        tables={
            "census": (("z_x", "z_y", "frontal", "tangential", "hidden"), rows),
            "hidden_witnesses": (("x", "y"),
                                 [(_fnum(x), _fnum(y)) for x, y in res.hidden_witnesses]),
        },
    )


def _load_tree(path) -> trees.PlaneTree:
    import json
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except Exception as exc:
            raise ParseError("invalid tree file: %s" % exc)
    try:
        return trees.PlaneTree(d["vertices"], d["edges"])
    except KeyError as exc:
        raise ParseError("tree file is missing field %s" % exc)


def _cmd_realize(args) -> ExperimentResult:
    window = _load_window(args.scene)
    tree = _load_tree(args.tree)
    real = trees.realize_tree(tree, args.root, (args.y0x, args.y0y), window, args.eps)
    edge_rows = []
    for parent, child, k in real.scalings:
        px, py = real.assignment[parent]
        cx, cy = real.assignment[child]
        ex, ey = real.tree_vec(tree, parent, child)
        res = math.hypot((px - cx) - k * ex, (py - cy) - k * ey)
        edge_rows.append((_fnum(px), _fnum(py), _fnum(cx), _fnum(cy), parent, child,
                          k, _fnum(res)))
    vert_rows = [(i, _fnum(x), _fnum(y)) for i, (x, y) in enumerate(real.assignment)]
    return ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"eps": args.eps, "root": args.root,
                   "window_radius": window.window_radius},
        summary={"vertices": len(real.assignment),
                 "max_scale": max((k for _, _, k in real.scalings), default=0)},
        tables={
            "tree_edges": (("x_parent", "y_parent", "x_child", "y_child",
                            "parent", "child", "k", "residual"), edge_rows),
            "tree_vertices": (("index", "x", "y"), vert_rows),
        },
    )


def _cmd_verify(args) -> ExperimentResult:
    window = _load_window(args.scene)
    radii = [float(r) for r in args.growth.split(",")] if args.growth else []
    report = cons.verify_window(window, growth_radii=radii,
                                check_separation=True if args.separation else None,
                                check_density=True if args.density else None)
    return ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"window_radius": window.window_radius},
        summary={
            "points": len(window),
            "separation_ok": report.separation_ok,
            "density_ok": report.density_ok,
        },
        tables={"growth": (("r", "count"),
                           [(_fnum(r), c) for r, c in report.growth_samples])},
    )


def _cmd_sum(args) -> ExperimentResult:
    window = _load_window(args.scene)
    sb = visibility.inverse_norm_sum_and_bound(window, (args.x, args.y), args.eps)
    return ExperimentResult(
        command=args.echo, seed=args.seed,
        constants={"eps": args.eps, "window_radius": window.window_radius},
        summary={"partial_sum": sb.partial_sum,
                 "blocked_measure": sb.blocked_measure,
                 "bound": sb.bound},
    )


# ----------------------------------------------------------------------
# parser

def _build_parser() -> _Parser:
    p = _Parser(prog="obstruction-lab",
                description="Visibility experiments on discrete obstacle sets.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, out_default="out"):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: OBSTRUCTION_LAB_THREADS or 1)")
        sp.add_argument("--out", default=out_default)
        sp.add_argument("--svg", action="store_true",
                        help="also render the matching SVG plot")

    g = sub.add_parser("gen", help="generate a scene file")
    g.add_argument("kind", choices=["spiral", "lattice", "perturbed", "poisson",
                                    "puncture"])
    g.add_argument("--kmin", type=int, default=3)
    g.add_argument("--kmax", type=int, default=1000)
    g.add_argument("--W", type=float, default=50.0)
    g.add_argument("--amplitude", type=float, default=0.1)
    g.add_argument("--intensity", type=float, default=1.0)
    g.add_argument("--eps", type=float, default=0.5)
    g.add_argument("--M", type=float, default=10.0)
    g.add_argument("--K", type=int, default=5)
    common(g, out_default="scene.json")

    v = sub.add_parser("vis", help="free/blocked arcs at a point")
    v.add_argument("--scene", required=True)
    v.add_argument("--x", type=float, required=True)
    v.add_argument("--y", type=float, required=True)
    v.add_argument("--eps", type=float, required=True)
    v.add_argument("--T", type=float, default=None, help="finite horizon (default: infinite)")
    common(v)

    h = sub.add_parser("hidden", help="search for certified hidden points")
    h.add_argument("--scene", required=True)
    h.add_argument("--eps", type=float, required=True)
    h.add_argument("--T", type=float, required=True)
    h.add_argument("--grid", type=float, default=None, help="grid spacing")
    h.add_argument("--boundary-circles", action="store_true")
    h.add_argument("--samples", type=int, default=256)
    h.add_argument("--max-witnesses", type=int, default=None)
    common(h)

    c = sub.add_parser("constants", help="constant cascade (and optionally the "
                                         "subdivision constants)")
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--R", type=float, required=True)
    c.add_argument("--dj-k", type=int, default=None)
    c.add_argument("--dj-c", type=float, default=0.5)
    c.add_argument("--dj-eta", type=float, default=1.0)
    common(c)

    ce = sub.add_parser("census", help="frontal/tangential/hidden census of "
                                       "boundary circles")
    ce.add_argument("--scene", required=True)
    ce.add_argument("--eps", type=float, required=True)
    ce.add_argument("--R", type=float, required=True)
    ce.add_argument("--T", type=float, required=True)
    ce.add_argument("--samples", type=int, default=256)
    ce.add_argument("--max-circles", type=int, default=None)
    common(ce)

    r = sub.add_parser("realize", help="realize a tree from an anchor")
    r.add_argument("--scene", required=True)
    r.add_argument("--tree", required=True, help="JSON file with vertices and edges")
    r.add_argument("--root", type=int, default=0)
    r.add_argument("--y0x", type=float, required=True)
    r.add_argument("--y0y", type=float, required=True)
    r.add_argument("--eps", type=float, required=True)
    common(r)

    ve = sub.add_parser("verify", help="check a scene against its metadata")
    ve.add_argument("scene")
    ve.add_argument("--growth", default="", help="comma-separated radii")
    ve.add_argument("--separation", action="store_true")
    ve.add_argument("--density", action="store_true")
    common(ve)

    s = sub.add_parser("sum", help="inverse-distance sum and measure bound")
    s.add_argument("--scene", required=True)
    s.add_argument("--x", type=float, default=0.0)
    s.add_argument("--y", type=float, default=0.0)
    s.add_argument("--eps", type=float, required=True)
    common(s)
    return p


_HANDLERS = {
    "gen": (_cmd_gen, None),
    "vis": (_cmd_vis, "arcs"),
    "hidden": (_cmd_hidden, None),
    "constants": (_cmd_constants, None),
    "census": (_cmd_census, None),
    "realize": (_cmd_realize, "tree"),
    "verify": (_cmd_verify, None),
    "sum": (_cmd_sum, None),
}


def run_command(argv) -> ExperimentResult:
    """Parse and run one invocation; writes artifacts, returns the result."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    args.echo = list(argv)
    t0 = time.perf_counter()
    handler, svg_kind = _HANDLERS[args.cmd]
    result = handler(args)
    result.wall_clock = time.perf_counter() - t0
    if args.cmd != "gen":
        _write_result(result, args.out)
        if args.svg:
            if svg_kind is None and "points" in result.tables:
                svg_kind = "points"
            if svg_kind is not None:
                export_svg(result, svg_kind, os.path.join(args.out, svg_kind + ".svg"))
    sys.stderr.write("%s: done in %.3f s\n" % (args.cmd, result.wall_clock))
    return result


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        run_command(argv)
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except DomainError as exc:
        sys.stderr.write("domain error: %s\n" % exc)
        return 2
    except (ParseError, VersionError) as exc:
        sys.stderr.write("file error: %s\n" % exc)
        return 1
    except OSError as exc:
        sys.stderr.write("i/o error: %s\n" % exc)
        return 1
    except ObstructionLabError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
