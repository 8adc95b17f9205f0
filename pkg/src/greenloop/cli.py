"""Command-line entry point: ``greenloop validate|solve|compare|gen|verify|plot``.

Exit codes: 0 success, 2 input error, 3 infeasible, 4 resource limit,
5 verification failure. Relative ``--out`` paths are resolved against
``$GREENLOOP_OUTPUT_DIR`` when it is set.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import threading
import time
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .eps_constraint import EpsConfig, sweep_with
from .errors import (ComparisonError, EnumerationBoundError, FrontFormatError, GenerationError,
                     InstanceValidationError, InvalidParameterError, ModelInfeasibleError,
                     SolverLimitError)
from .instance_io import (BUNDLED, GeneratorSpec, generate, instance_hash, load_bundled,
                          load_front, read_instance, save_front, save_instance)
from .lp_mip import OPTIMAL, SolverConfig, build_milp, solution_from_x, solve_lp, solve_milp
from .model import FLOW_BLOCKS, INDICATOR_BLOCKS, DIMENSION_NAMES, NetworkInstance
from .moga import GaConfig, evolve
from .oracle import cross_check
from .pareto import ParetoFront, compare

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_VERIFY = 0, 2, 3, 4, 5
OUTPUT_DIR_ENV = "GREENLOOP_OUTPUT_DIR"
BUNDLED_PREFIX = "bundled:"


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _out_path(raw: str) -> Path:
    path = Path(raw)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load(source: str) -> NetworkInstance:
    """Read an instance file, or a bundled case given as ``bundled:base`` / ``bundled:tradeoff``."""
    try:
        if source.startswith(BUNDLED_PREFIX):
            name = source[len(BUNDLED_PREFIX):]
            if name not in BUNDLED:
                raise CliError(f"unknown bundled case {name!r}; choose from {sorted(BUNDLED)}")
            return load_bundled(name)
        return read_instance(source)
    except InstanceValidationError as exc:
        raise CliError(f"invalid instance: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read {source}: {exc.strerror or exc}") from None


def _threads(value: Optional[int]) -> int:
    return value if value else (os.cpu_count() or 1)


# --- validate --------------------------------------------------------------

def cmd_validate(args) -> int:
    inst = _load(args.instance)
    dims = inst.dims
    print("dimensions: " + " ".join(f"{k}={dims[k]}" for k in DIMENSION_NAMES))
    print(f"{'parameter':<10}{'min':>14}{'max':>14}{'sum':>16}")
    for name in ("q", "pa", "pb", "pd", "pr", "ra", "rb", "rd"):
        arr = getattr(inst, name)
        print(f"{name:<10}{arr.min():>14.6g}{arr.max():>14.6g}{arr.sum():>16.6g}")
    print(f"hd={inst.hd:g} hr={inst.hr:g} lambda={inst.lam:g} t={inst.t:g} "
          f"reliability={inst.reliability:.6f}")
    probe = solve_lp(build_milp(inst, "cost", relaxed=True))
    print(f"LP feasibility probe: {probe.status}")
    if probe.status == OPTIMAL:
        return EXIT_OK
    if probe.status == "infeasible":
        print("instance is infeasible: no flow plan meets demand within the capacities")
        return EXIT_INFEASIBLE
    return EXIT_LIMIT


# --- solve -----------------------------------------------------------------

def _index_label(prefix, idx, option=None):
    parts = [str(i + 1) for i in idx]
    sub = ("".join(parts) if all(i < 9 for i in idx) else ",".join(parts))
    label = f"{prefix}_{{{sub}}}" if option is not None else f"{prefix}_{sub}"
    return label if option is None else f"{label}^{option + 1}"


def solution_rows(solution) -> List[tuple]:
    """(variable, value text) rows: every indicator, then flows that print as nonzero."""
    rows = []
    for block in INDICATOR_BLOCKS:
        prefix = block[0].upper() + block[1]
        for (i,), v in np.ndenumerate(getattr(solution, block)):
            rows.append((_index_label(prefix, (i,)), f"{v:.3f}"))
    for block in FLOW_BLOCKS:
        prefix = block[0].upper() + block[1]
        for (t, a, b), v in np.ndenumerate(getattr(solution, block)):
            if v >= 5e-4:  # below printing precision
                rows.append((_index_label(prefix, (a, b), t), f"{v:.3f}(units)"))
    return rows


def format_table(rows, columns: int = 3) -> str:
    header = "\t".join(["Variables\tValues"] * columns)
    lines = [header]
    for k in range(0, len(rows), columns):
        chunk = rows[k:k + columns]
        lines.append("\t".join(f"{name}\t{value}" for name, value in chunk))
    return "\n".join(lines)


def objective_lines(currency: str, f1: float, f2: float) -> str:
    return f"f1 = {currency} {f1:.3f}\nf2 = {f2:.3f}(kg)"


def _print_front(front: ParetoFront, inst: NetworkInstance, relaxed: bool):
    if relaxed:
        print("LP relaxation: indicators bounded in [0, 1], values may be fractional")
    for k, entry in enumerate(front.entries, start=1):
        tag = f"eps = {entry.epsilon:.6g}" if entry.epsilon is not None else f"generation {entry.generation}"
        proven = "" if entry.proven else " (not proven optimal)"
        print(f"\nPoint {k} of {len(front)} [{tag}]{proven}")
        print(format_table(solution_rows(entry.solution)))
        print(objective_lines(inst.currency, entry.f1, entry.f2))


def _write_outputs(front: ParetoFront, out: Path, manifest: dict):
    save_front(front, out)
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest["artifacts"] = {"front": str(out), "manifest": str(manifest_path)}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"\nwrote {out} and {manifest_path}")


def _counting_solver(inst, config: EpsConfig, stats: dict):
    lock = threading.Lock()

    def solve(mode, emission_cap=None, cost_cap=None):
        lp = build_milp(inst, mode, emission_cap, cost_cap=cost_cap, relaxed=config.relaxed)
        sol = solve_milp(lp, config.solver)
        with lock:
            _tally(stats, sol)
        if sol.x is None:
            return sol.status, None
        return sol.status, solution_from_x(inst, sol.x)
    return solve


def _tally(stats, sol):
    stats["solves"] += 1
    stats["nodes"] += sol.nodes
    stats["iterations"] += sol.iterations
    stats["status_counts"][sol.status] = stats["status_counts"].get(sol.status, 0) + 1


def cmd_solve(args, argv) -> int:
    inst = _load(args.instance)
    out = _out_path(args.out)
    threads = _threads(args.threads)
    started = time.perf_counter()
    manifest = {
        "command": ["greenloop"] + list(argv),
        "version": __version__,
        "instance_hash": instance_hash(inst),
        "method": args.method,
        "threads": threads,
    }
    if args.method == "eps":
        if args.pop is not None or args.gens is not None or args.seed is not None:
            raise CliError("--pop/--gens/--seed apply to 'solve ga' only")
        config = EpsConfig(n=args.grid, relaxed=args.relaxed, threads=threads,
                           solver=SolverConfig(max_nodes=args.max_nodes))
        stats = {"solves": 0, "nodes": 0, "iterations": 0, "status_counts": {}}
        try:
            front = sweep_with(inst, _counting_solver(inst, config, stats), config)
        except ModelInfeasibleError as exc:
            print(f"infeasible: {exc}")
            return EXIT_INFEASIBLE
        except SolverLimitError as exc:
            front = ParetoFront.from_entries([], instance_hash(inst), {"method": "eps-constraint",
                                                                         "diagnostic": str(exc)}, exact=False)
        manifest.update(config={"grid": config.n, "relaxed": config.relaxed, "solver": asdict(config.solver)},
                        seed=None, solver_statistics=dict(stats, points=len(front), exact=front.exact))
    else:
        if args.relaxed:
            raise CliError("--relaxed applies to 'solve eps' only")
        if args.grid is not None and args.grid != 20:
            raise CliError("--grid applies to 'solve eps' only")
        probe = solve_lp(build_milp(inst, "cost", relaxed=True))
        if probe.status == "infeasible":
            print("infeasible: the LP relaxation has no feasible point")
            return EXIT_INFEASIBLE
        defaults = GaConfig(seed=0)
        config = GaConfig(seed=1 if args.seed is None else args.seed,
                          population_size=args.pop or defaults.population_size,
                          generations=defaults.generations if args.gens is None else args.gens,
                          threads=threads)
        front = evolve(inst, config)
        manifest.update(config=asdict(config), seed=config.seed,
                        solver_statistics={"points": len(front), "evaluations":
                                           config.population_size * (config.generations + 1)})
    manifest["wall_clock_seconds"] = time.perf_counter() - started
    _print_front(front, inst, args.relaxed)
    _write_outputs(front, out, manifest)
    if args.method == "eps" and not front.exact:
        print("solver limit reached: front is partial or not proven optimal")
        return EXIT_LIMIT
    if args.method == "ga" and len(front) == 0:
        print("no feasible chromosome survived; try more generations or a larger population")
        return EXIT_LIMIT
    return EXIT_OK


# --- compare ---------------------------------------------------------------

def _read_front(path) -> ParetoFront:
    try:
        return load_front(path)
    except FrontFormatError as exc:
        raise CliError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def cmd_compare(args) -> int:
    a, b = _read_front(args.front_a), _read_front(args.front_b)
    try:
        metrics = compare(a, b)
    except ComparisonError as exc:
        raise CliError(str(exc)) from None
    values = metrics.as_dict()
    lines = [f"A: {args.front_a} ({a.metadata.get('method', '?')})",
             f"B: {args.front_b} ({b.metadata.get('method', '?')})"]
    lines += [f"{key:<18}{value!r}" for key, value in values.items()]
    report = "\n".join(lines) + "\n"
    print(report, end="")
    out = _out_path(args.out)
    out.write_text(report, encoding="utf-8")
    sidecar = out.with_name(out.name + ".csv")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value"])
    for key, value in values.items():
        writer.writerow([key, repr(value)])
    sidecar.write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {out} and {sidecar}")
    return EXIT_OK


# --- gen -------------------------------------------------------------------

def _parse_dims(text: str):
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError("--dims expects eight comma-separated integers F,W,C,I,TF,TW,TK,TI") from None
    if len(dims) != 8:
        raise CliError("--dims expects eight comma-separated integers F,W,C,I,TF,TW,TK,TI")
    return dims


def cmd_gen(args) -> int:
    dims = _parse_dims(args.dims)
    try:
        inst = generate(GeneratorSpec(seed=args.seed, dims=dims, margin=args.margin))
    except GenerationError as exc:
        raise CliError(f"generation failed: {exc}") from None
    out = _out_path(args.out)
    save_instance(inst, out, provenance=f"generated: seed={args.seed} dims={args.dims} margin={args.margin}")
    print(f"wrote {out} (hash {instance_hash(inst)[:12]})")
    return EXIT_OK


# --- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    inst = _load(args.instance)
    try:
        rows = cross_check(inst, n_caps=args.caps, grid_points=args.grid, threads=_threads(args.threads))
    except EnumerationBoundError as exc:
        raise CliError(str(exc)) from None
    bad = [r for r in rows if not r.ok(args.rtol)]
    print(f"{'check':<32}{'solve_milp':>20}{'brute force':>20}{'rel diff':>12}")
    for r in bad if bad else rows:
        print(f"{r.check:<32}{r.solver:>20.10g}{r.oracle:>20.10g}{r.rel_diff:>12.3g}")
    if bad:
        print(f"{len(bad)} of {len(rows)} checks differ beyond {args.rtol:g}")
        return EXIT_VERIFY
    print(f"all {len(rows)} checks agree within {args.rtol:g}")
    return EXIT_OK


# --- plot ------------------------------------------------------------------

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def render_svg(series, currency: str = "£", width: int = 640, height: int = 480) -> str:
    """Scatter plot of one or more fronts as a standalone SVG document.

    ``series`` is a list of (label, points). Each point becomes one
    ``<circle class="marker series-k">``.
    """
    left, right, top, bottom = 90, 20, 20, 60
    pts = [p for _, points in series for p in points]
    if pts:
        arr = np.asarray(pts, dtype=float)
        lo, hi = arr.min(axis=0), arr.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    span = np.where(hi - lo > 0, hi - lo, np.maximum(np.abs(hi), 1.0))
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - lo[0]) / (hi[0] - lo[0]) * pw

    def sy(v):
        return top + ph - (v - lo[1]) / (hi[1] - lo[1]) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for k in range(5):
        fx = lo[0] + (hi[0] - lo[0]) * k / 4
        fy = lo[1] + (hi[1] - lo[1]) * k / 4
        out.append(f'<text x="{sx(fx):.2f}" y="{top + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{fx:.6g}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(fy) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{fy:.6g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 15}" font-size="13" text-anchor="middle">'
               f'f1 total cost ({escape(currency)})</text>')
    out.append(f'<text x="18" y="{top + ph / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2})">f2 total CO2 emission (kg)</text>')
    for k, (label, points) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<g class="series series-{k}">')
        for f1, f2 in points:
            out.append(f'<circle class="marker series-{k}" cx="{sx(f1):.2f}" cy="{sy(f2):.2f}" r="3.5" '
                       f'fill="{color}"/>')
        out.append("</g>")
        ly = top + 14 + 18 * k
        out.append(f'<g class="legend"><rect x="{left + pw - 170}" y="{ly - 9}" width="10" height="10" '
                   f'fill="{color}"/><text x="{left + pw - 155}" y="{ly}" font-size="12">'
                   f'{escape(label)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_plot(args) -> int:
    fronts = [(Path(p).name, _read_front(p)) for p in args.fronts]
    currency = "£"
    series = [(f"{name} ({front.metadata.get('method', '?')})", front.points) for name, front in fronts]
    out = _out_path(args.out)
    out.write_text(render_svg(series, currency), encoding="utf-8")
    sidecar = out.with_name(out.name + ".csv")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "f1", "f2"])
    for label, points in series:
        for f1, f2 in points:
            writer.writerow([label, repr(f1), repr(f2)])
    sidecar.write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {out} and {sidecar}")
    return EXIT_OK


# --- wiring ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greenloop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"greenloop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance and probe LP feasibility")
    p.add_argument("instance", help="instance file or bundled:base / bundled:tradeoff")

    p = sub.add_parser("solve", help="compute a Pareto front")
    p.add_argument("method", choices=("eps", "ga"))
    p.add_argument("instance")
    p.add_argument("--grid", type=int, default=20, help="epsilon grid points (eps)")
    p.add_argument("--pop", type=int, help="population size (ga)")
    p.add_argument("--gens", type=int, help="generations (ga)")
    p.add_argument("--seed", type=int, help="random seed (ga, default 1)")
    p.add_argument("--relaxed", action="store_true", help="drop integrality of the indicators (eps)")
    p.add_argument("--max-nodes", type=int, default=SolverConfig().max_nodes, help="branch-and-bound node limit")
    p.add_argument("--threads", type=int, help="worker cap (default: available cores)")
    p.add_argument("--out", required=True, help="front file to write")

    p = sub.add_parser("compare", help="hypervolume and coverage of two fronts")
    p.add_argument("front_a")
    p.add_argument("front_b")
    p.add_argument("--out", required=True, help="text report; a CSV copy goes to <out>.csv")

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dims", default="2,2,2,2,1,1,1,1", help="F,W,C,I,TF,TW,TK,TI")
    p.add_argument("--margin", type=float, default=1.5)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="cross-check solve_milp against brute-force enumeration")
    p.add_argument("instance")
    p.add_argument("--caps", type=int, default=5)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--threads", type=int)

    p = sub.add_parser("plot", help="SVG scatter of one or more fronts")
    p.add_argument("fronts", nargs="+")
    p.add_argument("--out", required=True, help="SVG file; a CSV copy goes to <out>.csv")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "solve":
            return cmd_solve(args, argv)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_plot(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
