#!/usr/bin/env python3
"""
hypchroma command line
Bounds, sampled verification, tree colorings, exact search and the heptagon
and flat-model certificates, all printing JSON on stdout.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exhausted.
"""

import functools
import io
import json
import logging
import math
import sys
from datetime import datetime
from typing import Any, Dict, List, Optional

import click
from pydantic import BaseModel, Field, ValidationError

from . import __version__
from .bounds import (
    BoundReport,
    CliqueWitness,
    bound_report,
    d0_closed_form,
    d0_residual,
    interval_clique_points,
    optimize_checkerboard,
    solve_d0,
)
from .checkerboard import (
    ValidationReport,
    ViolationReport,
    export_color_map,
    interval_scheme,
    large_d_scheme,
    mutate_scheme,
    validate_scheme,
    verify_by_sampling,
)
from .chromasolve import (
    CliqueResult,
    CnfSummary,
    ColoringResult,
    SolveStatus,
    build_distance_graph,
    chromatic_number,
    export_dimacs_cnf,
    make_graph,
    max_clique,
)
from .config import get_settings
from .errors import ConfigError, ConstructionError, DomainError, ParameterError
from .flatmodel import AngleCertificate, check_angle_certificate, embed_tree, export_map
from .heptile import HeptileReport, color_patch, export_tiles, generate_patch, heptile_report
from .storage import ResultStorage
from .treegeom import (
    SpindleGadget,
    TreeVerification,
    build_ball,
    clique_q,
    color_even,
    color_even_palette,
    color_interval_palette,
    color_interval_tree,
    color_odd,
    export_coloring,
    interval_clique_tree,
    moser_spindle,
    palette_size,
    verify_tree_coloring,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

TREE_MODES = ["color", "verify", "clique", "spindle", "chroma", "export-cnf"]


class RunConfig(BaseModel):
    """One CLI invocation as recorded next to saved results."""
    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    out: Optional[str] = Field(None, description="Output path for file artifacts")
    csv: bool = Field(False, description="Tabular payload instead of JSON")
    save: bool = Field(False, description="Persist the payload through ResultStorage")


class ErrorPayload(BaseModel):
    error: str
    error_type: str
    timestamp: str


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _status(icon: str, message: str) -> None:
    click.echo(f"{icon} {message}", err=True)


def _dump(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return _round_floats(payload)


def _emit(ctx: click.Context, run: RunConfig, payload: Any, slug: str = "") -> None:
    data = _dump(payload)
    click.echo(json.dumps(data, indent=2))
    if ctx.obj["save"]:
        filename = ctx.obj["storage"]().save_result(run.command, run.params, data, slug)
        _status("✅", f"saved {filename}")


def _save_text(ctx: click.Context, run: RunConfig, text: str, slug: str, suffix: str) -> None:
    if ctx.obj["save"]:
        filename = ctx.obj["storage"]().save_text(run.command, text, slug, suffix)
        _status("✅", f"saved {filename}")


def _error(exc: Exception, code: int) -> None:
    payload = ErrorPayload(error=str(exc), error_type=type(exc).__name__,
                           timestamp=datetime.now().isoformat())
    click.echo(payload.model_dump_json())
    _status("❌", str(exc))
    sys.exit(code)


def handle_errors(func):
    """Map library exceptions to the documented exit codes."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ParameterError, DomainError, ConfigError, ValidationError, OverflowError) as e:
            _error(e, EXIT_USAGE)
        except ConstructionError as e:
            _error(e, EXIT_FAILED)
    return wrapper


@click.group()
@click.version_option(__version__, prog_name="hypchroma")
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG logging")
@click.option("--save", is_flag=True, help="Persist the result in the results directory")
@click.option("--results-dir", default=None, help="Override HYPCHROMA_RESULTS_DIR")
@click.pass_context
def main(ctx: click.Context, verbose: int, save: bool, results_dir: Optional[str]):
    """Chromatic number bounds for the hyperbolic plane and regular trees."""
    try:
        settings = get_settings()
    except ConfigError as e:
        _error(e, EXIT_USAGE)
    level = {0: settings.log_level.upper(), 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger("hypchroma").setLevel(level)

    directory = results_dir or settings.results_dir
    ctx.ensure_object(dict)
    ctx.obj["save"] = save
    ctx.obj["jobs"] = settings.jobs
    ctx.obj["budget"] = settings.budget
    ctx.obj["storage"] = lambda: ResultStorage(directory)


@main.command("hyp-bound")
@click.option("--d", "d", type=float, required=True, help="Forbidden distance")
@click.option("--c", "c", type=float, default=None, help="Interval factor: forbid [d, cd]")
@click.option("--grid-steps", type=int, default=512, show_default=True)
@click.pass_context
@handle_errors
def hyp_bound(ctx, d: float, c: Optional[float], grid_steps: int):
    """Upper bounds on the chromatic number of H for distance d."""
    run = RunConfig(command="hyp-bound", params={"d": d, "c": c, "grid_steps": grid_steps})
    report = bound_report(d, c, grid_steps)
    if report.best is None:
        _status("⚠️", "no applicable bound")
    else:
        _status("✅", f"best bound {report.best.value} ({report.best.source.value})")
    _emit(ctx, run, report, slug=f"d{d}" + (f"_c{c}" if c else ""))


def _hyp_scheme(d: float, c: Optional[float], family: str):
    if c is not None:
        return interval_scheme(d, c)
    if family == "large-k4":
        return large_d_scheme(d, 4)
    if family == "large-k3":
        return large_d_scheme(d, 3)
    return optimize_checkerboard(d).params


@main.command("hyp-verify")
@click.option("--d", "d", type=float, required=True)
@click.option("--c", "c", type=float, default=None)
@click.option("--family", type=click.Choice(["optimized", "large-k4", "large-k3"]), default="optimized",
              show_default=True, help="Checkerboard family to verify")
@click.option("--samples", type=click.IntRange(min=0), default=100_000, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker threads (default HYPCHROMA_JOBS)")
@click.option("--break-vertical", is_flag=True, help="Decrement the vertical period before sampling")
@click.option("--csv", "as_csv", is_flag=True, help="Print the violation witnesses as CSV")
@click.option("--color-map", is_flag=True, help="Print the scheme's color map as CSV and stop")
@click.pass_context
@handle_errors
def hyp_verify(ctx, d, c, family, samples, seed, jobs, break_vertical, as_csv, color_map):
    """Sample pairs at the forbidden distance and count monochromatic ones."""
    run = RunConfig(command="hyp-verify", csv=as_csv,
                    params={"d": d, "c": c, "family": family, "samples": samples, "seed": seed,
                            "break_vertical": break_vertical})
    scheme = _hyp_scheme(d, c, family)
    if break_vertical:
        scheme = mutate_scheme(scheme, m_delta=-1)
        _status("⚠️", f"vertical period lowered to {scheme.m_period}")
    if color_map:
        buf = io.StringIO()
        export_color_map(scheme, buf)
        click.echo(buf.getvalue(), nl=False)
        _save_text(ctx, run, buf.getvalue(), f"d{d}_map", ".csv")
        return
    validation: ValidationReport = validate_scheme(scheme)
    report = verify_by_sampling(scheme, samples, seed, jobs=jobs or ctx.obj["jobs"],
                                enforce_valid=not break_vertical)

    if as_csv:
        buf = io.StringIO()
        buf.write("px,py,qx,qy,t,color\n")
        for v in report.violations:
            buf.write(f"{v.p[0]:.12g},{v.p[1]:.12g},{v.q[0]:.12g},{v.q[1]:.12g},{v.t:.12g},{v.color}\n")
        click.echo(buf.getvalue(), nl=False)
        _save_text(ctx, run, buf.getvalue(), f"d{d}", ".csv")
    else:
        _emit(ctx, run, {"validation": _dump(validation), "report": _dump(report)}, slug=f"d{d}")

    if report.passed:
        _status("✅", f"{samples} samples, no monochromatic pair")
        sys.exit(EXIT_OK)
    _status("❌", f"{report.violation_count} monochromatic pairs in {samples} samples")
    sys.exit(EXIT_FAILED)


def _tree_color_fn(d: int, c: Optional[float]):
    if c is not None:
        return lambda ball, v: color_interval_tree(ball, v, d, c)
    if d % 2:
        return color_odd
    return lambda ball, v: color_even(ball, v, d)


def _tree_palette_bound(q: int, d: int, c: Optional[float]) -> int:
    if c is not None:
        return color_interval_palette(q, d, c)
    return 2 if d % 2 else color_even_palette(q, d)


def _forbidden(d: int, c: Optional[float]):
    return (d, math.floor(c * d)) if c is not None else d


def _budget_status(result) -> int:
    if result.status == SolveStatus.SOLVED:
        return EXIT_OK
    _status("⚠️", "budget exhausted; bounds reported")
    return EXIT_BUDGET


@main.command("tree")
@click.option("--q", "q", type=int, default=3, show_default=True, help="Tree degree")
@click.option("--d", "d", type=int, required=True, help="Forbidden distance")
@click.option("--c", "c", type=float, default=None, help="Interval factor: forbid [d, floor(cd)]")
@click.option("--radius", type=int, required=True, help="Ball radius about x_0")
@click.option("--spine", type=int, default=None, help="Spine length (default: enough for every color)")
@click.option("--mode", type=click.Choice(TREE_MODES), default="verify", show_default=True)
@click.option("--k", "k", type=int, default=None, help="Palette size for export-cnf")
@click.option("--budget", type=click.IntRange(min=1), default=None, help="Node budget (default HYPCHROMA_BUDGET)")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write CSV/CNF here")
@click.option("--csv", "as_csv", is_flag=True, help="Print the coloring as CSV (color mode)")
@click.pass_context
@handle_errors
def tree(ctx, q, d, c, radius, spine, mode, k, budget, out, as_csv):
    """Colorings, cliques, spindles and exact search on balls of T_q."""
    params = {"q": q, "d": d, "c": c, "radius": radius, "mode": mode, "k": k, "budget": budget}
    run = RunConfig(command="tree", params=params, out=out, csv=as_csv)
    slug = f"q{q}_d{d}_r{radius}_{mode}"
    reach = math.floor(c * d) if c is not None else d
    ball = build_ball(q, radius, spine or radius + reach + 2)
    budget = budget or ctx.obj["budget"]

    if mode in ("color", "verify"):
        color_fn = _tree_color_fn(d, c)
        if mode == "color":
            if as_csv or out:
                buf = io.StringIO()
                export_coloring(ball, color_fn, buf)
                _write_artifact(ctx, run, buf.getvalue(), out, slug, ".csv")
                return
            _emit(ctx, run, {"q": q, "d": d, "c": c, "radius": radius,
                             "vertex_count": len(ball.ball_vertices),
                             "palette_size": palette_size(ball, color_fn),
                             "palette_bound": _tree_palette_bound(q, d, c)}, slug)
            return
        distances = range(d, reach + 1)
        report: TreeVerification = verify_tree_coloring(ball, color_fn, distances)
        _emit(ctx, run, report, slug)
        if report.passed:
            _status("✅", f"{report.checked_pairs} pairs checked, palette {report.palette_size}")
            sys.exit(EXIT_OK)
        _status("❌", f"{report.violation_count} monochromatic pairs")
        sys.exit(EXIT_FAILED)

    if mode == "clique":
        witness = interval_clique_tree(ball, d, c) if c is not None else clique_q(ball, d)
        graph = build_distance_graph(ball, _forbidden(d, c))
        exact: CliqueResult = max_clique(graph, budget)
        _emit(ctx, run, {"construction": {"size": len(witness), "vertices": witness},
                         "max_clique": _dump(exact)}, slug)
        sys.exit(EXIT_OK if exact.status == SolveStatus.SOLVED else EXIT_BUDGET)

    if mode == "spindle":
        gadget: SpindleGadget = moser_spindle(ball, d)
        index = {v: i for i, v in enumerate(gadget.vertices)}
        graph = make_graph(len(gadget.vertices), [(index[a], index[b]) for a, b in gadget.pairs],
                           provenance=f"spindle q={q} d={d}")
        result: ColoringResult = chromatic_number(graph, budget)
        _status("✅" if result.exact == q + 1 else "⚠️", f"spindle chromatic number {result.exact}")
        _emit(ctx, run, {"gadget": _dump(gadget), "chromatic": _dump(result)}, slug)
        sys.exit(_budget_status(result))

    graph = build_distance_graph(ball, _forbidden(d, c))
    if mode == "chroma":
        result = chromatic_number(graph, budget)
        payload = _dump(result)
        payload.update({"vertex_count": graph.vertex_count, "edge_count": len(graph.edges),
                        "provenance": graph.provenance})
        _emit(ctx, run, payload, slug)
        sys.exit(_budget_status(result))

    if k is None:
        raise ParameterError("export-cnf needs --k")
    buf = io.StringIO()
    summary: CnfSummary = export_dimacs_cnf(graph, k, buf)
    _write_artifact(ctx, run, buf.getvalue(), out, f"{slug}_k{k}", ".cnf")
    _status("✅", f"CNF with {summary.variables} variables and {summary.clauses} clauses")


def _write_artifact(ctx, run: RunConfig, text: str, out: Optional[str], slug: str, suffix: str) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        _status("✅", f"wrote {out}")
    else:
        click.echo(text, nl=False)
    _save_text(ctx, run, text, slug, suffix)


@main.command("heptile")
@click.option("--depth", type=int, default=3, show_default=True, help="Dual-graph depth of the patch (0-5)")
@click.option("--csv", "as_csv", is_flag=True, help="Print tile centers and colors as CSV")
@click.pass_context
@handle_errors
def heptile(ctx, depth: int, as_csv: bool):
    """Heptagon geometry and the same-color separation of the 8-coloring."""
    run = RunConfig(command="heptile", params={"depth": depth}, csv=as_csv)
    if as_csv:
        buf = io.StringIO()
        export_tiles(color_patch(generate_patch(depth)), buf)
        click.echo(buf.getvalue(), nl=False)
        _save_text(ctx, run, buf.getvalue(), f"depth{depth}", ".csv")
        return
    report: HeptileReport = heptile_report(depth)
    if report.separation is not None:
        _status("✅", f"8-coloring valid for d in [{report.geometry.diameter:.6f}, "
                     f"{report.separation.distance:.6f}]")
    _emit(ctx, run, report, slug=f"depth{depth}")


@main.command("d0")
@click.pass_context
@handle_errors
def d0(ctx):
    """Threshold below which the base width at h = d/2 falls short of d."""
    run = RunConfig(command="d0")
    root = solve_d0()
    closed = d0_closed_form()
    _emit(ctx, run, {"d0": root, "closed_form": closed, "difference": abs(root - closed),
                     "residual": d0_residual(root)})


@main.command("clique")
@click.option("--d", "d", type=float, required=True)
@click.option("--c", "c", type=float, required=True)
@click.pass_context
@handle_errors
def clique(ctx, d: float, c: float):
    """Points on a circle pairwise at distance in [d, cd]."""
    run = RunConfig(command="clique", params={"d": d, "c": c})
    witness: CliqueWitness = interval_clique_points(d, c)
    _emit(ctx, run, witness, slug=f"d{d}_c{c}")
    sys.exit(EXIT_OK if witness.pairwise_ok else EXIT_FAILED)


@main.command("flat")
@click.option("--q", "q", type=int, required=True, help="Tree degree")
@click.option("--n", "n", type=int, required=True, help="Triangles around each vertex of H_n")
@click.option("--depth", type=int, default=3, show_default=True, help="Tree radius to embed")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the vertex map here")
@click.pass_context
@handle_errors
def flat(ctx, q: int, n: int, depth: int, out: Optional[str]):
    """Embed a ball of T_q into H_n and check the angle certificate."""
    run = RunConfig(command="flat", params={"q": q, "n": n, "depth": depth}, out=out)
    emb = embed_tree(q, n, depth)
    cert: AngleCertificate = check_angle_certificate(emb)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            export_map(emb, f)
    cx = emb.complex
    _emit(ctx, run, {"q": q, "n": n, "depth": depth, "tree_vertices": len(emb.vertex_map),
                     "complex": {"vertices": cx.vertex_count, "edges": cx.edge_count,
                                 "triangles": len(cx.triangles),
                                 "euler_characteristic": cx.euler_characteristic()},
                     "certificate": _dump(cert)}, slug=f"q{q}_n{n}")
    if cert.passed:
        _status("✅", f"geodesic embedding certified at {cert.checked_vertices} vertices")
        sys.exit(EXIT_OK)
    _status("❌", cert.reason)
    sys.exit(EXIT_FAILED)


SCHEMA_MODELS: List[type] = [
    BoundReport, CliqueWitness, ValidationReport, ViolationReport, HeptileReport,
    TreeVerification, SpindleGadget, CliqueResult, ColoringResult, CnfSummary,
    AngleCertificate, RunConfig, ErrorPayload,
]


@main.command("schema")
def schema():
    """JSON schema of every output model."""
    click.echo(json.dumps({m.__name__: m.model_json_schema() for m in SCHEMA_MODELS}, indent=2))


@main.group("results")
def results():
    """List, show or delete saved results."""


@results.command("list")
@click.pass_context
@handle_errors
def results_list(ctx):
    entries = ctx.obj["storage"]().get_all_results()
    rows = [{"filename": e["filename"], "command": e.get("command"), "modified": e["modified"],
             "file_size": e["file_size"], "summary": e.get("summary", {})} for e in entries]
    click.echo(json.dumps(rows, indent=2))
    _status("📊", f"{len(rows)} saved results")


@results.command("show")
@click.argument("filename")
@click.pass_context
@handle_errors
def results_show(ctx, filename: str):
    data = ctx.obj["storage"]().get_result_by_filename(filename)
    if data is None:
        raise ParameterError(f"no saved result named {filename}")
    click.echo(json.dumps(data, indent=2))


@results.command("delete")
@click.argument("filename")
@click.pass_context
@handle_errors
def results_delete(ctx, filename: str):
    if not ctx.obj["storage"]().delete_result(filename):
        raise ParameterError(f"no saved result named {filename}")
    _status("✅", f"deleted {filename}")


if __name__ == "__main__":
    main()
