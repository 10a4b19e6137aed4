import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import pandas as pd
import typer
from sqlalchemy.orm import sessionmaker

from .boundary_geometry import geometry_report
from .config import SCHEMA_VERSION, load_config, resolve_budget
from .database import init_db, save_box_counts, save_report, save_verification_results
from .errors import BudgetExceededError
from .exact_numerics import format_rational, measure
from .fractal_analysis import box_dimension, box_table
from .ifs_engine import build_ifs, inner_measure, iterate_cover
from .ifs_engine import measure_bracket as bracket_rows
from .models import Command
from .render import render_svg
from .series_model import format_series, parse_series
from .subsum_engine import classify as classify_series
from .subsum_engine import gap_report, level_cover
from .verification import run_suite

app = typer.Typer(help="Exact analysis of subsum sets, the X(m) Cantorvals and their boundaries.")


@app.callback()
def setup(
    ctx: typer.Context,
    config: str = typer.Option("config.yaml", help="YAML config file (optional)"),
    log_level: Optional[str] = typer.Option(None, help="Logging level, overrides the config"),
    db: Optional[str] = typer.Option(None, help="SQLite run ledger path, overrides the config"),
):
    """
    Load configuration and set up logging for every command.

    Args:
            config (str): Path to a YAML config file; defaults apply if it is missing.
            log_level (str): DEBUG, INFO, WARNING or ERROR.
            db (str): Optional SQLite file that records reports and results.
    """
    cfg = load_config(config)
    level = (log_level or cfg["logging"]["level"]).upper()
    # reports go to stdout, so logs stay on stderr
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = {"config": cfg, "db": db or cfg["database"]["path"]}


@contextmanager
def _exit_codes():
    try:
        yield
    except BudgetExceededError as e:
        logging.error(f"Budget exceeded: {e}")
        raise typer.Exit(code=3)
    except (ValueError, TypeError) as e:
        logging.error(f"Invalid input: {e}")
        raise typer.Exit(code=2)


def _budget(ctx: typer.Context) -> int:
    return resolve_budget(config=ctx.obj["config"])


def _session(ctx: typer.Context):
    if not ctx.obj["db"]:
        return None
    Session = sessionmaker(bind=init_db(ctx.obj["db"]))
    return Session()


def _check_format(format: str) -> str:
    format = format.lower()
    if format not in ("json", "csv"):
        logging.error("Unsupported output format. Use 'json' or 'csv'.")
        raise typer.Exit(code=2)
    return format


def _write(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text)
        logging.info(f"Results saved to {output}")
    else:
        typer.echo(text, nl=False)


def _emit(ctx: typer.Context, command: Command, payload: dict, output: Optional[str]):
    document = {"schema_version": SCHEMA_VERSION, "command": command.verb, **payload}
    _write(json.dumps(document, indent=2) + "\n", output)
    session = _session(ctx)
    if session is not None:
        save_report(session, command.verb, command.params, document)
        session.close()


def _emit_csv(df: pd.DataFrame, output: Optional[str]):
    _write(df.to_csv(index=False), output)


@app.command()
def classify(
    ctx: typer.Context,
    series: str = typer.Option(..., help="Series DSL, e.g. 'mg(3,2;1/4)', 'xm(2)', 'geom(2;1/3)'"),
    max_depth: int = typer.Option(12, help="Deepest cover used as evidence"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Classify the achievement set of a multigeometric series."""
    with _exit_codes():
        spec = parse_series(series)
        result = classify_series(spec, max_depth, _budget(ctx))
    logging.info(f"{format_series(spec)}: {result.verdict}")
    command = Command(verb="classify", params={"series": format_series(spec), "max_depth": max_depth})
    _emit(ctx, command, {"series": format_series(spec), **result.model_dump(mode="json")}, output)


@app.command()
def cover(
    ctx: typer.Context,
    series: str = typer.Option(..., help="Series DSL"),
    depth: int = typer.Option(..., help="Number of terms enumerated"),
    gaps: bool = typer.Option(False, "--gaps", help="Include the gap persistence report"),
    format: str = typer.Option("json", help="Output format: json or csv"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Depth-n interval cover of the achievement set."""
    format = _check_format(format)
    with _exit_codes():
        spec = parse_series(series)
        level = level_cover(spec, depth, _budget(ctx))
        records = gap_report(spec, depth, _budget(ctx)) if gaps else []
    if format == "csv":
        rows = [(format_rational(iv.lo), format_rational(iv.hi)) for iv in level.cover]
        _emit_csv(pd.DataFrame(rows, columns=["lo", "hi"]), output)
        return
    payload = {
        "series": format_series(spec),
        **level.model_dump(mode="json"),
        "measure": format_rational(measure(level.cover)),
        "components": len(level.cover),
    }
    if gaps:
        payload["gaps"] = [r.model_dump(mode="json") for r in records]
    command = Command(verb="cover", params={"series": format_series(spec), "depth": depth, "gaps": gaps})
    _emit(ctx, command, payload, output)


@app.command()
def ifs(
    ctx: typer.Context,
    m: int = typer.Option(..., help="Family parameter m >= 1"),
    level: int = typer.Option(..., help="Iteration level n of W^n(I)"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """W^n(I) for the iterated function system of X(m)."""
    with _exit_codes():
        sys_ = build_ifs(m)
        covered = iterate_cover(sys_, level, _budget(ctx))
        inner = inner_measure(sys_, level, _budget(ctx))
    payload = {
        "m": m,
        "maps": [f.to_json() for f in sys_.maps],
        "level": level,
        "cover": covered.to_json(),
        "components": len(covered),
        "inner_measure": format_rational(inner),
        "outer_measure": format_rational(measure(covered)),
    }
    _emit(ctx, Command(verb="ifs", params={"m": m, "level": level}), payload, output)


@app.command()
def geometry(
    ctx: typer.Context,
    m: int = typer.Option(..., help="Family parameter m >= 1"),
    levels: int = typer.Option(6, help="Boundary copies n = 1..levels"),
    discrepancies: bool = typer.Option(
        False,
        "--paper-discrepancies",
        "--discrepancies",
        help="Add the published distance formulas that disagree with the extents",
    ),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Boundary copies, neighbor and symmetric distances."""
    with _exit_codes():
        report = geometry_report(m, levels, with_discrepancies=discrepancies)
    for d in report.discrepancies:
        if not d.agrees:
            logging.warning(f"{d.name}: stated {d.stated} vs derived {d.derived}")
    command = Command(verb="geometry", params={"m": m, "levels": levels, "discrepancies": discrepancies})
    _emit(ctx, command, report.model_dump(mode="json"), output)


@app.command()
def dimension(
    ctx: typer.Context,
    m: int = typer.Option(..., help="Family parameter m >= 1"),
    kmax: int = typer.Option(10, help="Deepest box-count level"),
    jobs: int = typer.Option(1, help="Worker processes for box counting"),
    format: str = typer.Option("json", help="Output format: json or csv"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Moran root, closed form and box-count slope of the boundary X_C(m)."""
    format = _check_format(format)
    cfg = ctx.obj["config"]
    with _exit_codes():
        if format == "csv":
            df = box_table(m, kmax, jobs, _budget(ctx))
        else:
            estimate = box_dimension(
                m, kmax, jobs, _budget(ctx), fit_min_level=cfg["dimension"]["fit_min_level"]
            )
            df = pd.DataFrame([r.model_dump(mode="json") for r in estimate.box_table])
    session = _session(ctx)
    if session is not None:
        save_box_counts(session, m, df)
        session.close()
    if format == "csv":
        _emit_csv(df, output)
        return
    command = Command(verb="dimension", params={"m": m, "kmax": kmax})
    _emit(ctx, command, estimate.model_dump(mode="json"), output)


@app.command("measure")
def measure_cmd(
    ctx: typer.Context,
    m: int = typer.Option(..., help="Family parameter m >= 1"),
    depth: int = typer.Option(..., help="Deepest level of the bracket table"),
    format: str = typer.Option("json", help="Output format: json or csv"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Inner and outer measure bracket around 1."""
    format = _check_format(format)
    with _exit_codes():
        rows = bracket_rows(build_ifs(m), depth, _budget(ctx))
    records = [r.model_dump(mode="json") for r in rows]
    if format == "csv":
        _emit_csv(pd.DataFrame(records), output)
        return
    _emit(ctx, Command(verb="measure", params={"m": m, "depth": depth}), {"m": m, "rows": records}, output)


@app.command()
def render(
    ctx: typer.Context,
    target: str = typer.Option("levels", help="levels, boundary or brackets"),
    m: int = typer.Option(1, help="Family parameter m >= 1"),
    level: int = typer.Option(4, help="Deepest level (or copy level for boundary)"),
    output: Optional[str] = typer.Option(None, help="SVG file path (stdout if omitted)"),
):
    """Static SVG of construction levels, boundary copies or measure brackets."""
    with _exit_codes():
        svg = render_svg(target, m, level, _budget(ctx))
    _write(svg, output)


@app.command()
def verify(
    ctx: typer.Context,
    m: int = typer.Option(..., help="Family parameter m >= 1"),
    suite: str = typer.Option(
        "all",
        help="bt, equivalence, geometry, symmetry, central, measure, dimension, classify, discrepancies or all",
    ),
    max_level: int = typer.Option(6, help="Deepest level checked"),
    output: Optional[str] = typer.Option(None, help="Output file path (stdout if omitted)"),
):
    """Run the regression identities; exits 1 if any fails."""
    with _exit_codes():
        results = run_suite(suite, m, max_level, _budget(ctx))
    failures = [r for r in results if not r.passed]
    payload = {
        "m": m,
        "suite": suite,
        "passed": not failures,
        "checks": len(results),
        "results": [r.model_dump(mode="json") for r in results],
        "failures": [r.model_dump(mode="json") for r in failures],
    }
    session = _session(ctx)
    if session is not None:
        save_verification_results(session, m, results)
        session.close()
    command = Command(verb="verify", params={"m": m, "suite": suite, "max_level": max_level})
    _emit(ctx, command, payload, output)
    if failures:
        logging.error(f"{len(failures)} of {len(results)} checks failed")
        raise typer.Exit(code=1)
    logging.info(f"All {len(results)} checks passed")


if __name__ == "__main__":
    app()
