"""Command-line entry points.

Progress and diagnostics go to stderr; stdout stays clean for
machine-readable data (``--stdout`` on ``audit``, JSON lines elsewhere).
Exit codes for ``audit``: 0 success, 2 when some notebooks failed
validation (a report over the valid subset is still written), 1 for fatal
configuration problems.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import a11yrules, altpng, codeanalysis, htmlexport, nbmodel, pipeline, report as report_mod
from .metrics import DEFAULT_SIZE_THRESHOLDS, load_size_thresholds, parse_thresholds_arg
from .pipeline import DEFAULT_SEED, RunConfig
from .themes import THEME_NAMES, ThemeInvalid, ThemeUnknown, load_theme


def _parse_theme_list(value: str) -> tuple[str, ...]:
    names = tuple(name.strip() for name in value.split(",") if name.strip())
    if not names:
        raise click.BadParameter("at least one theme name required")
    return names


def _parse_rules(value: str | None) -> frozenset[str] | None:
    if value is None:
        return None
    codes = frozenset(code.strip().upper() for code in value.split(",") if code.strip())
    unknown = codes - a11yrules.ALL_RULES
    if unknown:
        raise click.BadParameter(f"unknown rule codes: {sorted(unknown)}")
    return codes


def _parse_size_thresholds(value: str | None):
    if value is None:
        return DEFAULT_SIZE_THRESHOLDS
    if "," in value:
        return parse_thresholds_arg(value)
    return load_size_thresholds(value)


@click.group()
def main() -> None:
    """Accessibility auditing for Jupyter notebook corpora."""


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "-o", "out_dir", default="nbaudit-out", show_default=True,
              help="Output directory for exports, findings, and the report.")
@click.option("--language", default="python", show_default=True,
              help="Language filter on notebook metadata; empty string disables.")
@click.option("--themes", default=",".join(THEME_NAMES), show_default=True,
              help="Comma-separated theme names to export and scan.")
@click.option("--rules", default=None, help="Comma-separated rule codes to run (default: all).")
@click.option("--jobs", default=1, show_default=True, type=int, help="Worker processes.")
@click.option("--sample", default=None, type=int, help="Randomly subsample this many notebooks.")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int,
              help="Seed for reproducible sampling.")
@click.option("--size-thresholds", default=None,
              help="DEGRADED,CRASH byte thresholds, or a path to a key/value config file.")
@click.option("--dump-images", is_flag=True, help="Write decoded images under <out>/images/.")
@click.option("--stdout", "to_stdout", is_flag=True,
              help="Print the report JSON to stdout.")
def audit(inputs, out_dir, language, themes, rules, jobs, sample, seed,
          size_thresholds, dump_images, to_stdout) -> None:
    """Run the full pipeline over notebooks or directories of notebooks."""
    try:
        config = RunConfig(
            inputs=tuple(str(p) for p in inputs),
            out_dir=str(out_dir),
            language=language,
            themes=_parse_theme_list(themes),
            rules=_parse_rules(rules),
            thresholds=_parse_size_thresholds(size_thresholds),
            jobs=max(1, jobs),
            sample=sample,
            seed=seed,
            dump_images=dump_images,
        )
        outcome = pipeline.run_audit(
            config, progress=lambda p: click.echo(f"audited {p}", err=True)
        )
    except (ValueError, ThemeUnknown, ThemeInvalid, OSError) as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"notebooks={outcome.report.n_notebooks} valid={outcome.report.n_valid} "
        f"analyzed={outcome.report.n_language_filtered} out={outcome.out_dir}",
        err=True,
    )
    if to_stdout:
        click.echo(report_mod.report_json_text(outcome.report), nl=False)
    sys.exit(outcome.exit_code)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "-o", "out_dir", default="nbaudit-out", show_default=True)
@click.option("--themes", default=",".join(THEME_NAMES), show_default=True)
def export(inputs, out_dir, themes) -> None:
    """Export notebooks to standalone themed HTML files."""
    try:
        theme_objs = [load_theme(name) for name in _parse_theme_list(themes)]
    except (ThemeUnknown, ThemeInvalid) as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    paths = pipeline.discover_notebooks([str(p) for p in inputs])
    notebooks = []
    manifest: list[dict] = []
    for path in paths:
        try:
            notebooks.append(nbmodel.parse_notebook_file(path))
        except (OSError, nbmodel.ValidityError) as exc:
            manifest.append({"notebook": path, "error": f"{type(exc).__name__}: {exc}"})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest.extend(htmlexport.export_corpus(notebooks, out, theme_objs))
    htmlexport.write_manifest(manifest, out / "manifest.jsonl")
    click.echo(f"exported {len(notebooks)} notebooks x {len(theme_objs)} themes -> {out}", err=True)
    sys.exit(1 if any("error" in row for row in manifest) else 0)


@main.command()
@click.argument("documents", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--theme", default="light", show_default=True)
@click.option("--rules", default=None, help="Comma-separated rule codes to run.")
@click.option("--out", "-o", "out_path", default=None,
              help="Write findings JSONL here instead of stdout.")
def scan(documents, theme, rules, out_path) -> None:
    """Scan HTML files for accessibility findings."""
    try:
        theme_obj = load_theme(theme)
        rule_set = _parse_rules(rules)
    except (ThemeUnknown, ThemeInvalid) as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    lines = []
    for path in documents:
        result = a11yrules.scan_file(path, theme_obj, rules=rule_set)
        for finding in result.findings:
            lines.append(json.dumps(finding.to_json(), sort_keys=True))
        click.echo(
            f"{path}: {result.errors()} errors, {result.warnings()} warnings",
            err=True,
        )
    payload = "\n".join(lines) + ("\n" if lines else "")
    if out_path:
        Path(out_path).write_text(payload, encoding="utf-8")
    else:
        click.echo(payload, nl=False)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", "-o", "out_path", default=None,
              help="Write analysis JSONL here instead of stdout.")
def analyze(inputs, out_path) -> None:
    """Extract imports and call targets from notebook code cells."""
    builtins = codeanalysis.load_builtin_names()
    lines = []
    for path in pipeline.discover_notebooks([str(p) for p in inputs]):
        try:
            nb = nbmodel.parse_notebook_file(path)
        except (OSError, nbmodel.ValidityError) as exc:
            lines.append(json.dumps({"path": path, "error": str(exc)}, sort_keys=True))
            continue
        imports: list[codeanalysis.ImportRecord] = []
        calls: list[codeanalysis.CallRecord] = []
        failures = 0
        for cell in nb.code_cells():
            try:
                _, cell_imports, cell_calls = codeanalysis.analyze_cell(
                    cell.source, cell.index, builtins
                )
            except codeanalysis.ParseFailure:
                failures += 1
                continue
            imports.extend(cell_imports)
            calls.extend(cell_calls)
        codeanalysis.resolve_aliases(imports, calls)
        lines.append(
            json.dumps(
                {
                    "path": path,
                    "imports": [
                        {"module": r.module, "imported_name": r.imported_name,
                         "alias": r.alias, "cell_index": r.cell_index}
                        for r in imports
                    ],
                    "calls": [
                        {"target": c.target, "cell_index": c.cell_index,
                         "is_builtin": c.is_builtin, "resolved_module": c.resolved_module}
                        for c in calls
                    ],
                    "parse_failures": failures,
                },
                sort_keys=True,
            )
        )
    payload = "\n".join(lines) + ("\n" if lines else "")
    if out_path:
        Path(out_path).write_text(payload, encoding="utf-8")
    else:
        click.echo(payload, nl=False)


@main.group()
def alt() -> None:
    """Embed or inspect PNG alt-text metadata."""


@alt.command()
@click.argument("input_png", type=click.Path(exists=True))
@click.option("--text", required=True, help="Description to embed.")
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
def embed(input_png, text, out_path) -> None:
    """Embed an alt description into a PNG."""
    try:
        data = altpng.embed_alt(Path(input_png).read_bytes(), text)
    except (altpng.NotAPng, ValueError) as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    Path(out_path).write_bytes(data)
    click.echo(f"wrote {out_path}", err=True)


@alt.command()
@click.argument("input_png", type=click.Path(exists=True))
def show(input_png) -> None:
    """Print the embedded alt description, if any."""
    try:
        description = altpng.extract_alt(Path(input_png).read_bytes())
    except altpng.NotAPng as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    if description is None:
        click.echo("no alt description", err=True)
        sys.exit(3)
    click.echo(description)


@main.command("report")
@click.argument("records", type=click.Path(exists=True))
@click.option("--out", "-o", "out_dir", default="nbaudit-report", show_default=True)
@click.option("--formats", default="json,csv,html", show_default=True)
def report_cmd(records, out_dir, formats) -> None:
    """Re-aggregate a records.jsonl file into report outputs."""
    records_path = Path(records)
    if records_path.is_dir():
        records_path = records_path / "records.jsonl"
    try:
        loaded = pipeline.load_records(records_path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        click.echo(f"fatal: cannot read records: {exc}", err=True)
        sys.exit(1)
    corpus = report_mod.aggregate(loaded)
    wanted = {f.strip() for f in formats.split(",") if f.strip()}
    written = report_mod.emit(corpus, Path(out_dir), wanted)
    for path in written:
        click.echo(str(path), err=True)


if __name__ == "__main__":
    main()
