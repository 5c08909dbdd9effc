"""End-to-end audit pipeline: validate, filter, extract, export, scan, report.

Each notebook is processed by a pure, self-contained task so the corpus can
fan out over a process pool; the merge stage is a sorted fold, which makes
every output byte independent of the parallelism degree. One poisoned file
can fail only its own record.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from . import a11yrules, codeanalysis, htmlexport, metrics, nbmodel, report as report_mod
from .metrics import DEFAULT_SIZE_THRESHOLDS, SizeThresholds
from .report import AuditRecord, ScanSummary
from .themes import THEME_NAMES, Theme, load_themes

DEFAULT_SEED = 20230801

_IMAGE_EXTENSIONS = {"PNG": "png", "JPEG": "jpg", "GIF": "gif", "BMP": "bmp", "SVG": "svg"}


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple[str, ...]
    out_dir: str
    language: str = "python"  # empty string disables the filter
    themes: tuple[str, ...] = THEME_NAMES
    rules: frozenset[str] | None = None
    thresholds: SizeThresholds = DEFAULT_SIZE_THRESHOLDS
    jobs: int = 1
    sample: int | None = None
    seed: int = DEFAULT_SEED
    dump_images: bool = False


@dataclass
class TaskResult:
    record: AuditRecord
    findings: list[a11yrules.A11yFinding] = field(default_factory=list)
    manifest: list[dict] = field(default_factory=list)


@dataclass
class AuditOutcome:
    exit_code: int
    report: report_mod.CorpusReport
    records: list[AuditRecord]
    out_dir: Path


@lru_cache(maxsize=8)
def _themes_cached(names: tuple[str, ...], theme_dir: str | None) -> tuple[Theme, ...]:
    return tuple(load_themes(list(names)))


def _themes_for(names: tuple[str, ...]) -> tuple[Theme, ...]:
    # The override directory participates in the cache key so an env change
    # within one process cannot serve stale palettes.
    return _themes_cached(names, os.environ.get("NBAUDIT_THEME_DIR"))


def discover_notebooks(inputs: Iterable[str]) -> list[str]:
    """Expand files and directories into a sorted list of .ipynb paths."""
    found: set[str] = set()
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            found.update(str(p) for p in path.rglob("*.ipynb"))
        else:
            found.add(str(path))
    return sorted(found)


def _mime_counts(nb: nbmodel.Notebook) -> dict[str, int]:
    counts: dict[str, int] = {}
    for cell in nb.code_cells():
        for bundle in cell.outputs:
            for mime in bundle.mime_payloads:
                counts[mime] = counts.get(mime, 0) + 1
    return counts


def _dump_images(images: list[nbmodel.ImageArtifact], out_dir: Path) -> None:
    target = out_dir / "images"
    target.mkdir(parents=True, exist_ok=True)
    for image in images:
        if not image.data or image.format is None:
            continue
        digest = hashlib.sha1(image.data).hexdigest()
        ext = _IMAGE_EXTENSIONS[image.format]
        path = target / f"{digest}.{ext}"
        if not path.exists():
            path.write_bytes(image.data)


def process_notebook(path: str, export_name: str, config: RunConfig) -> TaskResult:
    """Run the per-notebook pipeline; never raises for bad notebook content."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        return TaskResult(AuditRecord(path=path, status=report_mod.STATUS_INVALID, error=str(exc)))
    try:
        nb = nbmodel.parse_notebook(raw, path)
    except nbmodel.ValidityError as exc:
        return TaskResult(
            AuditRecord(
                path=path,
                status=report_mod.STATUS_INVALID,
                error=f"{type(exc).__name__}: {exc}",
            )
        )

    if config.language and not nbmodel.filter_language(nb, config.language):
        return TaskResult(
            AuditRecord(path=path, status=report_mod.STATUS_FILTERED, language=nb.language)
        )

    images, image_errors = nbmodel.extract_images(nb)
    nb_metrics = metrics.compute_metrics(nb, images, config.thresholds)

    builtins = codeanalysis.load_builtin_names()
    imports: list[codeanalysis.ImportRecord] = []
    calls: list[codeanalysis.CallRecord] = []
    parse_failures = 0
    for cell in nb.code_cells():
        try:
            _, cell_imports, cell_calls = codeanalysis.analyze_cell(
                cell.source, cell.index, builtins
            )
        except codeanalysis.ParseFailure:
            parse_failures += 1
            continue
        imports.extend(cell_imports)
        calls.extend(cell_calls)
    codeanalysis.resolve_aliases(imports, calls)

    out_dir = Path(config.out_dir)
    findings: list[a11yrules.A11yFinding] = []
    manifest: list[dict] = []
    scans: list[ScanSummary] = []
    for theme in _themes_for(config.themes):
        doc = htmlexport.export_html(nb, theme)
        target = out_dir / theme.name / f"{export_name}.html"
        target.write_bytes(doc.data)
        manifest.append(
            {
                "notebook": path,
                "theme": theme.name,
                "output": str(target),
                "size": len(doc.data),
                "sha256": hashlib.sha256(doc.data).hexdigest(),
            }
        )
        result = a11yrules.scan(doc, theme, rules=config.rules)
        findings.extend(result.findings)
        rule_errors: dict[str, int] = {}
        for finding in result.findings:
            if finding.severity == a11yrules.ERROR:
                rule_errors[finding.rule_code] = rule_errors.get(finding.rule_code, 0) + 1
        scans.append(
            ScanSummary(
                theme=theme.name,
                error_count=result.errors(),
                warning_count=result.warnings(),
                rule_errors=rule_errors,
            )
        )

    if config.dump_images:
        _dump_images(images, out_dir)

    record = AuditRecord(
        path=path,
        status=report_mod.STATUS_OK,
        language=nb.language,
        metrics=nb_metrics,
        mime_counts=_mime_counts(nb),
        imports=imports,
        calls=calls,
        parse_failures=parse_failures,
        image_decode_failures=len(image_errors),
        scans=scans,
    )
    return TaskResult(record=record, findings=findings, manifest=manifest)


def _run_task(args: tuple[str, str, RunConfig]) -> TaskResult:
    return process_notebook(*args)


def select_sample(paths: list[str], sample: int, seed: int) -> list[str]:
    """Seeded, reproducible subsample of a sorted corpus."""
    if sample > len(paths):
        raise ValueError(f"sample size {sample} exceeds corpus size {len(paths)}")
    rng = random.Random(seed)
    return sorted(rng.sample(paths, sample))


def run_audit(config: RunConfig, progress=None) -> AuditOutcome:
    """Execute the full pipeline and write all artifacts under ``out_dir``.

    Exit code 0 on success, 2 when any notebook failed validation (a report
    over the valid subset is still produced).
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in config.themes:
        (out_dir / name).mkdir(parents=True, exist_ok=True)
    _themes_for(config.themes)  # fail fast on unknown theme names

    paths = discover_notebooks(config.inputs)
    if config.sample is not None:
        paths = select_sample(paths, config.sample, config.seed)
    names = htmlexport.assign_output_names(paths)
    tasks = [(path, names[path], config) for path in paths]

    results: list[TaskResult]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = []
        for task in tasks:
            results.append(_run_task(task))
            if progress is not None:
                progress(task[0])

    records = [r.record for r in results]
    with open(out_dir / "records.jsonl", "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
    with open(out_dir / "findings.jsonl", "w", encoding="utf-8") as handle:
        for result in results:
            for finding in result.findings:
                handle.write(json.dumps(finding.to_json(), sort_keys=True) + "\n")
    manifest = [row for result in results for row in result.manifest]
    htmlexport.write_manifest(manifest, out_dir / "manifest.jsonl")

    corpus = report_mod.aggregate(records)
    report_mod.emit(corpus, out_dir)

    any_invalid = any(r.status == report_mod.STATUS_INVALID for r in records)
    return AuditOutcome(
        exit_code=2 if any_invalid else 0,
        report=corpus,
        records=records,
        out_dir=out_dir,
    )


def load_records(path: Path | str) -> list[AuditRecord]:
    """Read back a records.jsonl file written by :func:`run_audit`."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(AuditRecord.from_json(json.loads(line)))
    return records


def config_with_defaults(inputs: Iterable[str], out_dir: str, **overrides) -> RunConfig:
    return replace(RunConfig(inputs=tuple(str(p) for p in inputs), out_dir=str(out_dir)), **overrides)
