"""Corpus-level aggregation and report emission.

Aggregation is an associative, commutative merge over per-notebook
records: every statistic is kept as a raw tally (histograms and count
maps) from which the derived views (ranked tables, CDFs, heatmaps,
percentages) are recomputed on finalization. That makes
``aggregate(A | B) == merge(aggregate(A), aggregate(B))`` hold exactly and
lets corpus runs parallelize into a single reduce step.

Outputs: ``report.json`` (raw tallies plus derived views), one CSV per
table or matrix, and ``report.html``, a static page that must itself scan
clean under the bundled light theme.
"""

from __future__ import annotations

import csv
import html as _html
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .codeanalysis import CallRecord, ImportRecord, load_builtin_names
from .metrics import FigureContextFlags, NotebookMetrics
from .nbmodel import InvalidMime, classify_mime

SCHEMA_VERSION = 1

STATUS_OK = "ok"
STATUS_INVALID = "invalid"
STATUS_FILTERED = "filtered"


@dataclass
class ScanSummary:
    theme: str
    error_count: int
    warning_count: int
    rule_errors: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "theme": self.theme,
            "error_count": self.error_count,
            "warning_count": self.warning_count,
            "rule_errors": dict(sorted(self.rule_errors.items())),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ScanSummary":
        return cls(
            theme=data["theme"],
            error_count=data["error_count"],
            warning_count=data["warning_count"],
            rule_errors=dict(data.get("rule_errors", {})),
        )


@dataclass
class AuditRecord:
    """One notebook's trip through the pipeline."""

    path: str
    status: str
    error: str | None = None
    language: str | None = None
    metrics: NotebookMetrics | None = None
    mime_counts: dict[str, int] = field(default_factory=dict)
    imports: list[ImportRecord] = field(default_factory=list)
    calls: list[CallRecord] = field(default_factory=list)
    parse_failures: int = 0
    image_decode_failures: int = 0
    scans: list[ScanSummary] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "path": self.path,
            "status": self.status,
            "error": self.error,
            "language": self.language,
            "metrics": self.metrics.to_json() if self.metrics else None,
            "mime_counts": dict(sorted(self.mime_counts.items())),
            "imports": [
                {
                    "module": r.module,
                    "imported_name": r.imported_name,
                    "alias": r.alias,
                    "cell_index": r.cell_index,
                }
                for r in self.imports
            ],
            "calls": [
                {
                    "target": c.target,
                    "cell_index": c.cell_index,
                    "is_builtin": c.is_builtin,
                    "resolved_module": c.resolved_module,
                }
                for c in self.calls
            ],
            "parse_failures": self.parse_failures,
            "image_decode_failures": self.image_decode_failures,
            "scans": [s.to_json() for s in self.scans],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AuditRecord":
        metrics = None
        m = data.get("metrics")
        if m:
            metrics = NotebookMetrics(
                path=m["path"],
                n_code_cells=m["n_code_cells"],
                n_markdown_cells=m["n_markdown_cells"],
                n_images=m["n_images"],
                n_images_programmatic=m["n_images_programmatic"],
                n_images_markdown=m["n_images_markdown"],
                n_images_with_alt=m["n_images_with_alt"],
                n_images_with_alt_programmatic=m["n_images_with_alt_programmatic"],
                n_images_with_alt_markdown=m["n_images_with_alt_markdown"],
                alt_words=dict(m["alt_words"]),
                n_tables=m["n_tables"],
                table_shapes=[tuple(s) for s in m["table_shapes"]],
                first_heading=tuple(m["first_heading"]) if m["first_heading"] else None,
                first_table_cell=m["first_table_cell"],
                heading_census={int(k): v for k, v in m["heading_census"].items()},
                n_links=m["n_links"],
                figure_context=[
                    FigureContextFlags(
                        cell_index=f["cell_index"],
                        candidate=f["candidate"],
                        has_markdown_neighbor=f["has_markdown_neighbor"],
                        has_table_neighbor=f["has_table_neighbor"],
                        fully_supported=f["fully_supported"],
                    )
                    for f in m["figure_context"]
                ],
                size_bytes=m["size_bytes"],
                size_risk=m["size_risk"],
            )
        return cls(
            path=data["path"],
            status=data["status"],
            error=data.get("error"),
            language=data.get("language"),
            metrics=metrics,
            mime_counts=dict(data.get("mime_counts", {})),
            imports=[
                ImportRecord(r["module"], r["imported_name"], r["alias"], r["cell_index"])
                for r in data.get("imports", [])
            ],
            calls=[
                CallRecord(
                    c["target"], c["cell_index"], c["is_builtin"], c.get("resolved_module")
                )
                for c in data.get("calls", [])
            ],
            parse_failures=data.get("parse_failures", 0),
            image_decode_failures=data.get("image_decode_failures", 0),
            scans=[ScanSummary.from_json(s) for s in data.get("scans", [])],
        )


def _bump(counter: dict[str, int], key: str, amount: int = 1) -> None:
    counter[key] = counter.get(key, 0) + amount


@dataclass
class CorpusReport:
    """Raw corpus tallies; derived views come from :meth:`to_json`."""

    n_notebooks: int = 0
    n_valid: int = 0
    n_language_filtered: int = 0
    mime_counts: dict[str, int] = field(default_factory=dict)
    images_per_notebook: dict[str, int] = field(default_factory=dict)
    tables_per_notebook: dict[str, int] = field(default_factory=dict)
    table_rows: dict[str, int] = field(default_factory=dict)
    table_cols: dict[str, int] = field(default_factory=dict)
    images_total: dict[str, int] = field(default_factory=dict)
    images_with_alt: dict[str, int] = field(default_factory=dict)
    alt_words: dict[str, int] = field(default_factory=dict)
    first_heading_counts: dict[str, int] = field(default_factory=dict)
    first_table_positions: dict[str, int] = field(default_factory=dict)
    n_image_cells: int = 0
    n_candidates: int = 0
    n_candidate_markdown: int = 0
    n_candidate_table: int = 0
    n_fully_supported: int = 0
    modules: dict[str, int] = field(default_factory=dict)
    call_targets: dict[str, int] = field(default_factory=dict)
    theme_error_hist: dict[str, dict[str, int]] = field(default_factory=dict)
    theme_warning_hist: dict[str, dict[str, int]] = field(default_factory=dict)
    rule_errors: dict[str, dict[str, int]] = field(default_factory=dict)
    size_risk_counts: dict[str, int] = field(default_factory=dict)

    # -- derived views -------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "n_notebooks": self.n_notebooks,
            "n_valid": self.n_valid,
            "n_language_filtered": self.n_language_filtered,
            "output_type_table": self._output_type_table(),
            "image_stats": self._image_stats(),
            "table_stats": self._table_stats(),
            "alt_coverage": self._alt_coverage(),
            "alt_word_freq": _ranked(self.alt_words),
            "heading_heatmap": self._heading_heatmap(),
            "first_table_positions": _int_key_rows(self.first_table_positions),
            "figure_context_summary": self._figure_context_summary(),
            "module_rank": self._module_rank(),
            "call_rank": self._call_rank(),
            "theme_error_stats": self._theme_stats(),
            "rule_heatmap": self._rule_heatmap(),
            "size_risk_counts": dict(sorted(self.size_risk_counts.items())),
            "raw": {
                "mime_counts": dict(sorted(self.mime_counts.items())),
                "images_per_notebook": dict(sorted(self.images_per_notebook.items())),
                "tables_per_notebook": dict(sorted(self.tables_per_notebook.items())),
                "table_rows": dict(sorted(self.table_rows.items())),
                "table_cols": dict(sorted(self.table_cols.items())),
                "images_total": dict(sorted(self.images_total.items())),
                "images_with_alt": dict(sorted(self.images_with_alt.items())),
                "alt_words": dict(sorted(self.alt_words.items())),
                "first_heading_counts": dict(sorted(self.first_heading_counts.items())),
                "first_table_positions": dict(sorted(self.first_table_positions.items())),
                "figure_context": {
                    "image_cells": self.n_image_cells,
                    "candidates": self.n_candidates,
                    "candidate_markdown": self.n_candidate_markdown,
                    "candidate_table": self.n_candidate_table,
                    "fully_supported": self.n_fully_supported,
                },
                "modules": dict(sorted(self.modules.items())),
                "call_targets": dict(sorted(self.call_targets.items())),
                "theme_error_hist": _sorted_nested(self.theme_error_hist),
                "theme_warning_hist": _sorted_nested(self.theme_warning_hist),
                "rule_errors": _sorted_nested(self.rule_errors),
            },
        }

    def _output_type_table(self) -> list[dict[str, Any]]:
        rows = []
        total_sum = sum(self.mime_counts.values())
        for mime, count in self.mime_counts.items():
            try:
                cls = classify_mime(mime)
                category, label = cls.category, cls.label
            except InvalidMime:
                category, label = "Application", "Other"
            rows.append((count, category, label, mime))
        rows.sort(key=lambda r: (-r[0], r[1], r[2], r[3]))
        table = []
        running = 0
        for rank, (count, category, label, mime) in enumerate(rows, 1):
            running += count
            table.append(
                {
                    "rank": rank,
                    "category": category,
                    "label": label,
                    "mime": mime,
                    "total": count,
                    "percent": round(count / total_sum * 100, 2) if total_sum else 0.0,
                    "cumulative": round(running / total_sum * 100, 2) if total_sum else 0.0,
                }
            )
        return table

    def _image_stats(self) -> dict[str, Any]:
        all_hist = {int(k): v for k, v in self.images_per_notebook.items()}
        bearing = {k: v for k, v in all_hist.items() if k >= 1}
        return {
            "all_notebooks": _hist_summary(all_hist),
            "image_bearing": _hist_summary(bearing),
        }

    def _table_stats(self) -> dict[str, Any]:
        all_hist = {int(k): v for k, v in self.tables_per_notebook.items()}
        bearing = {k: v for k, v in all_hist.items() if k >= 1}
        return {
            "all_notebooks": _hist_summary(all_hist),
            "table_bearing": _hist_summary(bearing),
            "rows": _hist_summary({int(k): v for k, v in self.table_rows.items()}),
            "cols": _hist_summary({int(k): v for k, v in self.table_cols.items()}),
        }

    def _alt_coverage(self) -> dict[str, Any]:
        total = sum(self.images_total.values())
        with_alt = sum(self.images_with_alt.values())
        out: dict[str, Any] = {
            "images": total,
            "with_alt": with_alt,
            "percent_with_alt": round(with_alt / total * 100, 2) if total else 0.0,
            "by_provenance": {},
        }
        for prov in sorted(set(self.images_total) | set(self.images_with_alt)):
            n = self.images_total.get(prov, 0)
            w = self.images_with_alt.get(prov, 0)
            out["by_provenance"][prov] = {
                "images": n,
                "with_alt": w,
                "percent_with_alt": round(w / n * 100, 2) if n else 0.0,
            }
        return out

    def _heading_heatmap(self) -> list[list[int]]:
        placements = [
            (int(k.split(":")[0]), int(k.split(":")[1]), v)
            for k, v in self.first_heading_counts.items()
        ]
        max_cell = max((cell for _, cell, _ in placements), default=0)
        matrix = [[0] * max_cell for _ in range(6)]
        for level, cell, count in placements:
            matrix[level - 1][cell - 1] += count
        return matrix

    def _figure_context_summary(self) -> dict[str, Any]:
        cells = self.n_image_cells
        cand = self.n_candidates
        return {
            "image_cells": cells,
            "candidates": cand,
            "candidate_markdown": self.n_candidate_markdown,
            "candidate_table": self.n_candidate_table,
            "fully_supported": self.n_fully_supported,
            "pct_candidates_of_image_cells": round(cand / cells * 100, 2) if cells else 0.0,
            "pct_markdown_of_candidates": round(self.n_candidate_markdown / cand * 100, 2) if cand else 0.0,
            "pct_table_of_candidates": round(self.n_candidate_table / cand * 100, 2) if cand else 0.0,
            "pct_fully_supported_of_candidates": round(self.n_fully_supported / cand * 100, 2) if cand else 0.0,
        }

    def _module_rank(self) -> dict[str, list[dict[str, Any]]]:
        stdlib = frozenset(sys.stdlib_module_names)
        no_std = {
            m: c
            for m, c in self.modules.items()
            if m.split(".", 1)[0] not in stdlib and not m.startswith(".")
        }
        return {
            "with_stdlib": _ranked(self.modules, key_name="module"),
            "without_stdlib": _ranked(no_std, key_name="module"),
        }

    def _call_rank(self) -> dict[str, list[dict[str, Any]]]:
        builtins = load_builtin_names()
        no_builtin = {
            t: c
            for t, c in self.call_targets.items()
            if "." in t or t not in builtins
        }
        return {
            "with_builtins": _ranked(self.call_targets, key_name="target"),
            "without_builtins": _ranked(no_builtin, key_name="target"),
        }

    def _theme_stats(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        themes = sorted(set(self.theme_error_hist) | set(self.theme_warning_hist))
        for theme in themes:
            out[theme] = {
                "errors": _hist_distribution(self.theme_error_hist.get(theme, {})),
                "warnings": _hist_distribution(self.theme_warning_hist.get(theme, {})),
            }
        return out

    def _rule_heatmap(self) -> dict[str, dict[str, float]]:
        rules = sorted({r for counts in self.rule_errors.values() for r in counts})
        heatmap: dict[str, dict[str, float]] = {}
        for rule in rules:
            peak = max((c.get(rule, 0) for c in self.rule_errors.values()), default=0)
            for theme in sorted(self.rule_errors):
                value = self.rule_errors[theme].get(rule, 0)
                heatmap.setdefault(theme, {})[rule] = (
                    round(value / peak, 4) if peak else 0.0
                )
        return heatmap


def _sorted_nested(data: dict[str, dict[str, int]]) -> dict[str, dict[str, int]]:
    return {k: dict(sorted(v.items())) for k, v in sorted(data.items())}


def _ranked(counts: dict[str, int], key_name: str = "token") -> list[dict[str, Any]]:
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [
        {"rank": i, key_name: name, "count": count}
        for i, (name, count) in enumerate(ordered, 1)
    ]


def _int_key_rows(counts: dict[str, int]) -> list[list[int]]:
    return [[int(k), v] for k, v in sorted(counts.items(), key=lambda kv: int(kv[0]))]


def _hist_summary(hist: dict[int, int]) -> dict[str, Any]:
    # All folds run over value-sorted items so float accumulation order is
    # canonical; merged and directly-aggregated reports stay bit-identical.
    ordered = sorted(hist.items())
    n = sum(count for _, count in ordered)
    if n == 0:
        return {"count": 0, "mean": 0.0, "median": 0.0, "cdf": []}
    total = sum(value * count for value, count in ordered)
    mean = total / n
    # median with midpoint convention for even counts
    def value_at(index: int) -> int:
        seen = 0
        for value, count in ordered:
            seen += count
            if index < seen:
                return value
        return ordered[-1][0]

    if n % 2 == 1:
        median = float(value_at(n // 2))
    else:
        median = (value_at(n // 2 - 1) + value_at(n // 2)) / 2
    cdf = []
    seen = 0
    for value, count in ordered:
        seen += count
        cdf.append([value, seen / n])
    return {"count": n, "mean": mean, "median": median, "cdf": cdf}


def _hist_distribution(hist: dict[str, int]) -> dict[str, Any]:
    ordered = sorted((int(k), v) for k, v in hist.items())
    n = sum(c for _, c in ordered)
    if n == 0:
        return {"documents": 0, "mean": 0.0, "stddev": 0.0, "cdf": []}
    total = sum(v * c for v, c in ordered)
    mean = total / n
    sq = sum((v - mean) ** 2 * c for v, c in ordered)
    summary = _hist_summary(dict(ordered))
    return {
        "documents": n,
        "mean": mean,
        "stddev": math.sqrt(sq / n),
        "cdf": summary["cdf"],
    }


def aggregate(records: Iterable[AuditRecord]) -> CorpusReport:
    """Fold per-notebook records into corpus tallies."""
    report = CorpusReport()
    for record in records:
        report.n_notebooks += 1
        if record.status == STATUS_INVALID:
            continue
        report.n_valid += 1
        if record.status != STATUS_OK:
            continue
        report.n_language_filtered += 1
        for mime, count in record.mime_counts.items():
            _bump(report.mime_counts, mime, count)
        metrics = record.metrics
        if metrics is not None:
            _bump(report.images_per_notebook, str(metrics.n_images_programmatic))
            _bump(report.tables_per_notebook, str(metrics.n_tables))
            for rows, cols in metrics.table_shapes:
                _bump(report.table_rows, str(rows))
                _bump(report.table_cols, str(cols))
            _bump(report.images_total, "programmatic", metrics.n_images_programmatic)
            _bump(report.images_total, "markdown", metrics.n_images_markdown)
            _bump(report.images_with_alt, "programmatic", metrics.n_images_with_alt_programmatic)
            _bump(report.images_with_alt, "markdown", metrics.n_images_with_alt_markdown)
            for token, count in metrics.alt_words.items():
                _bump(report.alt_words, token, count)
            if metrics.first_heading is not None:
                level, cell = metrics.first_heading
                _bump(report.first_heading_counts, f"{level}:{cell}")
            if metrics.first_table_cell is not None:
                _bump(report.first_table_positions, str(metrics.first_table_cell))
            for flags in metrics.figure_context:
                report.n_image_cells += 1
                if flags.candidate:
                    report.n_candidates += 1
                    if flags.has_markdown_neighbor:
                        report.n_candidate_markdown += 1
                    if flags.has_table_neighbor:
                        report.n_candidate_table += 1
                if flags.fully_supported:
                    report.n_fully_supported += 1
            _bump(report.size_risk_counts, metrics.size_risk)
        for imp in record.imports:
            _bump(report.modules, imp.module)
        for call in record.calls:
            _bump(report.call_targets, call.target)
        for summary in record.scans:
            _bump(
                report.theme_error_hist.setdefault(summary.theme, {}),
                str(summary.error_count),
            )
            _bump(
                report.theme_warning_hist.setdefault(summary.theme, {}),
                str(summary.warning_count),
            )
            bucket = report.rule_errors.setdefault(summary.theme, {})
            for rule, count in summary.rule_errors.items():
                _bump(bucket, rule, count)
    return report


def _merge_counts(a: dict[str, int], b: dict[str, int]) -> dict[str, int]:
    out = dict(a)
    for key, value in b.items():
        out[key] = out.get(key, 0) + value
    return out


def merge(a: CorpusReport, b: CorpusReport) -> CorpusReport:
    """Combine two corpus reports over disjoint corpora."""
    merged = CorpusReport(
        n_notebooks=a.n_notebooks + b.n_notebooks,
        n_valid=a.n_valid + b.n_valid,
        n_language_filtered=a.n_language_filtered + b.n_language_filtered,
        mime_counts=_merge_counts(a.mime_counts, b.mime_counts),
        images_per_notebook=_merge_counts(a.images_per_notebook, b.images_per_notebook),
        tables_per_notebook=_merge_counts(a.tables_per_notebook, b.tables_per_notebook),
        table_rows=_merge_counts(a.table_rows, b.table_rows),
        table_cols=_merge_counts(a.table_cols, b.table_cols),
        images_total=_merge_counts(a.images_total, b.images_total),
        images_with_alt=_merge_counts(a.images_with_alt, b.images_with_alt),
        alt_words=_merge_counts(a.alt_words, b.alt_words),
        first_heading_counts=_merge_counts(a.first_heading_counts, b.first_heading_counts),
        first_table_positions=_merge_counts(a.first_table_positions, b.first_table_positions),
        n_image_cells=a.n_image_cells + b.n_image_cells,
        n_candidates=a.n_candidates + b.n_candidates,
        n_candidate_markdown=a.n_candidate_markdown + b.n_candidate_markdown,
        n_candidate_table=a.n_candidate_table + b.n_candidate_table,
        n_fully_supported=a.n_fully_supported + b.n_fully_supported,
        modules=_merge_counts(a.modules, b.modules),
        call_targets=_merge_counts(a.call_targets, b.call_targets),
        size_risk_counts=_merge_counts(a.size_risk_counts, b.size_risk_counts),
    )
    for source in (a, b):
        for theme, hist in source.theme_error_hist.items():
            merged.theme_error_hist[theme] = _merge_counts(
                merged.theme_error_hist.get(theme, {}), hist
            )
        for theme, hist in source.theme_warning_hist.items():
            merged.theme_warning_hist[theme] = _merge_counts(
                merged.theme_warning_hist.get(theme, {}), hist
            )
        for theme, counts in source.rule_errors.items():
            merged.rule_errors[theme] = _merge_counts(
                merged.rule_errors.get(theme, {}), counts
            )
    return merged


# -- emission ----------------------------------------------------------------

def report_json_text(report: CorpusReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def _write_csv(path: Path, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(list(row))


def _emit_csvs(data: dict[str, Any], csv_dir: Path) -> list[Path]:
    csv_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def out(name: str, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
        path = csv_dir / name
        _write_csv(path, header, rows)
        written.append(path)

    out(
        "output_types.csv",
        ["rank", "category", "label", "mime", "total", "percent", "cumulative"],
        (
            [r["rank"], r["category"], r["label"], r["mime"], r["total"], r["percent"], r["cumulative"]]
            for r in data["output_type_table"]
        ),
    )
    out(
        "alt_words.csv",
        ["rank", "token", "count"],
        ([r["rank"], r["token"], r["count"]] for r in data["alt_word_freq"]),
    )
    out(
        "alt_coverage.csv",
        ["provenance", "images", "with_alt", "percent_with_alt"],
        (
            [prov, row["images"], row["with_alt"], row["percent_with_alt"]]
            for prov, row in data["alt_coverage"]["by_provenance"].items()
        ),
    )
    heatmap = data["heading_heatmap"]
    width = len(heatmap[0]) if heatmap and heatmap[0] else 0
    out(
        "heading_heatmap.csv",
        ["level"] + [f"cell_{c}" for c in range(1, width + 1)],
        ([f"h{level}"] + row for level, row in enumerate(heatmap, 1)),
    )
    out(
        "first_table_positions.csv",
        ["cell_index", "notebooks"],
        data["first_table_positions"],
    )
    out(
        "figure_context.csv",
        ["measure", "value"],
        sorted(data["figure_context_summary"].items()),
    )
    out(
        "module_rank.csv",
        ["rank", "module", "count"],
        ([r["rank"], r["module"], r["count"]] for r in data["module_rank"]["with_stdlib"]),
    )
    out(
        "module_rank_no_stdlib.csv",
        ["rank", "module", "count"],
        ([r["rank"], r["module"], r["count"]] for r in data["module_rank"]["without_stdlib"]),
    )
    out(
        "call_rank.csv",
        ["rank", "target", "count"],
        ([r["rank"], r["target"], r["count"]] for r in data["call_rank"]["with_builtins"]),
    )
    out(
        "call_rank_no_builtins.csv",
        ["rank", "target", "count"],
        ([r["rank"], r["target"], r["count"]] for r in data["call_rank"]["without_builtins"]),
    )
    out(
        "theme_errors.csv",
        ["theme", "documents", "error_mean", "error_stddev", "warning_mean", "warning_stddev"],
        (
            [
                theme,
                stats["errors"]["documents"],
                round(stats["errors"]["mean"], 4),
                round(stats["errors"]["stddev"], 4),
                round(stats["warnings"]["mean"], 4),
                round(stats["warnings"]["stddev"], 4),
            ]
            for theme, stats in data["theme_error_stats"].items()
        ),
    )
    rules = sorted({r for cells in data["rule_heatmap"].values() for r in cells})
    out(
        "rule_heatmap.csv",
        ["theme"] + rules,
        (
            [theme] + [data["rule_heatmap"][theme].get(rule, 0.0) for rule in rules]
            for theme in sorted(data["rule_heatmap"])
        ),
    )
    out(
        "size_risk.csv",
        ["band", "notebooks"],
        sorted(data["size_risk_counts"].items()),
    )
    cdf_rows: list[list[Any]] = []
    for population in ("all_notebooks", "image_bearing"):
        for value, fraction in data["image_stats"][population]["cdf"]:
            cdf_rows.append([population, value, fraction])
    out("image_cdf.csv", ["population", "value", "cumulative_fraction"], cdf_rows)
    cdf_rows = []
    for population in ("all_notebooks", "table_bearing", "rows", "cols"):
        for value, fraction in data["table_stats"][population]["cdf"]:
            cdf_rows.append([population, value, fraction])
    out("table_cdf.csv", ["population", "value", "cumulative_fraction"], cdf_rows)
    return written


_PAGE_BG = "#ffffff"
_PAGE_FG = "#111111"
_BORDER = "#767676"
_HEADER_BG = "#e8e8e8"


def _esc(value: Any) -> str:
    return _html.escape(str(value), quote=True)


def _html_table(headers: list[str], rows: list[list[Any]], caption: str) -> str:
    th_style = (
        f"background-color:{_HEADER_BG};border:1px solid {_BORDER};"
        "padding:4px;text-align:left"
    )
    td_style = f"border:1px solid {_BORDER};padding:4px"
    parts = [
        f'<table style="border-collapse:collapse;border:1px solid {_BORDER};margin:8px 0">',
        f"<caption>{_esc(caption)}</caption>",
        "<thead><tr>"
        + "".join(f'<th scope="col" style="{th_style}">{_esc(h)}</th>' for h in headers)
        + "</tr></thead>",
        "<tbody>",
    ]
    for row in rows:
        parts.append(
            "<tr>" + "".join(f'<td style="{td_style}">{_esc(v)}</td>' for v in row) + "</tr>"
        )
    parts.append("</tbody></table>")
    return "".join(parts)


def report_html_text(report: CorpusReport) -> str:
    """Static, script-free summary page.

    The page is held to the same bar as the scanned corpus: it must pass
    this package's own rule engine with zero findings under the light
    theme (landmark container, headings, scoped table headers, no missing
    alt, no color-only cues).
    """
    data = report.to_json()
    sections: list[str] = []

    sections.append(
        _html_table(
            ["measure", "value"],
            [
                ["notebooks scanned", data["n_notebooks"]],
                ["valid notebooks", data["n_valid"]],
                ["after language filter", data["n_language_filtered"]],
            ],
            "Corpus funnel",
        )
    )

    top_outputs = data["output_type_table"][:10]
    sections.append("<h2>Output types</h2>")
    sections.append(
        _html_table(
            ["rank", "category", "label", "total", "percent", "cumulative"],
            [
                [r["rank"], r["category"], r["label"], r["total"], f"{r['percent']:.2f}", f"{r['cumulative']:.2f}"]
                for r in top_outputs
            ],
            "Most frequent output types",
        )
    )

    alt = data["alt_coverage"]
    alt_rows = [["all", alt["images"], alt["with_alt"], f"{alt['percent_with_alt']:.2f}"]]
    for prov, row in alt["by_provenance"].items():
        alt_rows.append([prov, row["images"], row["with_alt"], f"{row['percent_with_alt']:.2f}"])
    sections.append("<h2>Image alt coverage</h2>")
    sections.append(
        _html_table(["provenance", "images", "with alt", "percent"], alt_rows, "Alt text coverage")
    )
    top_words = data["alt_word_freq"][:20]
    if top_words:
        sections.append(
            _html_table(
                ["rank", "token", "count"],
                [[r["rank"], r["token"], r["count"]] for r in top_words],
                "Most frequent alt-text words",
            )
        )

    sections.append("<h2>Figure context</h2>")
    fig = data["figure_context_summary"]
    sections.append(
        _html_table(
            ["measure", "value"],
            [[k, v] for k, v in fig.items()],
            "Code cells with image outputs and their neighborhood",
        )
    )

    sections.append("<h2>Navigability</h2>")
    heatmap = data["heading_heatmap"]
    width = len(heatmap[0]) if heatmap and heatmap[0] else 0
    if width:
        shown = min(width, 10)
        sections.append(
            _html_table(
                ["level"] + [f"cell {c}" for c in range(1, shown + 1)],
                [[f"h{level}"] + row[:shown] for level, row in enumerate(heatmap, 1)],
                "Notebooks by first heading level and cell position",
            )
        )
    else:
        sections.append("<p>No headings were found in the corpus.</p>")
    table_stats = data["table_stats"]
    sections.append(
        _html_table(
            ["population", "count", "mean", "median"],
            [
                [
                    name,
                    table_stats[name]["count"],
                    f"{table_stats[name]['mean']:.2f}",
                    f"{table_stats[name]['median']:.2f}",
                ]
                for name in ("all_notebooks", "table_bearing", "rows", "cols")
            ],
            "Table prevalence and shape",
        )
    )

    sections.append("<h2>Code usage</h2>")
    sections.append(
        _html_table(
            ["rank", "module", "count"],
            [
                [r["rank"], r["module"], r["count"]]
                for r in data["module_rank"]["with_stdlib"][:10]
            ],
            "Most imported modules",
        )
    )
    sections.append(
        _html_table(
            ["rank", "call target", "count"],
            [
                [r["rank"], r["target"], r["count"]]
                for r in data["call_rank"]["without_builtins"][:10]
            ],
            "Most invoked calls (excluding built-ins)",
        )
    )

    sections.append("<h2>Theme accessibility</h2>")
    theme_stats = data["theme_error_stats"]
    if theme_stats:
        sections.append(
            _html_table(
                ["theme", "documents", "mean errors", "stddev", "mean warnings"],
                [
                    [
                        theme,
                        stats["errors"]["documents"],
                        f"{stats['errors']['mean']:.2f}",
                        f"{stats['errors']['stddev']:.2f}",
                        f"{stats['warnings']['mean']:.2f}",
                    ]
                    for theme, stats in theme_stats.items()
                ],
                "Accessibility errors by theme",
            )
        )
        rules = sorted({r for cells in data["rule_heatmap"].values() for r in cells})
        if rules:
            sections.append(
                _html_table(
                    ["theme"] + rules,
                    [
                        [theme] + [f"{data['rule_heatmap'][theme].get(rule, 0.0):.2f}" for rule in rules]
                        for theme in sorted(data["rule_heatmap"])
                    ],
                    "Per-rule error counts normalized by the per-rule maximum",
                )
            )
    else:
        sections.append("<p>No accessibility scans were recorded.</p>")

    sections.append("<h2>Size risk</h2>")
    sections.append(
        _html_table(
            ["band", "notebooks"],
            sorted(data["size_risk_counts"].items()),
            "Screen reader crash-risk bands by on-disk size",
        )
    )

    body = "\n".join(sections)
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8"/>
<meta name="viewport" content="width=device-width, initial-scale=1"/>
<title>Notebook accessibility audit report</title>
</head>
<body style="background-color:{_PAGE_BG};color:{_PAGE_FG};font-family:sans-serif;margin:16px">
<main>
<h1>Notebook accessibility audit report</h1>
{body}
</main>
</body>
</html>
"""


def emit(
    report: CorpusReport,
    out_dir: Path,
    formats: Iterable[str] = ("json", "csv", "html"),
) -> list[Path]:
    """Write the selected report formats; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = set(formats)
    written: list[Path] = []
    if "json" in formats:
        path = out_dir / "report.json"
        path.write_text(report_json_text(report), encoding="utf-8")
        written.append(path)
    if "csv" in formats:
        written.extend(_emit_csvs(report.to_json(), out_dir / "csv"))
    if "html" in formats:
        path = out_dir / "report.html"
        path.write_text(report_html_text(report), encoding="utf-8")
        written.append(path)
    return written
