"""Per-notebook accessibility metrics.

Everything here is an optimistic upper bound: presence of a feature counts,
quality does not. Headings and tables are detected on rendered markdown
semantics and on HTML-bearing outputs, mirroring what assistive technology
can actually navigate; commented-out pipe characters in code cells do not
count. All functions are pure, so per-notebook work parallelizes freely.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple

from . import nbmodel
from .dom import Element
from .mdrender import markdown_dom
from .nbmodel import Cell, ImageArtifact, Notebook

OK = "ok"
DEGRADED = "degraded"
CRASH_RISK = "crash_risk"


class SizeThresholds(NamedTuple):
    """Byte thresholds for screen-reader risk bands.

    Defaults: the smallest observed notebook that was functional but not
    fully glanceable (degraded) and the smallest that crashed screen
    readers or browser tabs outright (crash).
    """

    degraded: int = 721_056
    crash: int = 10_955_553


DEFAULT_SIZE_THRESHOLDS = SizeThresholds()


@dataclass
class FigureContextFlags:
    """Adjacency context of one code cell with image output."""

    cell_index: int
    candidate: bool  # no heading in the cell immediately after
    has_markdown_neighbor: bool
    has_table_neighbor: bool
    fully_supported: bool


@dataclass
class NotebookMetrics:
    path: str
    n_code_cells: int
    n_markdown_cells: int
    n_images: int
    n_images_programmatic: int
    n_images_markdown: int
    n_images_with_alt: int
    n_images_with_alt_programmatic: int
    n_images_with_alt_markdown: int
    alt_words: dict[str, int]
    n_tables: int
    table_shapes: list[tuple[int, int]]
    first_heading: tuple[int, int] | None  # (level, 1-based cell index)
    first_table_cell: int | None
    heading_census: dict[int, int]
    n_links: int
    figure_context: list[FigureContextFlags]
    size_bytes: int
    size_risk: str

    def to_json(self) -> dict[str, Any]:
        return {
            "path": self.path,
            "n_code_cells": self.n_code_cells,
            "n_markdown_cells": self.n_markdown_cells,
            "n_images": self.n_images,
            "n_images_programmatic": self.n_images_programmatic,
            "n_images_markdown": self.n_images_markdown,
            "n_images_with_alt": self.n_images_with_alt,
            "n_images_with_alt_programmatic": self.n_images_with_alt_programmatic,
            "n_images_with_alt_markdown": self.n_images_with_alt_markdown,
            "alt_words": dict(sorted(self.alt_words.items())),
            "n_tables": self.n_tables,
            "table_shapes": [list(s) for s in self.table_shapes],
            "first_heading": list(self.first_heading) if self.first_heading else None,
            "first_table_cell": self.first_table_cell,
            "heading_census": {str(k): v for k, v in sorted(self.heading_census.items())},
            "n_links": self.n_links,
            "figure_context": [
                {
                    "cell_index": f.cell_index,
                    "candidate": f.candidate,
                    "has_markdown_neighbor": f.has_markdown_neighbor,
                    "has_table_neighbor": f.has_table_neighbor,
                    "fully_supported": f.fully_supported,
                }
                for f in self.figure_context
            ],
            "size_bytes": self.size_bytes,
            "size_risk": self.size_risk,
        }


@dataclass
class AltStats:
    n_images: int = 0
    n_with_alt: int = 0
    by_provenance: dict[str, int] = field(default_factory=dict)
    with_alt_by_provenance: dict[str, int] = field(default_factory=dict)
    alt_words: Counter = field(default_factory=Counter)


_HEADING_TAGS = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}
_WORD = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize_alt(text: str) -> list[str]:
    """Lowercased word tokens of an alt string (word-cloud input)."""
    return _WORD.findall(text.lower())


def _table_shape(table: Element) -> tuple[int, int]:
    rows = 0
    cols = 0
    for tr in table.find_all("tr"):
        owner = next((a for a in tr.ancestors() if a.tag == "table"), None)
        if owner is not table:
            continue
        rows += 1
        n_cells = 0
        for cell in tr.iter_elements():
            if cell.tag in ("td", "th"):
                owner_row = next((a for a in cell.ancestors() if a.tag == "tr"), None)
                if owner_row is tr:
                    n_cells += 1
        cols = max(cols, n_cells)
    return rows, cols


def _dom_tables(root: Element) -> list[tuple[int, int]]:
    return [_table_shape(t) for t in root.find_all("table")]


@dataclass
class _CellView:
    headings: list[int] = field(default_factory=list)
    tables: list[tuple[int, int]] = field(default_factory=list)
    links: int = 0
    has_image_output: bool = False


def _view_cell(cell: Cell) -> _CellView:
    view = _CellView()
    if cell.kind == nbmodel.MARKDOWN:
        root = markdown_dom(cell.source)
        for el in root.iter_elements():
            level = _HEADING_TAGS.get(el.tag)
            if level:
                view.headings.append(level)
            elif el.tag == "a":
                view.links += 1
        view.tables = _dom_tables(root)
    elif cell.kind == nbmodel.CODE:
        for bundle in cell.outputs:
            for mime in bundle.mime_payloads:
                if mime in nbmodel.IMAGE_MIMES:
                    view.has_image_output = True
            html = bundle.mime_payloads.get("text/html")
            if html:
                from .dom import parse_html

                root = parse_html(html)
                view.tables.extend(_dom_tables(root))
                view.links += len(root.find_all("a"))
    return view


def _cell_views(nb: Notebook) -> list[_CellView]:
    return [_view_cell(cell) for cell in nb.cells]


def heading_metrics(nb: Notebook) -> tuple[tuple[int, int] | None, dict[int, int]]:
    """First heading (level, cell index) and census of headings by level.

    Headings are taken from rendered markdown cells: ATX and setext
    syntax plus raw ``<h1>``-``<h6>`` tags all land in the rendered tree.
    """
    views = _cell_views(nb)
    return _heading_metrics_from_views(nb, views)


def _heading_metrics_from_views(
    nb: Notebook, views: list[_CellView]
) -> tuple[tuple[int, int] | None, dict[int, int]]:
    first: tuple[int, int] | None = None
    census: dict[int, int] = {}
    for cell, view in zip(nb.cells, views):
        for level in view.headings:
            census[level] = census.get(level, 0) + 1
            if first is None:
                first = (level, cell.index)
    return first, census


def table_metrics(
    nb: Notebook,
) -> tuple[int, list[tuple[int, int]], int | None]:
    """Table count, shapes (rows incl. header, max columns), first cell."""
    views = _cell_views(nb)
    return _table_metrics_from_views(nb, views)


def _table_metrics_from_views(
    nb: Notebook, views: list[_CellView]
) -> tuple[int, list[tuple[int, int]], int | None]:
    shapes: list[tuple[int, int]] = []
    first_cell: int | None = None
    for cell, view in zip(nb.cells, views):
        if view.tables and first_cell is None:
            first_cell = cell.index
        shapes.extend(view.tables)
    return len(shapes), shapes, first_cell


def alt_metrics(images: Iterable[ImageArtifact]) -> AltStats:
    """Alt coverage and alt-word multiset, split by provenance."""
    stats = AltStats(
        by_provenance={nbmodel.PROGRAMMATIC: 0, nbmodel.MARKDOWN_SOURCE: 0},
        with_alt_by_provenance={nbmodel.PROGRAMMATIC: 0, nbmodel.MARKDOWN_SOURCE: 0},
    )
    for image in images:
        stats.n_images += 1
        stats.by_provenance[image.provenance] = (
            stats.by_provenance.get(image.provenance, 0) + 1
        )
        if image.alt_text is not None and image.alt_text.strip():
            stats.n_with_alt += 1
            stats.with_alt_by_provenance[image.provenance] = (
                stats.with_alt_by_provenance.get(image.provenance, 0) + 1
            )
            stats.alt_words.update(tokenize_alt(image.alt_text))
    return stats


def figure_context(nb: Notebook) -> list[FigureContextFlags]:
    """Adjacency flags for every code cell with at least one image output.

    A cell is a candidate when the next cell in document order contains no
    heading (missing neighbors never match); markdown/table neighbors look
    one cell in each direction.
    """
    views = _cell_views(nb)
    return _figure_context_from_views(nb, views)


def _figure_context_from_views(
    nb: Notebook, views: list[_CellView]
) -> list[FigureContextFlags]:
    flags: list[FigureContextFlags] = []
    for pos, (cell, view) in enumerate(zip(nb.cells, views)):
        if not view.has_image_output:
            continue
        nxt = views[pos + 1] if pos + 1 < len(views) else None
        prv = views[pos - 1] if pos > 0 else None
        candidate = nxt is None or not nxt.headings
        has_md = bool(
            (pos > 0 and nb.cells[pos - 1].kind == nbmodel.MARKDOWN)
            or (pos + 1 < len(nb.cells) and nb.cells[pos + 1].kind == nbmodel.MARKDOWN)
        )
        has_table = bool((prv and prv.tables) or (nxt and nxt.tables))
        flags.append(
            FigureContextFlags(
                cell_index=cell.index,
                candidate=candidate,
                has_markdown_neighbor=has_md,
                has_table_neighbor=has_table,
                fully_supported=candidate and has_md and has_table,
            )
        )
    return flags


def size_risk(
    size_bytes: int, thresholds: SizeThresholds = DEFAULT_SIZE_THRESHOLDS
) -> str:
    """Risk band for a notebook of the given on-disk size."""
    if size_bytes >= thresholds.crash:
        return CRASH_RISK
    if size_bytes >= thresholds.degraded:
        return DEGRADED
    return OK


def heading_heatmap(
    first_headings: Iterable[tuple[int, int] | None],
) -> list[list[int]]:
    """Matrix[level 1-6][cell 1-N] counting notebooks by first heading.

    Row l-1, column c-1 holds the number of notebooks whose first heading
    is level l in cell c. N is the largest observed cell index; an empty
    corpus yields six empty rows.
    """
    placements = [fh for fh in first_headings if fh is not None]
    max_cell = max((cell for _, cell in placements), default=0)
    matrix = [[0] * max_cell for _ in range(6)]
    for level, cell in placements:
        matrix[level - 1][cell - 1] += 1
    return matrix


def compute_metrics(
    nb: Notebook,
    images: list[ImageArtifact] | None = None,
    thresholds: SizeThresholds = DEFAULT_SIZE_THRESHOLDS,
) -> NotebookMetrics:
    """Assemble the full per-notebook metric record."""
    if images is None:
        images, _ = nbmodel.extract_images(nb)
    views = _cell_views(nb)
    first_heading, census = _heading_metrics_from_views(nb, views)
    n_tables, shapes, first_table = _table_metrics_from_views(nb, views)
    alt = alt_metrics(images)
    flags = _figure_context_from_views(nb, views)
    return NotebookMetrics(
        path=nb.path,
        n_code_cells=sum(1 for c in nb.cells if c.kind == nbmodel.CODE),
        n_markdown_cells=sum(1 for c in nb.cells if c.kind == nbmodel.MARKDOWN),
        n_images=alt.n_images,
        n_images_programmatic=alt.by_provenance.get(nbmodel.PROGRAMMATIC, 0),
        n_images_markdown=alt.by_provenance.get(nbmodel.MARKDOWN_SOURCE, 0),
        n_images_with_alt=alt.n_with_alt,
        n_images_with_alt_programmatic=alt.with_alt_by_provenance.get(
            nbmodel.PROGRAMMATIC, 0
        ),
        n_images_with_alt_markdown=alt.with_alt_by_provenance.get(
            nbmodel.MARKDOWN_SOURCE, 0
        ),
        alt_words=dict(alt.alt_words),
        n_tables=n_tables,
        table_shapes=shapes,
        first_heading=first_heading,
        first_table_cell=first_table,
        heading_census=census,
        n_links=sum(v.links for v in views),
        figure_context=flags,
        size_bytes=nb.raw_size_bytes,
        size_risk=size_risk(nb.raw_size_bytes, thresholds),
    )


def load_size_thresholds(path) -> SizeThresholds:
    """Read thresholds from a JSON object or ``key = value`` lines.

    Recognized keys: ``degraded`` and ``crash``.
    """
    text = open(path, "r", encoding="utf-8").read()
    values: dict[str, int] = {}
    try:
        data = json.loads(text)
        if isinstance(data, dict):
            values = {str(k): int(v) for k, v in data.items()}
    except json.JSONDecodeError:
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if "=" in line:
                key, _, value = line.partition("=")
                values[key.strip()] = int(value.strip())
    return SizeThresholds(
        degraded=values.get("degraded", DEFAULT_SIZE_THRESHOLDS.degraded),
        crash=values.get("crash", DEFAULT_SIZE_THRESHOLDS.crash),
    )


def parse_thresholds_arg(arg: str) -> SizeThresholds:
    """Parse the ``DEGRADED,CRASH`` command-line form."""
    parts = [p.strip() for p in arg.split(",")]
    if len(parts) != 2:
        raise ValueError("expected two comma-separated byte counts")
    degraded, crash = int(parts[0]), int(parts[1])
    if not 0 < degraded < crash:
        raise ValueError("thresholds must satisfy 0 < degraded < crash")
    return SizeThresholds(degraded, crash)
