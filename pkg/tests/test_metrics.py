from __future__ import annotations

import random

from conftest import (
    code_cell,
    html_output,
    html_table,
    md_cell,
    notebook_bytes,
    pipe_table,
    png_output,
    raw_cell,
    text_output,
)
from nbaudit.metrics import (
    SizeThresholds,
    alt_metrics,
    compute_metrics,
    figure_context,
    heading_heatmap,
    heading_metrics,
    load_size_thresholds,
    parse_thresholds_arg,
    size_risk,
    table_metrics,
    tokenize_alt,
)
from nbaudit.nbmodel import ImageArtifact, extract_images, parse_notebook


def _nb(cells, name="nb.ipynb"):
    return parse_notebook(notebook_bytes(cells), name)


def test_first_heading_h1_cell1():
    nb = _nb([md_cell("# Title"), code_cell("x = 1")])
    first, census = heading_metrics(nb)
    assert first == (1, 1)
    assert census == {1: 1}


def test_no_markdown_no_heading():
    nb = _nb([code_cell("x = 1")])
    first, census = heading_metrics(nb)
    assert first is None and census == {}


def test_first_heading_later_cell_linear_scan_oracle():
    nb = _nb([code_cell("x"), md_cell("## x"), md_cell("# z")])
    first, census = heading_metrics(nb)
    # oracle: scan rendered cells linearly for the first hN tag
    from nbaudit.mdrender import render_markdown
    import re

    expected = None
    for cell in nb.cells:
        if cell.kind != "markdown":
            continue
        match = re.search(r"<h([1-6])", render_markdown(cell.source))
        if match:
            expected = (int(match.group(1)), cell.index)
            break
    assert first == expected == (2, 2)
    assert census == {1: 1, 2: 1}


def test_setext_and_raw_html_headings():
    nb = _nb([md_cell("Overview\n========"), md_cell("<h3>raw heading</h3>")])
    first, census = heading_metrics(nb)
    assert first == (1, 1)
    assert census == {1: 1, 3: 1}


def test_html_table_shape_head_style():
    nb = _nb([code_cell("df.head()", [html_output(html_table(6, 4))])])
    n, shapes, first_cell = table_metrics(nb)
    assert n == 1
    assert shapes == [(6, 4)]
    assert first_cell == 1


def test_no_tables():
    nb = _nb([md_cell("plain"), code_cell("x", [text_output()])])
    assert table_metrics(nb) == (0, [], None)


def test_markdown_pipe_table_shape_against_dom_walk():
    nb = _nb([md_cell(pipe_table(3, 2))])
    n, shapes, first_cell = table_metrics(nb)
    assert (n, first_cell) == (1, 1)
    # independent walk of the rendered fragment
    from nbaudit.mdrender import markdown_dom

    root = markdown_dom(nb.cells[0].source)
    trs = root.find_all("tr")
    expected_rows = len(trs)
    expected_cols = max(len(tr.find_all("td")) + len(tr.find_all("th")) for tr in trs)
    assert shapes == [(expected_rows, expected_cols)] == [(3, 2)]


def test_tables_in_code_source_ignored():
    nb = _nb([code_cell("# | a | b |\n# |---|---|\nx = 1")])
    assert table_metrics(nb)[0] == 0


def test_alt_metrics_none_with_alt():
    images = [
        ImageArtifact("p", 1, "PNG", b"x", "programmatic", None),
        ImageArtifact("p", 2, "PNG", b"x", "programmatic", None),
        ImageArtifact("p", 3, "PNG", b"x", "programmatic", None),
    ]
    stats = alt_metrics(images)
    assert (stats.n_images, stats.n_with_alt) == (3, 0)
    assert stats.alt_words == {}


def test_alt_metrics_tokens():
    images = [ImageArtifact("p", 1, "SVG", b"", "markdown", "Open In Colab")]
    stats = alt_metrics(images)
    assert stats.n_with_alt == 1
    assert dict(stats.alt_words) == {"open": 1, "in": 1, "colab": 1}


def test_alt_metrics_empty_list():
    stats = alt_metrics([])
    assert (stats.n_images, stats.n_with_alt) == (0, 0)
    assert dict(stats.alt_words) == {}


def test_alt_coverage_split_sums_to_total():
    images = [
        ImageArtifact("p", 1, "PNG", b"x", "programmatic", "chart"),
        ImageArtifact("p", 2, "PNG", b"", "markdown", "badge"),
        ImageArtifact("p", 3, "PNG", b"x", "programmatic", None),
        ImageArtifact("p", 4, "PNG", b"", "markdown", "  "),
    ]
    stats = alt_metrics(images)
    assert stats.n_with_alt == sum(stats.with_alt_by_provenance.values()) == 2
    assert stats.n_images == sum(stats.by_provenance.values()) == 4


def test_tokenize_alt():
    assert tokenize_alt("Open In Colab") == ["open", "in", "colab"]
    assert tokenize_alt("PNG, alt-text!") == ["png", "alt", "text"]
    assert tokenize_alt("") == []


def test_figure_context_table_neighbor():
    nb = _nb([code_cell("plot()", [png_output()]), md_cell(pipe_table(2, 2))])
    flags = figure_context(nb)
    assert len(flags) == 1
    f = flags[0]
    assert f.cell_index == 1
    assert f.candidate is True
    assert f.has_markdown_neighbor is True
    assert f.has_table_neighbor is True
    assert f.fully_supported is True


def test_figure_context_heading_after_disqualifies():
    nb = _nb([code_cell("plot()", [png_output()]), md_cell("## next section")])
    f = figure_context(nb)[0]
    assert f.candidate is False
    assert f.has_markdown_neighbor is True
    assert f.fully_supported is False


def test_figure_context_boundary_cells():
    nb = _nb([code_cell("plot()", [png_output()])])
    f = figure_context(nb)[0]
    assert f.candidate is True  # no next cell, so no heading after
    assert f.has_markdown_neighbor is False
    assert f.has_table_neighbor is False


def test_figure_context_only_image_cells_listed():
    nb = _nb([code_cell("x", [text_output()]), code_cell("y", [png_output()])])
    flags = figure_context(nb)
    assert [f.cell_index for f in flags] == [2]


def test_figure_context_synthetic_truth_table():
    rng = random.Random(17)
    for _ in range(20):
        plan = []  # (kind, has_image, has_heading, has_table)
        n = rng.randrange(2, 8)
        for _i in range(n):
            if rng.random() < 0.5:
                has_heading = rng.random() < 0.4
                has_table = not has_heading and rng.random() < 0.4
                plan.append(("markdown", False, has_heading, has_table))
            else:
                has_image = rng.random() < 0.6
                plan.append(("code", has_image, False, False))
        cells = []
        for kind, has_image, has_heading, has_table in plan:
            if kind == "markdown":
                if has_heading:
                    cells.append(md_cell("### Section"))
                elif has_table:
                    cells.append(md_cell(pipe_table(2, 2)))
                else:
                    cells.append(md_cell("notes about values"))
            else:
                cells.append(code_cell("run()", [png_output()] if has_image else []))
        nb = _nb(cells)
        flags = figure_context(nb)
        expected = []
        for i, (kind, has_image, _h, _t) in enumerate(plan):
            if kind != "code" or not has_image:
                continue
            nxt = plan[i + 1] if i + 1 < len(plan) else None
            prv = plan[i - 1] if i > 0 else None
            cand = nxt is None or not nxt[2]
            md = (prv is not None and prv[0] == "markdown") or (
                nxt is not None and nxt[0] == "markdown"
            )
            tbl = (prv is not None and prv[3]) or (nxt is not None and nxt[3])
            expected.append((i + 1, cand, md, tbl, cand and md and tbl))
        got = [
            (f.cell_index, f.candidate, f.has_markdown_neighbor,
             f.has_table_neighbor, f.fully_supported)
            for f in flags
        ]
        assert got == expected


def test_size_risk_bands():
    assert size_risk(630_352) == "ok"
    assert size_risk(0) == "ok"
    assert size_risk(721_055) == "ok"
    assert size_risk(721_056) == "degraded"
    assert size_risk(10_955_552) == "degraded"
    assert size_risk(10_955_553) == "crash_risk"


def test_size_risk_custom_thresholds():
    thresholds = SizeThresholds(degraded=10, crash=20)
    assert size_risk(9, thresholds) == "ok"
    assert size_risk(10, thresholds) == "degraded"
    assert size_risk(20, thresholds) == "crash_risk"


def test_threshold_parsing(tmp_path):
    assert parse_thresholds_arg("100, 200") == SizeThresholds(100, 200)
    json_path = tmp_path / "t.json"
    json_path.write_text('{"degraded": 5, "crash": 9}')
    assert load_size_thresholds(json_path) == SizeThresholds(5, 9)
    kv_path = tmp_path / "t.conf"
    kv_path.write_text("degraded = 11\ncrash = 22  # bytes\n")
    assert load_size_thresholds(kv_path) == SizeThresholds(11, 22)


def test_heading_heatmap_single():
    matrix = heading_heatmap([(1, 1)])
    assert matrix[0] == [1]
    assert all(row == [0] for row in matrix[1:])


def test_heading_heatmap_empty():
    assert heading_heatmap([]) == [[], [], [], [], [], []]


def test_heading_heatmap_scripted_placements():
    rng = random.Random(3)
    placements = []
    for _ in range(100):
        if rng.random() < 0.2:
            placements.append(None)
        else:
            placements.append((rng.randrange(1, 7), rng.randrange(1, 12)))
    matrix = heading_heatmap(placements)
    real = [p for p in placements if p is not None]
    assert sum(sum(row) for row in matrix) == len(real)
    for level, cell in real:
        assert matrix[level - 1][cell - 1] >= 1
    width = max(c for _, c in real)
    from collections import Counter

    wanted = Counter(real)
    for (level, cell), count in wanted.items():
        assert matrix[level - 1][cell - 1] == count
    assert all(len(row) == width for row in matrix)


def test_compute_metrics_full_assembly_and_purity():
    cells = [
        md_cell("# Report\n\nIntro with a [link](https://x.y)."),
        code_cell("df.head()", [html_output(html_table(6, 4))]),
        code_cell("plot()", [png_output(alt="a line chart")]),
        md_cell("![badge](b.png)"),
        raw_cell("ignored"),
    ]
    nb = _nb(cells)
    images, _ = extract_images(nb)
    first = compute_metrics(nb, images)
    second = compute_metrics(nb, images)
    assert first == second  # bit-exact determinism
    assert first.n_code_cells == 2
    assert first.n_markdown_cells == 2
    assert first.n_images == 2
    assert first.n_images_programmatic == 1
    assert first.n_images_with_alt == 2
    assert first.first_heading == (1, 1)
    assert first.first_table_cell == 2
    assert first.n_tables == 1
    assert first.n_links == 1
    assert first.size_risk == "ok"
    assert len(first.figure_context) == 1
    assert first.figure_context[0].cell_index == 3


def test_first_heading_iff_census_and_table_invariants():
    nbs = [
        _nb([md_cell("no headings here")]),
        _nb([md_cell("# yes")]),
        _nb([code_cell("x", [html_output(html_table(2, 2))])]),
    ]
    for nb in nbs:
        metrics_obj = compute_metrics(nb)
        assert (metrics_obj.first_heading is not None) == bool(metrics_obj.heading_census)
        assert (metrics_obj.first_table_cell is not None) == (metrics_obj.n_tables >= 1)
        assert len(metrics_obj.table_shapes) == metrics_obj.n_tables
