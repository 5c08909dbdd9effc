from __future__ import annotations

import math
import random

import pytest

from conftest import code_cell, md_cell, notebook_bytes
from rulefixtures import CLEAN_FIXTURE, EXPECTED_IMPACTS, RULE_FIXTURES, page
from nbaudit.a11yrules import (
    ALL_RULES,
    RULE_CATALOG,
    contrast_ratio,
    parse_color,
    relative_luminance,
    scan,
    theme_comparison,
)
from nbaudit.dom import parse_html
from nbaudit.htmlexport import export_html
from nbaudit.nbmodel import parse_notebook
from nbaudit.themes import Theme, load_theme


# Independent WCAG luminance oracle, written against the formula definition
# and kept separate from the engine's implementation.
def _oracle_luminance(rgb):
    def lin(c):
        c = c / 255.0
        return c / 12.92 if c <= 0.04045 else math.pow((c + 0.055) / 1.055, 2.4)

    r, g, b = rgb
    return 0.2126 * lin(r) + 0.7152 * lin(g) + 0.0722 * lin(b)


def _oracle_ratio(fg, bg):
    l1, l2 = _oracle_luminance(fg), _oracle_luminance(bg)
    hi, lo = max(l1, l2), min(l1, l2)
    return (hi + 0.05) / (lo + 0.05)


def test_contrast_black_on_white_exact():
    assert contrast_ratio("#000000", "#FFFFFF") == pytest.approx(21.0, abs=1e-9)


def test_contrast_white_on_white():
    assert contrast_ratio("#FFFFFF", "#FFFFFF") == 1.0


def test_contrast_777_fails_normal_threshold():
    ratio = contrast_ratio("#777777", "#FFFFFF")
    assert ratio == pytest.approx(_oracle_ratio((119, 119, 119), (255, 255, 255)), abs=1e-9)
    assert ratio < 4.5


def test_contrast_random_pairs_match_oracle():
    rng = random.Random(2023)
    for _ in range(20):
        fg = tuple(rng.randrange(256) for _ in range(3))
        bg = tuple(rng.randrange(256) for _ in range(3))
        got = contrast_ratio(fg, bg)
        want = _oracle_ratio(fg, bg)
        assert got == pytest.approx(want, abs=1e-9)
        assert (got >= 4.5) == (want >= 4.5)


def test_contrast_symmetric_and_at_least_one():
    rng = random.Random(7)
    for _ in range(50):
        a = tuple(rng.randrange(256) for _ in range(3))
        b = tuple(rng.randrange(256) for _ in range(3))
        assert contrast_ratio(a, b) == contrast_ratio(b, a)
        assert contrast_ratio(a, b) >= 1.0
    assert contrast_ratio((0, 0, 0), (255, 255, 255)) == pytest.approx(21.0)


def test_contrast_is_21_only_for_pure_black_and_white():
    rng = random.Random(13)
    for _ in range(200):
        a = tuple(rng.randrange(256) for _ in range(3))
        b = tuple(rng.randrange(256) for _ in range(3))
        if {a, b} != {(0, 0, 0), (255, 255, 255)}:
            assert contrast_ratio(a, b) < 21.0


def test_parse_color_forms():
    assert parse_color("#ff0000") == (255, 0, 0)
    assert parse_color("#F00") == (255, 0, 0)
    assert parse_color("rgb(1, 2, 3)") == (1, 2, 3)
    assert parse_color("rgba(1,2,3,1.0)") == (1, 2, 3)
    assert parse_color("rgba(1,2,3,0.5)") is None
    assert parse_color("white") == (255, 255, 255)
    assert parse_color("bogus") is None


def test_relative_luminance_extremes():
    assert relative_luminance((0, 0, 0)) == 0.0
    assert relative_luminance((255, 255, 255)) == pytest.approx(1.0)


@pytest.mark.parametrize("code", sorted(RULE_FIXTURES))
def test_rule_fixture_triggers_exactly_its_codes(code, light_theme):
    html, expected = RULE_FIXTURES[code]
    result = scan(html, light_theme, document=f"fixture-{code}")
    got = frozenset(f.rule_code for f in result.findings)
    assert got == expected
    for finding in result.findings:
        assert finding.severity == "error"
        assert finding.impact == EXPECTED_IMPACTS[finding.rule_code]
        # each (rule, fixture) fires exactly once
    assert all(count == 1 for count in result.counts.values())


def test_clean_fixture_zero_findings(light_theme):
    result = scan(CLEAN_FIXTURE, light_theme, document="clean")
    assert result.findings == []


def test_catalog_impacts_match_published_table():
    for code, impact in EXPECTED_IMPACTS.items():
        assert RULE_CATALOG[code].impact == impact
    assert len(RULE_CATALOG) == 19  # 16 categories; 3 shared by both rulesets


def test_missing_alt_twin_pair_positions(light_theme):
    result = scan(RULE_FIXTURES["AXE-E2"][0], light_theme)
    codes = [f.rule_code for f in result.findings]
    assert codes == ["AXE-E2", "HTMLCS-E2"]  # same node, rule-code tiebreak
    assert result.findings[0].selector == result.findings[1].selector


def test_duplicate_id_attaches_to_second_and_later(light_theme):
    html = page(
        '<main><h1>T</h1><p id="x">a</p><p id="x">b</p><p id="x">c</p></main>'
    )
    result = scan(html, light_theme)
    dups = [f for f in result.findings if f.rule_code == "HTMLCS-E3"]
    assert len(dups) == 2
    assert dups[0].selector.endswith("p:nth-child(3)")
    assert dups[1].selector.endswith("p:nth-child(4)")


def test_scan_deterministic_and_ordered(light_theme):
    html = page(
        "<main><h1>T</h1>"
        '<img src="x.png"/>'
        '<p style="color:#888888;background-color:#ffffff">dim</p>'
        "<table><tr><td>1</td></tr></table></main>"
    )
    first = scan(html, light_theme)
    second = scan(html, light_theme)
    assert [f.to_json() for f in first.findings] == [f.to_json() for f in second.findings]
    positions = []
    root = parse_html(html)
    order = {el.css_path(): i for i, el in enumerate(root.iter_elements())}
    for finding in first.findings:
        positions.append((order[finding.selector], finding.rule_code))
    assert positions == sorted(positions)


def test_every_selector_resolves_to_exactly_one_node(light_theme):
    html = page(
        "<main><h1>T</h1><div><p>ok</p>"
        '<img src="a.png"/><img src="b.png"/>'
        "<a></a></div></main>"
    )
    result = scan(html, light_theme)
    root = parse_html(html)
    all_paths = [el.css_path() for el in root.iter_elements()]
    for finding in result.findings:
        assert all_paths.count(finding.selector) == 1


def test_monotonic_under_extension(light_theme):
    base_inner = '<main><h1>T</h1><p>fine text</p>'
    base = page(base_inner + "</main>")
    extended_pass = page(base_inner + '<p>more fine text</p></main>')
    extended_fail = page(base_inner + '<img src="missing-alt.png"/></main>')
    n_base = len(scan(base, light_theme).findings)
    assert len(scan(extended_pass, light_theme).findings) == n_base
    assert len(scan(extended_fail, light_theme).findings) >= n_base + 1


def test_rules_subset_filter(light_theme):
    html = RULE_FIXTURES["AXE-E2"][0]
    result = scan(html, light_theme, rules={"AXE-E2"})
    assert [f.rule_code for f in result.findings] == ["AXE-E2"]
    with pytest.raises(ValueError):
        scan(html, light_theme, rules={"AXE-E99"})


def test_large_text_threshold_three_to_one(light_theme):
    # 4.0:1 passes for large text but fails for normal text
    style = "color:#8a8a8a;background-color:#ffffff"
    ratio = contrast_ratio("#8a8a8a", "#ffffff")
    assert 3.0 < ratio < 4.5
    normal = page(f'<main><h1>T</h1><p style="{style}">normal sized</p></main>')
    large = page(
        f'<main><h1>T</h1><p style="{style};font-size:24px">large sized</p></main>'
    )
    bold_mid = page(
        f'<main><h1>T</h1><p style="{style};font-size:19px;font-weight:bold">big bold</p></main>'
    )
    assert any(f.rule_code == "AXE-E1" for f in scan(normal, light_theme).findings)
    assert not any(f.rule_code == "AXE-E1" for f in scan(large, light_theme).findings)
    assert not any(f.rule_code == "AXE-E1" for f in scan(bold_mid, light_theme).findings)


def test_h1_default_is_large_text(light_theme):
    # h1 renders at 32px bold: the 3:1 threshold applies
    html = page('<main><h1 style="color:#8a8a8a;background-color:#ffffff">Title</h1></main>')
    assert not any(f.rule_code == "AXE-E1" for f in scan(html, light_theme).findings)


def test_background_image_degrades_to_warning(light_theme):
    html = page(
        '<main><h1>T</h1><p style="background-image:url(x.png)">text over image</p></main>'
    )
    result = scan(html, light_theme)
    warnings = [f for f in result.findings if f.severity == "warning"]
    assert {f.rule_code for f in warnings} == {"AXE-E1", "HTMLCS-E1"}
    assert result.errors() == 0


def test_unknown_role_is_notice(light_theme):
    html = page('<main><h1>T</h1><div role="frobnicator">x</div></main>')
    result = scan(html, light_theme)
    notices = [f for f in result.findings if f.severity == "notice"]
    assert len(notices) == 1
    assert notices[0].rule_code == "AXE-E9"
    assert result.errors() == 0


def test_aria_required_parent_satisfied_by_implicit_role(light_theme):
    html = page('<main><h1>T</h1><ul><li role="listitem">fine</li></ul></main>')
    result = scan(html, light_theme)
    assert not any(f.rule_code == "AXE-E9" and f.severity == "error" for f in result.findings)


def test_theme_default_colors_seed_cascade():
    dark = load_theme("dark")
    # text with no inline styles resolves against the dark palette and passes
    html = page("<main><h1>T</h1><p>plain text</p></main>")
    result = scan(html, dark)
    assert result.errors() == 0


def _make_theme(name: str, fg: str) -> Theme:
    palette = dict(load_theme("light").palette)
    palette["fg_text"] = fg
    return Theme(name=name, palette=palette)


def test_low_contrast_palette_strictly_more_e1(light_theme):
    nb = parse_notebook(
        notebook_bytes(
            [md_cell("# T\n\nparagraph of text"), code_cell("x = 1", [])]
        ),
        "t.ipynb",
    )
    good = _make_theme("compliant", "#000000")
    bad = _make_theme("lowviz", "#999999")
    n_good = sum(
        1 for f in scan(export_html(nb, good), good).findings if f.rule_code == "AXE-E1"
    )
    n_bad = sum(
        1 for f in scan(export_html(nb, bad), bad).findings if f.rule_code == "AXE-E1"
    )
    assert n_bad > n_good


def test_theme_comparison_zero_findings_unit_step(light_theme):
    from nbaudit.a11yrules import ScanResult

    results = [ScanResult("d1", "light", []), ScanResult("d2", "light", [])]
    comparison = theme_comparison(results)
    stats = comparison.error_stats["light"]
    assert stats.cdf == [(0, 1.0)]
    assert stats.mean == 0.0 and stats.stddev == 0.0


def test_theme_comparison_heatmap_normalization(light_theme):
    from nbaudit.a11yrules import A11yFinding, ScanResult

    def finding():
        return A11yFinding(
            rule_code="AXE-E2", ruleset="axe_like", severity="error",
            impact="critical", selector="img", message="m",
        )

    results = [
        ScanResult("d", "x", [finding() for _ in range(100)]),
        ScanResult("d", "y", [finding() for _ in range(50)]),
    ]
    comparison = theme_comparison(results)
    assert comparison.rule_heatmap["x"]["AXE-E2"] == 1.0
    assert comparison.rule_heatmap["y"]["AXE-E2"] == 0.5


def test_all_rules_constant_matches_catalog():
    assert ALL_RULES == frozenset(RULE_CATALOG)
