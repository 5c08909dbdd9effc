"""Deterministic accessibility rule engine over exported HTML.

Sixteen error categories run as two rulesets (aXe-like and HTMLCS-like).
Three checks are shared between engines and emit one finding per ruleset
(contrast, missing image alt, color-only link distinction), mirroring how
dual-engine scan totals behave. The engine is browserless: effective
colors, font sizes, and decoration come from a static cascade over inline
``style`` attributes seeded with the theme palette, which is exactly what
the co-designed exporter produces. External stylesheets are out of scope.

Severity is three-way: rule violations are errors; indeterminate contrast
(background images, unparseable colors) degrades to a warning; unknown
ARIA roles surface as notices so the role table can be extended without
masking typos.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .dom import Element, body_element, parse_html
from .htmlexport import HtmlDocument
from .themes import Theme

RULESET_AXE = "axe_like"
RULESET_HTMLCS = "htmlcs_like"

ERROR = "error"
WARNING = "warning"
NOTICE = "notice"

CRITICAL = "critical"
SERIOUS = "serious"
MODERATE = "moderate"
MINOR = "minor"


@dataclass(frozen=True)
class RuleInfo:
    code: str
    ruleset: str
    impact: str
    wcag: str
    description: str


RULE_CATALOG: dict[str, RuleInfo] = {
    r.code: r
    for r in [
        RuleInfo("AXE-E1", RULESET_AXE, SERIOUS, "1.4.3 G18",
                 "Text elements must have sufficient color contrast against the background"),
        RuleInfo("AXE-E2", RULESET_AXE, CRITICAL, "1.1.1 H37",
                 "Images must have alternate text"),
        RuleInfo("AXE-E3", RULESET_AXE, SERIOUS, "1.4.3 F24",
                 "Links must be distinguished from surrounding text in a way that does not rely on color"),
        RuleInfo("AXE-E4", RULESET_AXE, SERIOUS, "2.4.4",
                 "Links must have discernible text"),
        RuleInfo("AXE-E5", RULESET_AXE, SERIOUS, "2.4.1",
                 "Page must have means to bypass repeated blocks"),
        RuleInfo("AXE-E6", RULESET_AXE, CRITICAL, "1.2.1",
                 "<audio> elements must have a captions <track>"),
        RuleInfo("AXE-E7", RULESET_AXE, SERIOUS, "",
                 "aria-hidden elements do not contain focusable elements"),
        RuleInfo("AXE-E8", RULESET_AXE, SERIOUS, "",
                 "ARIA input fields must have an accessible name"),
        RuleInfo("AXE-E9", RULESET_AXE, CRITICAL, "",
                 "Certain ARIA roles must be contained by particular parent elements"),
        RuleInfo("AXE-E10", RULESET_AXE, MODERATE, "",
                 "All page content must be contained by landmarks"),
        RuleInfo("HTMLCS-E1", RULESET_HTMLCS, SERIOUS, "1.4.3 G18",
                 "Text elements must have sufficient color contrast against the background"),
        RuleInfo("HTMLCS-E2", RULESET_HTMLCS, CRITICAL, "1.1.1 H37",
                 "Images must have alternate text"),
        RuleInfo("HTMLCS-E3", RULESET_HTMLCS, MINOR, "4.1.1 F77",
                 "Duplicate ID attribute value found on the web page"),
        RuleInfo("HTMLCS-E4", RULESET_HTMLCS, CRITICAL, "1.3.1 H43,H63",
                 "Tables not using header or scope attributes"),
        RuleInfo("HTMLCS-E5", RULESET_HTMLCS, CRITICAL, "1.3.1 H43",
                 "Table header required and currently not used"),
        RuleInfo("HTMLCS-E6", RULESET_HTMLCS, SERIOUS, "4.1.2 H91",
                 "Anchor element with no ID and no link content"),
        RuleInfo("HTMLCS-E7", RULESET_HTMLCS, SERIOUS, "1.4.3 F24",
                 "Links must be distinguished from surrounding text in a way that does not rely on color"),
        RuleInfo("HTMLCS-E8", RULESET_HTMLCS, SERIOUS, "4.1.2 H91",
                 "Anchor element with a valid href but no link text content"),
        RuleInfo("HTMLCS-E9", RULESET_HTMLCS, CRITICAL, "4.1.2 H91",
                 "Element does not have a name available to an accessibility API"),
    ]
}

ALL_RULES = frozenset(RULE_CATALOG)


class UnparseableDocument(ValueError):
    pass


@dataclass
class A11yFinding:
    rule_code: str
    ruleset: str
    severity: str
    impact: str
    selector: str
    message: str
    document: str = ""
    theme: str = ""

    def to_json(self) -> dict:
        return {
            "document": self.document,
            "theme": self.theme,
            "rule_code": self.rule_code,
            "ruleset": self.ruleset,
            "severity": self.severity,
            "impact": self.impact,
            "selector": self.selector,
            "message": self.message,
        }


@dataclass
class ScanResult:
    document: str
    theme: str
    findings: list[A11yFinding]
    counts: dict[str, int] = field(default_factory=dict)

    def errors(self) -> int:
        return sum(1 for f in self.findings if f.severity == ERROR)

    def warnings(self) -> int:
        return sum(1 for f in self.findings if f.severity == WARNING)


# -- color math --------------------------------------------------------------

_NAMED_COLORS = {
    "black": (0, 0, 0), "white": (255, 255, 255), "red": (255, 0, 0),
    "green": (0, 128, 0), "blue": (0, 0, 255), "yellow": (255, 255, 0),
    "gray": (128, 128, 128), "grey": (128, 128, 128), "silver": (192, 192, 192),
    "maroon": (128, 0, 0), "olive": (128, 128, 0), "lime": (0, 255, 0),
    "aqua": (0, 255, 255), "teal": (0, 128, 128), "navy": (0, 0, 128),
    "fuchsia": (255, 0, 255), "purple": (128, 0, 128), "orange": (255, 165, 0),
}

_RGB_FUNC = re.compile(r"rgba?\(([^)]*)\)")


def parse_color(value: str) -> tuple[int, int, int] | None:
    """Parse a CSS color literal; None when indeterminate or unsupported."""
    value = value.strip().lower()
    if not value:
        return None
    if value.startswith("#"):
        digits = value[1:]
        if len(digits) == 3:
            digits = "".join(ch * 2 for ch in digits)
        if len(digits) == 6:
            try:
                return tuple(int(digits[i : i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]
            except ValueError:
                return None
        return None
    match = _RGB_FUNC.match(value)
    if match:
        parts = [p.strip() for p in match.group(1).split(",")]
        if len(parts) == 4:
            try:
                if float(parts[3]) < 1.0:
                    return None  # translucent: composite unknown
            except ValueError:
                return None
        if len(parts) >= 3:
            try:
                rgb = tuple(min(255, max(0, int(float(p)))) for p in parts[:3])
                return rgb  # type: ignore[return-value]
            except ValueError:
                return None
    return _NAMED_COLORS.get(value)


def _channel(value: int) -> float:
    s = value / 255.0
    return s / 12.92 if s <= 0.04045 else ((s + 0.055) / 1.055) ** 2.4


def relative_luminance(color: tuple[int, int, int] | str) -> float:
    if isinstance(color, str):
        parsed = parse_color(color)
        if parsed is None:
            raise ValueError(f"not a color: {color!r}")
        color = parsed
    r, g, b = color
    return 0.2126 * _channel(r) + 0.7152 * _channel(g) + 0.0722 * _channel(b)


def contrast_ratio(
    fg: tuple[int, int, int] | str, bg: tuple[int, int, int] | str
) -> float:
    """WCAG contrast ratio, always >= 1 (lighter over darker)."""
    lum_a = relative_luminance(fg)
    lum_b = relative_luminance(bg)
    lighter, darker = max(lum_a, lum_b), min(lum_a, lum_b)
    return (lighter + 0.05) / (darker + 0.05)


# -- computed state ----------------------------------------------------------

_TAG_FONT_EM = {"h1": 2.0, "h2": 1.5, "h3": 1.17, "h4": 1.0, "h5": 0.83, "h6": 0.67, "small": 0.83}
_TAG_BOLD = frozenset({"h1", "h2", "h3", "h4", "h5", "h6", "b", "strong", "th"})

LANDMARK_TAGS = frozenset({"main", "nav", "header", "footer", "aside"})
LANDMARK_ROLES = frozenset(
    {"main", "navigation", "banner", "contentinfo", "complementary", "region", "search", "form"}
)
HEADING_TAGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})

LARGE_TEXT_PX = 24.0
LARGE_BOLD_TEXT_PX = 18.66
NORMAL_TEXT_RATIO = 4.5
LARGE_TEXT_RATIO = 3.0

_IMPLICIT_ROLES = {
    "ul": "list", "ol": "list", "menu": "list", "li": "listitem",
    "table": "table", "thead": "rowgroup", "tbody": "rowgroup", "tfoot": "rowgroup",
    "tr": "row", "td": "cell", "th": "columnheader",
    "select": "listbox", "option": "option",
    "nav": "navigation", "main": "main", "header": "banner", "footer": "contentinfo",
    "aside": "complementary", "form": "form", "button": "button",
}

_ARIA_INPUT_ROLES = frozenset(
    {"textbox", "searchbox", "combobox", "listbox", "slider", "spinbutton",
     "checkbox", "radio", "switch"}
)


def _parse_style(value: str | None) -> dict[str, str]:
    props: dict[str, str] = {}
    if not value:
        return props
    for part in value.split(";"):
        name, sep, val = part.partition(":")
        if sep:
            props[name.strip().lower()] = val.strip()
    return props


_FONT_SIZE = re.compile(r"^([\d.]+)\s*(px|pt|em|rem|%)?$")


def _font_px(value: str, parent_px: float) -> float | None:
    match = _FONT_SIZE.match(value.strip().lower())
    if not match:
        return None
    number = float(match.group(1))
    unit = match.group(2) or "px"
    if unit == "px":
        return number
    if unit == "pt":
        return number * 4.0 / 3.0
    if unit == "em":
        return number * parent_px
    if unit == "rem":
        return number * 16.0
    return number / 100.0 * parent_px  # %


@dataclass
class _State:
    color: tuple[int, int, int]
    bg: tuple[int, int, int]
    bg_indeterminate: bool
    font_px: float
    bold: bool
    underline: bool
    aria_hidden: bool
    displayed: bool
    in_landmark: bool
    in_skip_link: bool


@dataclass
class _NodeInfo:
    element: Element
    state: _State
    position: int


def _is_skip_link(el: Element) -> bool:
    href = el.get("href") or ""
    return el.tag == "a" and href.startswith("#") and len(href) > 1


def _walk_states(body: Element, theme: Theme) -> list[_NodeInfo]:
    base = _State(
        color=parse_color(theme.color("fg_text")) or (0, 0, 0),
        bg=parse_color(theme.color("page_bg")) or (255, 255, 255),
        bg_indeterminate=False,
        font_px=16.0,
        bold=False,
        underline=False,
        aria_hidden=False,
        displayed=True,
        in_landmark=False,
        in_skip_link=False,
    )
    infos: list[_NodeInfo] = []
    counter = 0

    def visit(el: Element, inherited: _State) -> None:
        nonlocal counter
        props = _parse_style(el.get("style"))
        state = _State(**vars(inherited))

        if el.tag in _TAG_FONT_EM:
            state.font_px = _TAG_FONT_EM[el.tag] * inherited.font_px
        if el.tag in _TAG_BOLD:
            state.bold = True
        if el.tag in ("a", "u", "ins") and (el.tag != "a" or el.has_attr("href")):
            state.underline = True
        if el.tag == "a" and el.has_attr("href"):
            state.color = parse_color(theme.color("link")) or state.color

        if "color" in props:
            parsed = parse_color(props["color"])
            if parsed is not None:
                state.color = parsed
        if "background-color" in props:
            parsed = parse_color(props["background-color"])
            if parsed is not None:
                state.bg = parsed
                state.bg_indeterminate = False
            else:
                state.bg_indeterminate = True
        if "background-image" in props and props["background-image"] != "none":
            state.bg_indeterminate = True
        if "font-size" in props:
            px = _font_px(props["font-size"], inherited.font_px)
            if px is not None:
                state.font_px = px
        if "font-weight" in props:
            weight = props["font-weight"]
            if weight in ("bold", "bolder"):
                state.bold = True
            elif weight in ("normal", "lighter"):
                state.bold = False
            elif weight.isdigit():
                state.bold = int(weight) >= 700
        if "text-decoration" in props or "text-decoration-line" in props:
            decoration = props.get("text-decoration", props.get("text-decoration-line", ""))
            if "underline" in decoration:
                state.underline = True
            elif "none" in decoration:
                state.underline = False
        if props.get("display", "").strip() == "none" or props.get("visibility", "").strip() == "hidden":
            state.displayed = False
        if (el.get("aria-hidden") or "").strip().lower() == "true":
            state.aria_hidden = True
        if el.tag in LANDMARK_TAGS or (el.get("role") or "").strip().lower() in LANDMARK_ROLES:
            state.in_landmark = True
        if _is_skip_link(el):
            state.in_skip_link = True

        infos.append(_NodeInfo(el, state, counter))
        counter += 1
        for child in el.children:
            if isinstance(child, Element):
                visit(child, state)

    visit(body, base)
    return infos


# -- rule machinery ----------------------------------------------------------

def _load_role_data() -> tuple[dict[str, list[str]], frozenset[str]]:
    text = resources.files("nbaudit.data").joinpath("aria_required_parents.json").read_text("utf-8")
    data = json.loads(text)
    return data["required_parents"], frozenset(data["known_roles"])


_REQUIRED_PARENTS, _KNOWN_ROLES = _load_role_data()


def _own_visible_text(el: Element) -> str:
    return el.own_text().strip()


def _explicit_role(el: Element) -> str | None:
    role = (el.get("role") or "").strip().lower()
    return role.split()[0] if role else None


def _element_role(el: Element) -> str | None:
    explicit = _explicit_role(el)
    if explicit:
        return explicit
    if el.tag == "a" and el.has_attr("href"):
        return "link"
    return _IMPLICIT_ROLES.get(el.tag)


def _idrefs_text(root: Element, refs: str) -> str:
    ids = refs.split()
    parts: list[str] = []
    for el in root.iter_elements():
        if el.get("id") in ids:
            parts.append(el.text())
    return " ".join(parts).strip()


def _accessible_name(el: Element, root: Element) -> str:
    label = (el.get("aria-label") or "").strip()
    if label:
        return label
    refs = (el.get("aria-labelledby") or "").strip()
    if refs:
        text = _idrefs_text(root, refs)
        if text:
            return text
    text = el.text().strip()
    if text:
        return text
    for img in el.find_all("img"):
        alt = (img.get("alt") or "").strip()
        if alt:
            return alt
    return (el.get("title") or "").strip()


def _widget_name(el: Element, root: Element) -> str:
    """Name computation for form controls; text content does not count."""
    label = (el.get("aria-label") or "").strip()
    if label:
        return label
    refs = (el.get("aria-labelledby") or "").strip()
    if refs:
        text = _idrefs_text(root, refs)
        if text:
            return text
    return (el.get("title") or "").strip()


def _is_focusable(el: Element) -> bool:
    if el.tag == "a" and el.has_attr("href"):
        return True
    if el.tag in ("button", "select", "textarea", "iframe"):
        return True
    if el.tag == "input" and (el.get("type") or "").lower() != "hidden":
        return True
    if el.tag in ("audio", "video") and el.has_attr("controls"):
        return True
    tabindex = el.get("tabindex")
    if tabindex is not None and not tabindex.strip().startswith("-"):
        return True
    if el.get("contenteditable", "").lower() in ("", "true") and el.has_attr("contenteditable"):
        return True
    return False


def _table_cells(table: Element, tag: str) -> list[Element]:
    cells = []
    for cell in table.find_all(tag):
        owner = next((a for a in cell.ancestors() if a.tag == "table"), None)
        if owner is table:
            cells.append(cell)
    return cells


def _hex(color: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*color)


def scan(
    doc: HtmlDocument | bytes | str,
    theme: Theme,
    rules: Iterable[str] | None = None,
    document: str | None = None,
) -> ScanResult:
    """Run all sixteen rule categories over one HTML document.

    ``rules`` restricts emission to the given rule codes. Findings are
    ordered by document position then rule code, and are deterministic for
    identical (document bytes, theme palette) inputs.
    """
    if isinstance(doc, HtmlDocument):
        source: bytes | str = doc.data
        doc_name = document if document is not None else doc.source_notebook
        theme_name = doc.theme
    else:
        source = doc
        doc_name = document or "<memory>"
        theme_name = theme.name
    enabled = frozenset(rules) if rules is not None else ALL_RULES
    unknown = enabled - ALL_RULES
    if unknown:
        raise ValueError(f"unknown rule codes: {sorted(unknown)}")

    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnparseableDocument(str(exc)) from exc
    root = parse_html(source)
    body = body_element(root)
    infos = _walk_states(body, theme)
    by_element = {id(info.element): info for info in infos}

    raw: list[tuple[int, A11yFinding]] = []

    def emit(
        code: str,
        el: Element,
        message: str,
        severity: str = ERROR,
        position: int | None = None,
    ) -> None:
        if code not in enabled:
            return
        info = RULE_CATALOG[code]
        pos = position if position is not None else by_element[id(el)].position
        raw.append(
            (
                pos,
                A11yFinding(
                    rule_code=code,
                    ruleset=info.ruleset,
                    severity=severity,
                    impact=info.impact,
                    selector=el.css_path(),
                    message=message,
                    document=doc_name,
                    theme=theme_name,
                ),
            )
        )

    # Document-level context.
    doc_ids: set[str] = set()
    for info in infos:
        el_id = info.element.get("id")
        if el_id:
            doc_ids.add(el_id)
    has_heading = False
    has_landmark = False
    has_skip_link = False
    has_content = False
    for info in infos:
        el, state = info.element, info.state
        if not state.displayed or state.aria_hidden:
            continue
        if el.tag in HEADING_TAGS:
            has_heading = True
        if el.tag in LANDMARK_TAGS or (_explicit_role(el) or "") in LANDMARK_ROLES:
            has_landmark = True
        if _is_skip_link(el) and el.text().strip() and (el.get("href") or "")[1:] in doc_ids:
            has_skip_link = True
        if _own_visible_text(el) or el.tag in ("img", "table", "audio", "video", "input", "button", "select", "textarea"):
            has_content = True

    seen_ids: set[str] = set()
    region_hits: dict[int, tuple[Element, int]] = {}

    for info in infos:
        el, state, pos = info.element, info.state, info.position

        # E3 duplicate ids run regardless of visibility.
        el_id = el.get("id")
        if el_id:
            if el_id in seen_ids:
                emit("HTMLCS-E3", el, f'duplicate id "{el_id}"')
            seen_ids.add(el_id)

        if not state.displayed:
            continue

        # aria-hidden roots: focusable descendants (AXE-E7).
        if (el.get("aria-hidden") or "").strip().lower() == "true":
            parent_hidden = any(
                (a.get("aria-hidden") or "").strip().lower() == "true"
                for a in el.ancestors()
            )
            if not parent_hidden:
                focusables = [
                    d for d in el.iter_elements() if d is not el and _is_focusable(d)
                ]
                if focusables:
                    emit(
                        "AXE-E7",
                        el,
                        f"aria-hidden subtree contains {len(focusables)} focusable element(s)",
                    )

        if state.aria_hidden:
            continue

        # Contrast (AXE-E1 / HTMLCS-E1) on elements with direct text.
        text = _own_visible_text(el)
        if text:
            large = state.font_px >= LARGE_TEXT_PX or (
                state.bold and state.font_px >= LARGE_BOLD_TEXT_PX
            )
            threshold = LARGE_TEXT_RATIO if large else NORMAL_TEXT_RATIO
            if state.bg_indeterminate:
                message = "effective background is indeterminate; contrast not verifiable"
                emit("AXE-E1", el, message, severity=WARNING)
                emit("HTMLCS-E1", el, message, severity=WARNING)
            else:
                ratio = contrast_ratio(state.color, state.bg)
                if ratio < threshold - 1e-12:
                    message = (
                        f"contrast {ratio:.2f}:1 for {_hex(state.color)} on "
                        f"{_hex(state.bg)} is below {threshold}:1"
                    )
                    emit("AXE-E1", el, message)
                    emit("HTMLCS-E1", el, message)

            # Content-outside-landmark bookkeeping (AXE-E10).
            if not state.in_landmark and not state.in_skip_link:
                top = el
                while top is not body and top.parent is not None and top.parent is not body:
                    top = top.parent
                key = by_element[id(top)].position
                region_hits.setdefault(key, (top, key))

        if el.tag == "img":
            role = _explicit_role(el) or ""
            if not el.has_attr("alt") and role not in ("presentation", "none"):
                message = "image has no alt attribute"
                emit("AXE-E2", el, message)
                emit("HTMLCS-E2", el, message)

        if el.tag == "a":
            href = el.get("href")
            anchor_text = el.text().strip()
            if href:
                if anchor_text and el.parent is not None:
                    sibling_text = "".join(
                        c.data
                        for c in el.parent.children
                        if not isinstance(c, Element)
                    ).strip()
                    if sibling_text and not state.underline:
                        own = _parse_style(el.get("style"))
                        border = own.get("border-bottom", own.get("border", ""))
                        has_border = bool(border) and not border.startswith(("0", "none"))
                        if not has_border:
                            message = (
                                "link relies on color alone; no underline or border cue"
                            )
                            emit("AXE-E3", el, message)
                            emit("HTMLCS-E7", el, message)
                if not _accessible_name(el, root):
                    emit("AXE-E4", el, "link has no discernible text")
                if not anchor_text and not el.child_elements():
                    emit("HTMLCS-E8", el, "anchor has a valid href but no link content")
            else:
                if (
                    not anchor_text
                    and not el.child_elements()
                    and not el.get("id")
                    and not el.get("name")
                ):
                    emit("HTMLCS-E6", el, "anchor has no href, no id, and no content")

        if el.tag == "audio":
            tracks = [
                t for t in el.find_all("track")
                if (t.get("kind") or "").lower() == "captions"
            ]
            if not tracks:
                emit("AXE-E6", el, "audio element has no captions track")

        role = _explicit_role(el)
        if role:
            if role not in _KNOWN_ROLES:
                emit("AXE-E9", el, f'unknown ARIA role "{role}" ignored', severity=NOTICE)
            else:
                required = _REQUIRED_PARENTS.get(role)
                if required:
                    ancestor_roles = {
                        r for r in (_element_role(a) for a in el.ancestors()) if r
                    }
                    if not ancestor_roles & set(required):
                        emit(
                            "AXE-E9",
                            el,
                            f'role "{role}" requires a parent with role '
                            f'{" or ".join(sorted(required))}',
                        )
                if role in _ARIA_INPUT_ROLES and el.tag not in (
                    "input", "select", "textarea", "button",
                ):
                    if not _widget_name(el, root):
                        emit("AXE-E8", el, f'ARIA {role} has no accessible name')

        if el.tag == "table":
            ths = _table_cells(el, "th")
            tds = _table_cells(el, "td")
            if not ths:
                if tds:
                    emit("HTMLCS-E5", el, "table has no header cells")
            else:
                scoped = any(th.has_attr("scope") for th in ths)
                headered = any(td.has_attr("headers") for td in tds)
                if not scoped and not headered:
                    emit(
                        "HTMLCS-E4",
                        el,
                        "table headers are not associated via scope or headers attributes",
                    )

        if el.tag in ("button", "input", "select", "textarea") and not (
            el.tag == "input" and (el.get("type") or "").lower() == "hidden"
        ):
            name = _widget_name(el, root)
            if not name and el.tag == "button":
                name = el.text().strip()
            if not name and el.tag == "input":
                itype = (el.get("type") or "text").lower()
                if itype in ("submit", "reset", "button"):
                    name = (el.get("value") or "").strip()
                if itype == "image":
                    name = (el.get("alt") or "").strip()
                if not name:
                    el_id = el.get("id")
                    if el_id:
                        for label in root.find_all("label"):
                            if label.get("for") == el_id and label.text().strip():
                                name = label.text().strip()
                                break
            if not name and el.tag in ("select", "textarea"):
                el_id = el.get("id")
                if el_id:
                    for label in root.find_all("label"):
                        if label.get("for") == el_id and label.text().strip():
                            name = label.text().strip()
                            break
            if not name:
                emit(
                    "HTMLCS-E9",
                    el,
                    f"{el.tag} has no name available to an accessibility API",
                )

    # Document-level rules.
    body_pos = by_element[id(body)].position
    if has_content and not (has_heading or has_landmark or has_skip_link):
        emit(
            "AXE-E5",
            body,
            "page has no heading, landmark, or skip link to bypass blocks",
            position=body_pos,
        )
    for _, (top, key) in sorted(region_hits.items()):
        emit("AXE-E10", top, "content is not contained by a landmark region", position=key)

    raw.sort(key=lambda item: (item[0], item[1].rule_code))
    findings = [f for _, f in raw]
    counts: dict[str, int] = {}
    for finding in findings:
        counts[finding.rule_code] = counts.get(finding.rule_code, 0) + 1
    return ScanResult(document=doc_name, theme=theme_name, findings=findings, counts=counts)


def scan_file(path: Path | str, theme: Theme, rules: Iterable[str] | None = None) -> ScanResult:
    data = Path(path).read_bytes()
    return scan(data, theme, rules=rules, document=str(path))


# -- corpus comparison -------------------------------------------------------

@dataclass
class ThemeStats:
    documents: int
    mean: float
    stddev: float
    cdf: list[tuple[int, float]]


@dataclass
class ThemeComparison:
    error_stats: dict[str, ThemeStats]
    warning_stats: dict[str, ThemeStats]
    rule_counts: dict[str, dict[str, int]]
    rule_heatmap: dict[str, dict[str, float]]


def _stats(values: Sequence[int]) -> ThemeStats:
    n = len(values)
    if n == 0:
        return ThemeStats(0, 0.0, 0.0, [])
    total = sum(values)
    mean = total / n
    variance = sum((v - mean) ** 2 for v in values) / n
    ordered = sorted(values)
    cdf: list[tuple[int, float]] = []
    seen = 0
    for value in ordered:
        seen += 1
        if cdf and cdf[-1][0] == value:
            cdf[-1] = (value, seen / n)
        else:
            cdf.append((value, seen / n))
    return ThemeStats(n, mean, math.sqrt(variance), cdf)


def theme_comparison(results: Iterable[ScanResult]) -> ThemeComparison:
    """Per-theme error/warning distributions and the normalized rule heatmap.

    Heatmap cells divide each (theme, rule) error count by the maximum
    count for that rule across themes; rules unseen everywhere stay 0.
    """
    errors_by_theme: dict[str, list[int]] = {}
    warnings_by_theme: dict[str, list[int]] = {}
    rule_counts: dict[str, dict[str, int]] = {}
    for result in results:
        errors_by_theme.setdefault(result.theme, []).append(result.errors())
        warnings_by_theme.setdefault(result.theme, []).append(result.warnings())
        bucket = rule_counts.setdefault(result.theme, {})
        for finding in result.findings:
            if finding.severity == ERROR:
                bucket[finding.rule_code] = bucket.get(finding.rule_code, 0) + 1
    all_rules = sorted({code for counts in rule_counts.values() for code in counts})
    heatmap: dict[str, dict[str, float]] = {}
    for rule in all_rules:
        peak = max(counts.get(rule, 0) for counts in rule_counts.values())
        for theme_name, counts in rule_counts.items():
            cell = counts.get(rule, 0) / peak if peak else 0.0
            heatmap.setdefault(theme_name, {})[rule] = cell
    return ThemeComparison(
        error_stats={t: _stats(v) for t, v in sorted(errors_by_theme.items())},
        warning_stats={t: _stats(v) for t, v in sorted(warnings_by_theme.items())},
        rule_counts={t: dict(sorted(c.items())) for t, c in sorted(rule_counts.items())},
        rule_heatmap={t: dict(sorted(c.items())) for t, c in sorted(heatmap.items())},
    )
