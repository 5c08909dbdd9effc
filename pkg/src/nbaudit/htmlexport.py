"""Standalone themed HTML export of notebooks.

The exporter is co-designed with the accessibility scanner: all styling is
emitted as inline ``style`` attributes (no stylesheets, no JavaScript), so
a static cascade over the document fully determines effective colors.
Markdown cells render through the shared CommonMark pipeline; code cells
get token-colored ``<pre>`` blocks; image outputs are embedded as base64
data URIs. Images carry an ``alt`` attribute only when an alt string
exists in output metadata or embedded PNG metadata; absence of the
attribute is what downstream missing-alt rules key on, while an explicit
empty string is preserved as the decorative marker.
"""

from __future__ import annotations

import base64
import hashlib
import html
import io
import json
import keyword
import re
import tokenize
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import altpng, nbmodel
from .mdrender import render_markdown_styled
from .nbmodel import Notebook, OutputBundle
from .themes import Theme

_ANSI = re.compile(r"\x1b\[[0-9;]*[A-Za-z]|\x1b\][^\x07]*\x07")


def strip_ansi(text: str) -> str:
    return _ANSI.sub("", text)


@dataclass
class HtmlDocument:
    data: bytes
    theme: str
    source_notebook: str

    def text(self) -> str:
        return self.data.decode("utf-8")


def _token_role(tok: tokenize.TokenInfo) -> str | None:
    if tok.type == tokenize.STRING:
        return "code_string"
    if tok.type == tokenize.COMMENT:
        return "code_comment"
    if tok.type == tokenize.NUMBER:
        return "code_number"
    if tok.type == tokenize.NAME and keyword.iskeyword(tok.string):
        return "code_keyword"
    return None


def _slice_lines(lines: list[str], start: tuple[int, int], end: tuple[int, int]) -> str:
    (srow, scol), (erow, ecol) = start, end
    srow, erow = min(srow, len(lines)), min(erow, len(lines))
    if srow < 1 or erow < 1:
        return ""
    if srow == erow:
        return lines[srow - 1][scol:ecol]
    parts = [lines[srow - 1][scol:]]
    parts.extend(lines[r - 1] for r in range(srow + 1, erow))
    parts.append(lines[erow - 1][:ecol])
    return "\n".join(parts)


def highlight_source(source: str, theme: Theme) -> str:
    """Token-colored HTML for code, byte-preserving on the text layer.

    Keywords, strings, comments, and numbers get palette-colored spans;
    anything the tokenizer rejects falls back to plain escaped text.
    """
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(source).readline))
    except (tokenize.TokenError, SyntaxError, ValueError):
        return html.escape(source)
    lines = source.split("\n")
    out: list[str] = []
    cursor = (1, 0)
    for tok in tokens:
        role = _token_role(tok)
        if role is None or not tok.string:
            continue
        out.append(html.escape(_slice_lines(lines, cursor, tok.start)))
        color = theme.color(role)
        out.append(f'<span style="color:{color}">{html.escape(tok.string)}</span>')
        cursor = tok.end
    out.append(html.escape(_slice_lines(lines, cursor, (len(lines), len(lines[-1])))))
    return "".join(out)


def _markdown_styles(theme: Theme) -> dict[str, str]:
    p = theme.palette
    return {
        "link": f'color:{p["link"]};text-decoration:underline',
        "table": f'border-collapse:collapse;border:1px solid {p["table_border"]}',
        "th": (
            f'background-color:{p["table_header_bg"]};'
            f'border:1px solid {p["table_border"]};padding:4px;text-align:left'
        ),
        "td": f'border:1px solid {p["table_border"]};padding:4px',
        "pre": f'background-color:{p["cell_bg"]};padding:8px;overflow:auto',
        "code": f'background-color:{p["cell_bg"]}',
    }


def _image_alt(bundle: OutputBundle, mime: str, payload: str) -> str | None:
    alt = nbmodel.output_alt_text(bundle, mime)
    if alt is not None:
        return alt
    if mime == "image/png":
        try:
            data = base64.b64decode(re.sub(r"\s+", "", payload), validate=True)
            return altpng.extract_alt(data)
        except (ValueError, altpng.NotAPng):
            return None
    return None


def _render_image(bundle: OutputBundle, mime: str, payload: str) -> str:
    if mime == nbmodel.SVG_MIME and payload.lstrip().startswith("<"):
        encoded = base64.b64encode(payload.encode("utf-8")).decode("ascii")
    else:
        encoded = re.sub(r"\s+", "", payload)
        base64.b64decode(encoded, validate=True)  # fail early on garbage
    alt = _image_alt(bundle, mime, payload)
    alt_attr = f' alt="{html.escape(alt, quote=True)}"' if alt is not None else ""
    return f'<img src="data:{mime};base64,{encoded}"{alt_attr}/>'


_PLACEHOLDER_TEXT = "output not rendered"


def _render_bundle(bundle: OutputBundle, theme: Theme) -> str:
    p = theme.palette
    parts: list[str] = []
    payloads = bundle.mime_payloads
    image_mimes = [m for m in sorted(payloads) if m in nbmodel.IMAGE_MIMES]
    for mime in image_mimes:
        try:
            parts.append(_render_image(bundle, mime, payloads[mime]))
        except ValueError:
            parts.append(
                f'<div class="output-unrenderable">[{html.escape(mime)}: undecodable payload]</div>'
            )
    pre_style = f'style="color:{p["fg_text"]};margin:4px 0"'
    if bundle.output_kind in ("stream", "error"):
        text = strip_ansi(payloads.get("text/plain", ""))
        parts.append(f'<pre class="output-text" {pre_style}>{html.escape(text)}</pre>')
    elif "text/html" in payloads:
        parts.append(f'<div class="output-html">{payloads["text/html"]}</div>')
    elif "text/markdown" in payloads:
        parts.append(
            '<div class="output-markdown">'
            + render_markdown_styled(payloads["text/markdown"], _markdown_styles(theme))
            + "</div>"
        )
    elif "text/latex" in payloads:
        parts.append(
            f'<pre class="output-latex" {pre_style}>{html.escape(payloads["text/latex"])}</pre>'
        )
    else:
        app_mimes = sorted(m for m in payloads if m not in nbmodel.IMAGE_MIMES and m != "text/plain")
        if app_mimes:
            label = html.escape(app_mimes[0])
            parts.append(
                f'<div class="output-placeholder" style="border:1px dashed {p["table_border"]};'
                f'padding:4px">[{label} {_PLACEHOLDER_TEXT}]</div>'
            )
        elif "text/plain" in payloads and not image_mimes:
            text = strip_ansi(payloads["text/plain"])
            parts.append(f'<pre class="output-text" {pre_style}>{html.escape(text)}</pre>')
    return (
        f'<div class="output output-{bundle.output_kind}">' + "".join(parts) + "</div>"
    )


def export_html(nb: Notebook, theme: Theme) -> HtmlDocument:
    """Render a notebook to one standalone themed HTML document.

    Emits exactly one container div per notebook cell, in order; raw cells
    produce an empty container. Per-output render failures degrade to a
    visible placeholder and never abort the export.
    """
    p = theme.palette
    md_styles = _markdown_styles(theme)
    stem = Path(nb.path).stem or "notebook"
    parts: list[str] = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8"/>',
        '<meta name="viewport" content="width=device-width, initial-scale=1"/>',
        f"<title>{html.escape(stem)}</title>",
        "</head>",
        f'<body style="background-color:{p["page_bg"]};color:{p["fg_text"]};'
        'font-family:sans-serif;margin:16px">',
    ]
    for cell in nb.cells:
        if cell.kind == nbmodel.MARKDOWN:
            parts.append(
                '<div class="cell cell-markdown">'
                + render_markdown_styled(cell.source, md_styles)
                + "</div>"
            )
        elif cell.kind == nbmodel.CODE:
            chunks = [
                f'<pre class="cell-source" style="background-color:{p["cell_bg"]};'
                f'color:{p["fg_text"]};padding:8px;overflow:auto">'
                + highlight_source(cell.source, theme)
                + "</pre>"
            ]
            for bundle in cell.outputs:
                try:
                    chunks.append(_render_bundle(bundle, theme))
                except Exception:
                    chunks.append(
                        '<div class="output output-unrenderable">'
                        f"[{_PLACEHOLDER_TEXT}]</div>"
                    )
            parts.append('<div class="cell cell-code">' + "".join(chunks) + "</div>")
        else:
            parts.append('<div class="cell cell-raw"></div>')
    parts.append("</body>")
    parts.append("</html>")
    return HtmlDocument("\n".join(parts).encode("utf-8"), theme.name, nb.path)


def assign_output_names(paths: Iterable[str]) -> dict[str, str]:
    """Stable stem-based output names, disambiguated in sorted path order."""
    names: dict[str, str] = {}
    used: set[str] = set()
    for path in sorted(str(p) for p in paths):
        stem = Path(path).stem or "notebook"
        candidate = stem
        serial = 1
        while candidate in used:
            serial += 1
            candidate = f"{stem}-{serial}"
        used.add(candidate)
        names[path] = candidate
    return names


def export_corpus(
    notebooks: Iterable[Notebook],
    out_dir: Path,
    themes: list[Theme],
    names: dict[str, str] | None = None,
) -> list[dict]:
    """Write ``<out>/<theme>/<stem>.html`` for every (notebook, theme) pair.

    Returns manifest rows; failures are recorded per file and never stop
    the rest of the corpus. Re-running on unchanged input produces
    byte-identical files.
    """
    notebooks = list(notebooks)
    if names is None:
        names = assign_output_names(nb.path for nb in notebooks)
    manifest: list[dict] = []
    for theme in themes:
        (out_dir / theme.name).mkdir(parents=True, exist_ok=True)
    for nb in sorted(notebooks, key=lambda n: n.path):
        for theme in themes:
            target = out_dir / theme.name / f"{names[str(nb.path)]}.html"
            try:
                doc = export_html(nb, theme)
                target.write_bytes(doc.data)
            except OSError as exc:
                manifest.append(
                    {"notebook": nb.path, "theme": theme.name, "error": str(exc)}
                )
                continue
            manifest.append(
                {
                    "notebook": nb.path,
                    "theme": theme.name,
                    "output": str(target),
                    "size": len(doc.data),
                    "sha256": hashlib.sha256(doc.data).hexdigest(),
                }
            )
    return manifest


def write_manifest(manifest: list[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in manifest:
            handle.write(json.dumps(row, sort_keys=True) + "\n")
