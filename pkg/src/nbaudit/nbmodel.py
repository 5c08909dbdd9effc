"""Notebook document model: parsing, validation, and artifact extraction.

Notebook JSON (nbformat v3 or v4) is coerced to a single in-memory v4-style
model. v3 documents get a minimal coercion: worksheets are flattened, code
``input`` becomes ``source``, heading cells become markdown, and flat output
keys (``png``, ``html``, ...) are renamed to their MIME types. Anything
older than v3 is rejected.
"""

from __future__ import annotations

import base64
import json
import re
from dataclasses import dataclass, field
from typing import Any

from .mdrender import markdown_dom

CODE = "code"
MARKDOWN = "markdown"
RAW = "raw"

PROGRAMMATIC = "programmatic"
MARKDOWN_SOURCE = "markdown"

RASTER_MIMES = {
    "image/png": "PNG",
    "image/jpeg": "JPEG",
    "image/gif": "GIF",
    "image/bmp": "BMP",
}
SVG_MIME = "image/svg+xml"
IMAGE_MIMES = set(RASTER_MIMES) | {SVG_MIME}

_MAGIC_SIGNATURES = (
    (b"\x89PNG\r\n\x1a\n", "PNG"),
    (b"\xff\xd8\xff", "JPEG"),
    (b"GIF8", "GIF"),
    (b"BM", "BMP"),
)

_EXT_FORMATS = {
    ".png": "PNG",
    ".jpg": "JPEG",
    ".jpeg": "JPEG",
    ".gif": "GIF",
    ".bmp": "BMP",
    ".svg": "SVG",
}

# v3 output payloads store MIME data under short keys.
_V3_MIME_KEYS = {
    "text": "text/plain",
    "html": "text/html",
    "png": "image/png",
    "jpeg": "image/jpeg",
    "svg": "image/svg+xml",
    "javascript": "application/javascript",
    "json": "application/json",
    "latex": "text/latex",
    "pdf": "application/pdf",
}

_V3_OUTPUT_KINDS = {
    "pyout": "execute_result",
    "pyerr": "error",
    "display_data": "display_data",
    "stream": "stream",
}

OUTPUT_KINDS = {"execute_result", "display_data", "stream", "error"}


class ValidityError(Exception):
    """A file that cannot be coerced to the notebook model."""


class MalformedJson(ValidityError):
    pass


class NotANotebook(ValidityError):
    pass


class UnsupportedVersion(ValidityError):
    pass


class InvalidMime(ValueError):
    pass


@dataclass
class OutputBundle:
    """One output node: a MIME-type to payload map plus its kind."""

    mime_payloads: dict[str, str]
    output_kind: str
    metadata: dict[str, Any] = field(default_factory=dict)


@dataclass
class Cell:
    index: int  # 1-based position, the convention used in every report
    kind: str
    source: str
    outputs: list[OutputBundle] = field(default_factory=list)
    execution_count: int | None = None


@dataclass
class Notebook:
    path: str
    format_version: tuple[int, int]
    language: str | None
    cells: list[Cell]
    raw_size_bytes: int

    def code_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.kind == CODE]

    def markdown_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.kind == MARKDOWN]

    def to_json(self) -> dict[str, Any]:
        """Serialize back to a v4-shaped JSON document."""
        cells = []
        for cell in self.cells:
            node: dict[str, Any] = {
                "cell_type": cell.kind,
                "metadata": {},
                "source": cell.source,
            }
            if cell.kind == CODE:
                node["execution_count"] = cell.execution_count
                node["outputs"] = [_bundle_to_json(b) for b in cell.outputs]
            cells.append(node)
        metadata: dict[str, Any] = {}
        if self.language is not None:
            metadata["language_info"] = {"name": self.language}
        return {
            "nbformat": self.format_version[0],
            "nbformat_minor": self.format_version[1],
            "metadata": metadata,
            "cells": cells,
        }


@dataclass
class MimeClass:
    category: str  # Application | Image | Text
    label: str


@dataclass
class ImageArtifact:
    notebook_path: str
    cell_index: int
    format: str | None  # PNG/JPEG/GIF/BMP/SVG; None when undeterminable
    data: bytes
    provenance: str  # programmatic | markdown
    alt_text: str | None = None
    source_ref: str | None = None  # mime type or markdown src


@dataclass
class ImageExtractionError:
    notebook_path: str
    cell_index: int
    mime: str
    reason: str


# The named output types observed in notebook corpora, keyed by MIME type.
_MIME_TABLE: dict[str, tuple[str, str]] = {
    "text/plain": ("Text", "Plain"),
    "image/png": ("Image", "PNG"),
    "text/html": ("Text", "HTML"),
    "application/javascript": ("Application", "Javascript"),
    "application/vnd.jupyter.widget-view+json": ("Application", "Jupyter JSON Widget"),
    "text/markdown": ("Text", "Markdown"),
    "image/svg+xml": ("Image", "SVG"),
    "application/vnd.plotly.v1+json": ("Application", "Plotly v1 + JSON"),
    "text/latex": ("Text", "LaTeX"),
    "text/vnd.plotly.v1+html": ("Text", "Plotly v1 + HTML"),
    "image/jpeg": ("Image", "JPEG/JPG"),
    "application/vnd.bokehjs_load.v0+json": ("Application", "BokehJS + JSON"),
    "application/pdf": ("Application", "PDF"),
    "application/vdom.v1+json": ("Application", "VDOM.v1 + JSON"),
    "application/vnd.bokehjs_exec.v0+json": ("Application", "BokehJS + JSON"),
    "application/papermill.record+json": ("Application", "Papermill + JSON"),
    "application/vnd.holoviews_load.v0+json": ("Application", "Holoviews Load + JSON"),
    "application/vnd.holoviews_exec.v0+json": ("Application", "Holoviews Exec + JSON"),
    "application/json": ("Application", "JSON"),
    "application/vnd.google.colaboratory.intrinsic+json": ("Application", "Colaboratory Intrinsic"),
    "image/gif": ("Image", "GIF"),
    "image/bmp": ("Image", "BMP"),
    "text/vnd.graphviz": ("Text", "GraphVIZ"),
}

_CATEGORY_BY_PREFIX = {"application": "Application", "image": "Image", "text": "Text"}

_MIME_SYNTAX = re.compile(r"^[!#$%&'*+.^_`|~0-9A-Za-z-]+/[!#$%&'*+.^_`|~0-9A-Za-z-]+$")


def classify_mime(mime: str) -> MimeClass:
    """Map a MIME type to its (category, label) output class.

    The named corpus types map to their canonical labels; unknown subtypes
    fall into an ``Other`` bucket under the category chosen by prefix.
    Top-level types outside application/image/text are bucketed under
    Application, keeping the classification total.
    """
    base = mime.split(";", 1)[0].strip().lower()
    if not _MIME_SYNTAX.match(base):
        raise InvalidMime(f"not a type/subtype MIME string: {mime!r}")
    if base in _MIME_TABLE:
        category, label = _MIME_TABLE[base]
        return MimeClass(category, label)
    prefix = base.split("/", 1)[0]
    return MimeClass(_CATEGORY_BY_PREFIX.get(prefix, "Application"), "Other")


def _join_source(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return "".join(str(part) for part in value)
    if value is None:
        return ""
    return str(value)


def _normalize_payload(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return "".join(str(part) for part in value)
    # Structured payloads (widget state, plotly figures) are kept as
    # canonical JSON text so the model stays string-valued.
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _bundle_to_json(bundle: OutputBundle) -> dict[str, Any]:
    if bundle.output_kind == "stream":
        return {
            "output_type": "stream",
            "name": str(bundle.metadata.get("stream_name", "stdout")),
            "text": bundle.mime_payloads.get("text/plain", ""),
        }
    node: dict[str, Any] = {
        "output_type": bundle.output_kind,
        "data": dict(sorted(bundle.mime_payloads.items())),
        "metadata": bundle.metadata,
    }
    if bundle.output_kind == "execute_result":
        node["execution_count"] = None
    return node


def _coerce_v4_output(node: dict[str, Any]) -> OutputBundle:
    kind = node.get("output_type")
    if kind == "stream":
        text = _join_source(node.get("text"))
        return OutputBundle(
            {"text/plain": text},
            "stream",
            {"stream_name": node.get("name", "stdout")},
        )
    if kind == "error":
        trace = node.get("traceback")
        if isinstance(trace, list):
            text = "\n".join(str(line) for line in trace)
        else:
            text = f"{node.get('ename', '')}: {node.get('evalue', '')}"
        return OutputBundle({"text/plain": text}, "error", {})
    payloads = {
        str(mime): _normalize_payload(value)
        for mime, value in (node.get("data") or {}).items()
    }
    metadata = node.get("metadata")
    kind = kind if kind in OUTPUT_KINDS else "display_data"
    return OutputBundle(payloads, kind, metadata if isinstance(metadata, dict) else {})


def _coerce_v3_output(node: dict[str, Any]) -> OutputBundle:
    raw_kind = node.get("output_type", "display_data")
    kind = _V3_OUTPUT_KINDS.get(raw_kind, "display_data")
    if kind == "stream":
        return OutputBundle(
            {"text/plain": _join_source(node.get("text"))},
            "stream",
            {"stream_name": node.get("stream", "stdout")},
        )
    if kind == "error":
        trace = node.get("traceback")
        if isinstance(trace, list):
            text = "\n".join(str(line) for line in trace)
        else:
            text = f"{node.get('ename', '')}: {node.get('evalue', '')}"
        return OutputBundle({"text/plain": text}, "error", {})
    payloads: dict[str, str] = {}
    for key, mime in _V3_MIME_KEYS.items():
        if key in node:
            payloads[mime] = _normalize_payload(node[key])
    metadata = node.get("metadata")
    return OutputBundle(payloads, kind, metadata if isinstance(metadata, dict) else {})


def _coerce_cell(node: dict[str, Any], index: int, major: int) -> Cell:
    kind = node.get("cell_type", RAW)
    source = _join_source(
        node.get("source", node.get("input", node.get("text")))
    )
    if kind == "heading":
        level = int(node.get("level", 1) or 1)
        level = min(max(level, 1), 6)
        return Cell(index, MARKDOWN, "#" * level + " " + source)
    if kind not in (CODE, MARKDOWN, RAW):
        return Cell(index, RAW, source)
    if kind != CODE:
        return Cell(index, kind, source)
    outputs = []
    for out in node.get("outputs") or []:
        if not isinstance(out, dict):
            continue
        outputs.append(_coerce_v4_output(out) if major >= 4 else _coerce_v3_output(out))
    count = node.get("execution_count", node.get("prompt_number"))
    return Cell(index, CODE, source, outputs, count if isinstance(count, int) else None)


def _read_language(metadata: Any) -> str | None:
    if not isinstance(metadata, dict):
        return None
    info = metadata.get("language_info")
    if isinstance(info, dict) and isinstance(info.get("name"), str):
        return info["name"]
    kernelspec = metadata.get("kernelspec")
    if isinstance(kernelspec, dict) and isinstance(kernelspec.get("language"), str):
        return kernelspec["language"]
    if isinstance(metadata.get("language"), str):
        return metadata["language"]
    return None


def parse_notebook(raw: bytes, path: str) -> Notebook:
    """Parse notebook bytes, coercing v3 documents to the v4 model.

    Raises MalformedJson, NotANotebook, or UnsupportedVersion; any notebook
    returned satisfies the model invariants (ordered 1-based cells, outputs
    only under code cells, format major 4).
    """
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedJson(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise NotANotebook(f"{path}: top level is not an object")

    if "cells" in data and isinstance(data["cells"], list):
        raw_cells = data["cells"]
        declared = data.get("nbformat")
        major = declared if isinstance(declared, int) else 4
    elif "worksheets" in data and isinstance(data["worksheets"], list):
        raw_cells = []
        for sheet in data["worksheets"]:
            if isinstance(sheet, dict) and isinstance(sheet.get("cells"), list):
                raw_cells.extend(sheet["cells"])
        declared = data.get("nbformat")
        major = declared if isinstance(declared, int) else 3
    else:
        raise NotANotebook(f"{path}: no cells or worksheets structure")

    if major < 3:
        raise UnsupportedVersion(f"{path}: nbformat {major} is older than v3")

    cells = [
        _coerce_cell(node, i, major)
        for i, node in enumerate(raw_cells, 1)
        if isinstance(node, dict)
    ]
    minor = data.get("nbformat_minor")
    version = (4, minor if major >= 4 and isinstance(minor, int) else 0)
    return Notebook(
        path=path,
        format_version=version,
        language=_read_language(data.get("metadata")),
        cells=cells,
        raw_size_bytes=len(raw),
    )


def parse_notebook_file(path) -> Notebook:
    with open(path, "rb") as handle:
        return parse_notebook(handle.read(), str(path))


def filter_language(nb: Notebook, want: str) -> bool:
    """True iff the notebook declares the wanted language.

    Notebooks without language metadata are excluded (returns False), the
    conservative choice for language-specific code analysis.
    """
    if nb.language is None:
        return False
    return nb.language.strip().lower() == want.strip().lower()


_B64_CLEAN = re.compile(r"\s+")


def _decode_base64(payload: str) -> bytes:
    compact = _B64_CLEAN.sub("", payload)
    return base64.b64decode(compact, validate=True)


def _sniff_format(data: bytes) -> str | None:
    for signature, name in _MAGIC_SIGNATURES:
        if data.startswith(signature):
            return name
    return None


def output_alt_text(bundle: OutputBundle, mime: str) -> str | None:
    """Alt text attached to an output payload via output metadata."""
    meta = bundle.metadata
    per_mime = meta.get(mime)
    if isinstance(per_mime, dict) and isinstance(per_mime.get("alt"), str):
        return per_mime["alt"]
    if isinstance(meta.get("alt"), str):
        return meta["alt"]
    return None


def _markdown_format(src: str) -> str | None:
    path = src.split("?", 1)[0].split("#", 1)[0].lower()
    for ext, fmt in _EXT_FORMATS.items():
        if path.endswith(ext):
            return fmt
    return None


_DATA_URI = re.compile(r"^data:(image/[\w.+-]+);base64,(.*)$", re.DOTALL)


def extract_images(
    nb: Notebook,
) -> tuple[list[ImageArtifact], list[ImageExtractionError]]:
    """Collect every image artifact in the notebook.

    One artifact per image MIME payload in code-cell outputs (provenance
    ``programmatic``) plus one per rendered image in markdown cells
    (provenance ``markdown``). Markdown images pointing at external paths
    keep empty bytes; they are inventoried, never fetched. Decode failures
    are reported alongside, never raised.
    """
    images: list[ImageArtifact] = []
    errors: list[ImageExtractionError] = []
    for cell in nb.cells:
        if cell.kind == CODE:
            for bundle in cell.outputs:
                for mime in sorted(bundle.mime_payloads):
                    if mime not in IMAGE_MIMES:
                        continue
                    payload = bundle.mime_payloads[mime]
                    alt = output_alt_text(bundle, mime)
                    if mime == SVG_MIME:
                        text = payload
                        if not text.lstrip().startswith("<"):
                            try:
                                text = _decode_base64(payload).decode("utf-8")
                            except (ValueError, UnicodeDecodeError) as exc:
                                errors.append(
                                    ImageExtractionError(nb.path, cell.index, mime, str(exc))
                                )
                                continue
                        images.append(
                            ImageArtifact(
                                nb.path, cell.index, "SVG", text.encode("utf-8"),
                                PROGRAMMATIC, alt, mime,
                            )
                        )
                        continue
                    try:
                        data = _decode_base64(payload)
                    except ValueError as exc:
                        errors.append(
                            ImageExtractionError(nb.path, cell.index, mime, str(exc))
                        )
                        continue
                    if not data:
                        errors.append(
                            ImageExtractionError(nb.path, cell.index, mime, "empty payload")
                        )
                        continue
                    sniffed = _sniff_format(data)
                    declared = RASTER_MIMES[mime]
                    if sniffed is None:
                        errors.append(
                            ImageExtractionError(
                                nb.path, cell.index, mime,
                                f"payload does not match any raster signature (declared {declared})",
                            )
                        )
                        continue
                    images.append(
                        ImageArtifact(
                            nb.path, cell.index, sniffed, data, PROGRAMMATIC, alt, mime
                        )
                    )
        elif cell.kind == MARKDOWN:
            for el in markdown_dom(cell.source).find_all("img"):
                src = el.get("src", "") or ""
                alt = el.get("alt") if el.has_attr("alt") else None
                data = b""
                fmt = _markdown_format(src)
                match = _DATA_URI.match(src)
                if match:
                    try:
                        data = _decode_base64(match.group(2))
                    except ValueError as exc:
                        errors.append(
                            ImageExtractionError(nb.path, cell.index, match.group(1), str(exc))
                        )
                        data = b""
                    sniffed = _sniff_format(data)
                    if sniffed:
                        fmt = sniffed
                images.append(
                    ImageArtifact(nb.path, cell.index, fmt, data, MARKDOWN_SOURCE, alt, src)
                )
    return images, errors
