from __future__ import annotations

import base64
import json
import struct
import zlib

import pytest

from nbaudit.themes import load_theme

# Filled by the acceptance suite; rendered after the test run so the
# per-criterion outcome is always visible regardless of capture settings.
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


def chunk(ctype: bytes, payload: bytes) -> bytes:
    """PNG chunk encoder, kept separate from the package implementation."""
    return (
        struct.pack(">I", len(payload))
        + ctype
        + payload
        + struct.pack(">I", zlib.crc32(ctype + payload) & 0xFFFFFFFF)
    )


def tiny_png(red: int = 255, green: int = 0, blue: int = 0) -> bytes:
    """A hand-assembled 1x1 RGB PNG (independent of any library encoder)."""
    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0)
    raw = bytes([0, red, green, blue])  # filter byte + one pixel
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(raw))
        + chunk(b"IEND", b"")
    )


TINY_PNG = tiny_png()
TINY_PNG_B64 = base64.b64encode(TINY_PNG).decode("ascii")


def md_cell(source: str) -> dict:
    return {"cell_type": "markdown", "metadata": {}, "source": source}


def raw_cell(source: str) -> dict:
    return {"cell_type": "raw", "metadata": {}, "source": source}


def code_cell(source: str, outputs: list | None = None, count: int | None = 1) -> dict:
    return {
        "cell_type": "code",
        "metadata": {},
        "execution_count": count,
        "source": source,
        "outputs": outputs or [],
    }


def png_output(b64: str = TINY_PNG_B64, alt: str | None = None, extra: dict | None = None) -> dict:
    data = {"image/png": b64}
    if extra:
        data.update(extra)
    metadata: dict = {}
    if alt is not None:
        metadata["alt"] = alt
    return {"output_type": "display_data", "data": data, "metadata": metadata}


def html_output(html: str) -> dict:
    return {
        "output_type": "execute_result",
        "execution_count": 1,
        "data": {"text/html": html, "text/plain": "<pandas.DataFrame>"},
        "metadata": {},
    }


def text_output(text: str = "42") -> dict:
    return {
        "output_type": "execute_result",
        "execution_count": 1,
        "data": {"text/plain": text},
        "metadata": {},
    }


def stream_output(text: str = "done\n") -> dict:
    return {"output_type": "stream", "name": "stdout", "text": text}


def notebook_json(cells: list[dict], language: str | None = "python") -> dict:
    metadata: dict = {}
    if language is not None:
        metadata["language_info"] = {"name": language}
    return {
        "nbformat": 4,
        "nbformat_minor": 5,
        "metadata": metadata,
        "cells": cells,
    }


def notebook_bytes(cells: list[dict], language: str | None = "python") -> bytes:
    return json.dumps(notebook_json(cells, language)).encode("utf-8")


def html_table(rows: int, cols: int) -> str:
    """A pandas-style table with a header row; shape is (rows, cols)."""
    head = "<tr>" + "".join(f"<th>c{i}</th>" for i in range(cols)) + "</tr>"
    body = "".join(
        "<tr>" + "".join(f"<td>{r}.{c}</td>" for c in range(cols)) + "</tr>"
        for r in range(rows - 1)
    )
    return f"<table><thead>{head}</thead><tbody>{body}</tbody></table>"


def pipe_table(rows: int, cols: int) -> str:
    """Markdown pipe table rendering to (rows, cols): header plus rows-1 bodies."""
    header = "| " + " | ".join(f"c{i}" for i in range(cols)) + " |"
    rule = "|" + "|".join(" --- " for _ in range(cols)) + "|"
    body = [
        "| " + " | ".join(f"{r}{c}" for c in range(cols)) + " |"
        for r in range(rows - 1)
    ]
    return "\n".join([header, rule] + body)


@pytest.fixture(scope="session")
def light_theme():
    return load_theme("light")


@pytest.fixture(scope="session")
def all_themes():
    from nbaudit.themes import THEME_NAMES, load_themes

    return load_themes(THEME_NAMES)
