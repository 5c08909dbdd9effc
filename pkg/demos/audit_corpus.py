"""Run the full audit pipeline over a small generated corpus.

Creates a handful of notebooks (one deliberately malformed), audits them,
and prints the highlights of the corpus report: the output-type table,
alt coverage, heading placement, and per-theme error statistics. The same
artifacts are what `nbaudit audit <dir>` writes to disk.
"""

import base64
import json
import struct
import tempfile
import zlib
from pathlib import Path

from nbaudit import RunConfig, run_audit


def tiny_png_b64() -> str:
    def chunk(ctype, payload):
        crc = zlib.crc32(ctype + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + ctype + payload + struct.pack(">I", crc)

    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0)
    png = (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(b"\x00\x05\x05\x05"))
        + chunk(b"IEND", b"")
    )
    return base64.b64encode(png).decode()


def notebook(cells) -> bytes:
    return json.dumps(
        {
            "nbformat": 4,
            "nbformat_minor": 5,
            "metadata": {"language_info": {"name": "python"}},
            "cells": cells,
        }
    ).encode()


def md(source):
    return {"cell_type": "markdown", "metadata": {}, "source": source}


def code(source, outputs=()):
    return {
        "cell_type": "code",
        "metadata": {},
        "execution_count": 1,
        "source": source,
        "outputs": list(outputs),
    }


figure = {
    "output_type": "display_data",
    "data": {"image/png": tiny_png_b64(), "text/plain": "<Figure>"},
    "metadata": {},
}

base = Path(tempfile.mkdtemp(prefix="nbaudit-corpus-"))
corpus = base / "notebooks"
corpus.mkdir()

(corpus / "tour.ipynb").write_bytes(
    notebook(
        [
            md("# Tour\n\nA walk through the dataset."),
            code("import numpy as np\nvalues = np.arange(12)"),
            code("plot(values)", [figure]),
            md("The plotted values grow linearly."),
        ]
    )
)
(corpus / "tables.ipynb").write_bytes(
    notebook(
        [
            md("## Table overview\n\n| metric | value |\n| --- | --- |\n| rows | 120 |"),
            code("frame.head()", [figure]),
        ]
    )
)
(corpus / "broken.ipynb").write_bytes(b'{"cells": [')

outcome = run_audit(
    RunConfig(inputs=(str(corpus),), out_dir=str(base / "audit"), themes=("light", "darcula"))
)
report = outcome.report.to_json()

print(f"audited {report['n_notebooks']} files -> exit code {outcome.exit_code}")
print(f"valid: {report['n_valid']}; analyzed after language filter: {report['n_language_filtered']}\n")

print("output types:")
for row in report["output_type_table"]:
    print(f"  {row['rank']}. {row['category']}/{row['label']:12s} {row['total']:3d} ({row['percent']}%)")

alt = report["alt_coverage"]
print(f"\nalt coverage: {alt['with_alt']}/{alt['images']} ({alt['percent_with_alt']}%)")

print("\nfirst-heading heatmap (rows h1..h6, columns cell 1..n):")
for level, row in enumerate(report["heading_heatmap"], 1):
    print(f"  h{level}: {row}")

print("\ntheme error stats:")
for theme, stats in report["theme_error_stats"].items():
    errors = stats["errors"]
    print(f"  {theme:10s} mean={errors['mean']:.1f} stddev={errors['stddev']:.1f}")

print(f"\nartifacts written under {base / 'audit'}:")
for path in sorted((base / "audit").iterdir()):
    print(f"  {path.name}")
