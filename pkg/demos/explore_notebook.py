"""Walk through parsing a notebook and measuring its accessibility.

Builds a small notebook document in memory, coerces it to the document
model, extracts the image artifacts, and prints the per-notebook metrics
that the corpus pipeline aggregates.
"""

import base64
import json
import struct
import zlib

from nbaudit import compute_metrics, extract_images, parse_notebook


def tiny_png() -> bytes:
    def chunk(ctype, payload):
        crc = zlib.crc32(ctype + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + ctype + payload + struct.pack(">I", crc)

    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(b"\x00\x20\x60\xff"))
        + chunk(b"IEND", b"")
    )


PNG_B64 = base64.b64encode(tiny_png()).decode()

document = {
    "nbformat": 4,
    "nbformat_minor": 5,
    "metadata": {"language_info": {"name": "python"}},
    "cells": [
        {
            "cell_type": "markdown",
            "metadata": {},
            "source": "# Sales exploration\n\nQuick look at the quarterly numbers.",
        },
        {
            "cell_type": "code",
            "metadata": {},
            "execution_count": 1,
            "source": "import pandas as pd\nframe = pd.read_csv('sales.csv')\nframe.head()",
            "outputs": [
                {
                    "output_type": "execute_result",
                    "execution_count": 1,
                    "data": {
                        "text/html": "<table><tr><th>q</th><th>total</th></tr>"
                        "<tr><td>1</td><td>714</td></tr></table>",
                        "text/plain": "   q  total",
                    },
                    "metadata": {},
                }
            ],
        },
        {
            "cell_type": "code",
            "metadata": {},
            "execution_count": 2,
            "source": "%matplotlib inline\nimport matplotlib.pyplot as plt\nplt.plot(frame.total)",
            "outputs": [
                {
                    "output_type": "display_data",
                    "data": {"image/png": PNG_B64, "text/plain": "<Figure>"},
                    "metadata": {},
                }
            ],
        },
        {
            "cell_type": "markdown",
            "metadata": {},
            "source": "Totals rise through the year.\n\n![quarterly totals line chart](figures/trend.png)",
        },
    ],
}

nb = parse_notebook(json.dumps(document).encode(), "sales.ipynb")
print(f"parsed {nb.path}: {len(nb.cells)} cells, language={nb.language}")
for cell in nb.cells:
    mimes = sorted({m for b in cell.outputs for m in b.mime_payloads})
    print(f"  cell {cell.index}: {cell.kind:9s} outputs={len(cell.outputs)} {mimes}")

images, failures = extract_images(nb)
print(f"\nimage artifacts ({len(images)}):")
for image in images:
    print(
        f"  cell {image.cell_index}: {image.format} via {image.provenance}, "
        f"alt={image.alt_text!r}, {len(image.data)} bytes"
    )

metrics = compute_metrics(nb, images)
print("\nmetrics:")
print(f"  first heading: level {metrics.first_heading[0]} in cell {metrics.first_heading[1]}")
print(f"  tables: {metrics.n_tables} with shapes {metrics.table_shapes}")
print(f"  alt coverage: {metrics.n_images_with_alt}/{metrics.n_images}")
for flags in metrics.figure_context:
    print(
        f"  figure cell {flags.cell_index}: candidate={flags.candidate} "
        f"markdown_neighbor={flags.has_markdown_neighbor} "
        f"table_neighbor={flags.has_table_neighbor} fully={flags.fully_supported}"
    )
print(f"  size risk: {metrics.size_risk} ({metrics.size_bytes} bytes)")
