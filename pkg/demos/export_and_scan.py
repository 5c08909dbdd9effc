"""Export one notebook in every bundled theme and scan the results.

Shows the theme palettes in action: the same document, exported six ways,
accumulates different numbers of contrast errors while the structural
findings (missing alt, unscoped table headers) stay constant.
"""

import json
import tempfile
from pathlib import Path

from nbaudit import export_html, scan, theme_comparison
from nbaudit.nbmodel import parse_notebook
from nbaudit.themes import THEME_NAMES, load_theme

document = {
    "nbformat": 4,
    "nbformat_minor": 5,
    "metadata": {"language_info": {"name": "python"}},
    "cells": [
        {
            "cell_type": "markdown",
            "metadata": {},
            "source": "# Model results\n\nSee the [full writeup](https://example.org/writeup).",
        },
        {
            "cell_type": "code",
            "metadata": {},
            "execution_count": 1,
            "source": "# fit the model\nscore = 0.93  # holdout accuracy\nprint(score)",
            "outputs": [{"output_type": "stream", "name": "stdout", "text": "0.93\n"}],
        },
        {
            "cell_type": "code",
            "metadata": {},
            "execution_count": 2,
            "source": "frame.describe()",
            "outputs": [
                {
                    "output_type": "execute_result",
                    "execution_count": 2,
                    "data": {
                        "text/html": "<table><tr><th>stat</th><th>value</th></tr>"
                        "<tr><td>mean</td><td>0.91</td></tr></table>"
                    },
                    "metadata": {},
                }
            ],
        },
    ],
}

nb = parse_notebook(json.dumps(document).encode(), "results.ipynb")
out_dir = Path(tempfile.mkdtemp(prefix="nbaudit-demo-"))

results = []
print(f"writing themed exports under {out_dir}\n")
print(f"{'theme':18s} {'bytes':>7s} {'errors':>7s} {'warnings':>9s}")
for name in THEME_NAMES:
    theme = load_theme(name)
    doc = export_html(nb, theme)
    (out_dir / f"{name}.html").write_bytes(doc.data)
    result = scan(doc, theme)
    results.append(result)
    print(f"{name:18s} {len(doc.data):7d} {result.errors():7d} {result.warnings():9d}")

comparison = theme_comparison(results)
rules = sorted({rule for cells in comparison.rule_heatmap.values() for rule in cells})
print("\nper-rule error counts normalized by the per-rule maximum:")
print(f"{'theme':18s} " + " ".join(f"{r:>10s}" for r in rules))
for theme_name in sorted(comparison.rule_heatmap):
    cells = comparison.rule_heatmap[theme_name]
    print(
        f"{theme_name:18s} "
        + " ".join(f"{cells.get(rule, 0.0):10.2f}" for rule in rules)
    )
