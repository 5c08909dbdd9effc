"""Kernel-magic stripping and import/call extraction for code cells.

Notebook kernels accept directives (``%magic``, ``%%cell magics``, ``!shell``
lines, trailing-``?`` help lookups) that are not part of the Python grammar,
so cells are cleaned line by line before parsing. Removed lines are replaced
with blanks to keep line numbers stable for diagnostics. The remaining
source is parsed with the running interpreter's grammar (CPython 3.10+);
cells needing newer syntax surface as ParseFailure, recorded per cell.
"""

from __future__ import annotations

import ast
import sys
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

CELL_MAGIC = "cell_magic"
LINE_MAGIC = "line_magic"
SHELL = "shell"
HELP = "help"


class ParseFailure(Exception):
    """Source that does not parse even after magic stripping."""

    def __init__(self, cell_index: int, error: SyntaxError) -> None:
        super().__init__(f"cell {cell_index}: {error.msg} (line {error.lineno})")
        self.cell_index = cell_index
        self.lineno = error.lineno


@dataclass
class CleanedSource:
    text: str
    removed_lines: list[tuple[int, str]] = field(default_factory=list)


@dataclass
class ImportRecord:
    module: str
    imported_name: str | None
    alias: str
    cell_index: int


@dataclass
class CallRecord:
    target: str
    cell_index: int
    is_builtin: bool = False
    resolved_module: str | None = None


def strip_magics(source: str) -> CleanedSource:
    """Blank out magic, shell, and help lines; keep everything else verbatim.

    A line is removed when its first non-whitespace character is ``%`` or
    ``!``, or its last non-whitespace character is ``?``. The test is
    anchored to line edges, so ``a % b`` and ``x != y`` survive. Removal
    substitutes an empty line, which makes the operation idempotent and
    keeps downstream line numbers aligned with the original cell.
    """
    lines = source.split("\n")
    kept: list[str] = []
    removed: list[tuple[int, str]] = []
    for number, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped:
            kept.append(line)
            continue
        if stripped.startswith("%%"):
            reason = CELL_MAGIC
        elif stripped.startswith("%"):
            reason = LINE_MAGIC
        elif stripped.startswith("!"):
            reason = SHELL
        elif stripped.endswith("?"):
            reason = HELP
        else:
            kept.append(line)
            continue
        removed.append((number, reason))
        kept.append("")
    return CleanedSource("\n".join(kept), removed)


def load_builtin_names() -> frozenset[str]:
    """Built-in function exclusion list from the packaged config file."""
    text = resources.files("nbaudit.data").joinpath("python_builtins.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


def _dotted_name(node: ast.expr) -> str | None:
    parts: list[str] = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
        return ".".join(reversed(parts))
    return None


def parse_and_extract(
    cleaned: CleanedSource,
    cell_index: int,
    builtins: frozenset[str] | None = None,
) -> tuple[list[ImportRecord], list[CallRecord]]:
    """Walk the cell's syntax tree for import statements and call targets.

    Call targets are recorded as surface dotted names (``plt.plot``), the
    spelling that appears in the source; chains rooted in anything other
    than a plain name (call results, subscripts) are skipped. Raises
    ParseFailure on syntax errors.
    """
    if builtins is None:
        builtins = load_builtin_names()
    try:
        tree = ast.parse(cleaned.text)
    except SyntaxError as exc:
        raise ParseFailure(cell_index, exc) from exc
    imports: list[ImportRecord] = []
    calls: list[CallRecord] = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for name in node.names:
                binding = name.asname or name.name.split(".", 1)[0]
                imports.append(ImportRecord(name.name, None, binding, cell_index))
        elif isinstance(node, ast.ImportFrom):
            module = "." * node.level + (node.module or "")
            for name in node.names:
                binding = name.asname or name.name
                imports.append(ImportRecord(module, name.name, binding, cell_index))
        elif isinstance(node, ast.Call):
            target = _dotted_name(node.func)
            if target:
                is_builtin = "." not in target and target in builtins
                calls.append(CallRecord(target, cell_index, is_builtin))
    return imports, calls


def resolve_aliases(
    imports: list[ImportRecord], calls: list[CallRecord]
) -> None:
    """Attribute call targets to top-level modules via the import bindings.

    ``plt.plot`` resolves to ``matplotlib`` when the notebook bound ``plt``
    with ``import matplotlib.pyplot as plt``. Resolution is stored on the
    CallRecord; the surface target is left untouched.
    """
    bindings: dict[str, str] = {}
    for record in imports:
        if record.module.startswith("."):
            continue
        if record.imported_name is None:
            bindings[record.alias] = record.module
        elif record.imported_name != "*":
            bindings[record.alias] = f"{record.module}.{record.imported_name}"
    for call in calls:
        head = call.target.split(".", 1)[0]
        resolved = bindings.get(head)
        if resolved:
            call.resolved_module = resolved.split(".", 1)[0]


@dataclass
class UsageRanking:
    """Descending-frequency usage tables, ties broken lexicographically."""

    modules: list[tuple[str, int]]
    modules_no_stdlib: list[tuple[str, int]]
    calls: list[tuple[str, int]]
    calls_no_builtins: list[tuple[str, int]]


def _ranked(counter: Counter[str]) -> list[tuple[str, int]]:
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))


def rank_usage(
    imports: list[ImportRecord],
    calls: list[CallRecord],
    builtins: frozenset[str] | None = None,
) -> UsageRanking:
    """Corpus-wide module and call-target frequency tables.

    The module table is produced with and without standard-library modules
    (judged by the top-level package against the running interpreter's
    stdlib list); the call table with and without built-in functions.
    """
    if builtins is None:
        builtins = load_builtin_names()
    stdlib = frozenset(sys.stdlib_module_names)
    module_counts: Counter[str] = Counter(r.module for r in imports)
    call_counts: Counter[str] = Counter(c.target for c in calls)
    modules_no_std: Counter[str] = Counter(
        r.module for r in imports
        if r.module.split(".", 1)[0] not in stdlib and not r.module.startswith(".")
    )
    calls_no_builtin: Counter[str] = Counter(
        c.target for c in calls if not c.is_builtin
    )
    return UsageRanking(
        modules=_ranked(module_counts),
        modules_no_stdlib=_ranked(modules_no_std),
        calls=_ranked(call_counts),
        calls_no_builtins=_ranked(calls_no_builtin),
    )


def analyze_cell(
    source: str, cell_index: int, builtins: frozenset[str] | None = None
) -> tuple[CleanedSource, list[ImportRecord], list[CallRecord]]:
    """Strip magics then extract; ParseFailure propagates to the caller."""
    cleaned = strip_magics(source)
    imports, calls = parse_and_extract(cleaned, cell_index, builtins)
    return cleaned, imports, calls
