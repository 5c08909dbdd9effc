from __future__ import annotations

import ast
import random

import pytest
from hypothesis import given, strategies as st

from nbaudit.codeanalysis import (
    CallRecord,
    ImportRecord,
    ParseFailure,
    analyze_cell,
    load_builtin_names,
    parse_and_extract,
    rank_usage,
    resolve_aliases,
    strip_magics,
)

BUILTINS = load_builtin_names()


def test_line_magic_stripped():
    cleaned = strip_magics("%matplotlib inline\nimport numpy")
    assert cleaned.text == "\nimport numpy"
    assert cleaned.removed_lines == [(1, "line_magic")]


def test_shell_and_help_stripped():
    cleaned = strip_magics("!pip install x\nlen?\nx = 1")
    assert cleaned.text == "\n\nx = 1"
    assert cleaned.removed_lines == [(1, "shell"), (2, "help")]


def test_cell_magic_reason():
    cleaned = strip_magics("%%time\nx = 1")
    assert cleaned.removed_lines == [(1, "cell_magic")]
    assert cleaned.text == "\nx = 1"


def test_modulo_expression_survives_and_parses():
    source = "y = a % b"
    cleaned = strip_magics(source)
    assert cleaned.text == source
    # oracle: the surviving line must be syntactically valid
    ast.parse(cleaned.text)


def test_indented_magic_stripped_on_first_nonwhitespace():
    cleaned = strip_magics("def f():\n    %timeit g()\n    return 1")
    assert cleaned.text == "def f():\n\n    return 1"
    assert cleaned.removed_lines == [(2, "line_magic")]


def test_strip_preserves_line_count():
    source = "%%bash\necho hi\nx = 1\nhelp?\n"
    cleaned = strip_magics(source)
    assert len(cleaned.text.split("\n")) == len(source.split("\n"))


def test_strip_idempotent_examples():
    for source in ("%magic\nx=1", "", "a % b\n!ls\nq?", "   %x", "\n\n"):
        once = strip_magics(source)
        twice = strip_magics(once.text)
        assert once.text == twice.text
        assert twice.removed_lines == []


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=300))
def test_strip_idempotent_property(source):
    once = strip_magics(source)
    assert strip_magics(once.text).text == once.text


def test_strip_idempotent_seeded_random_inputs():
    rng = random.Random(99)
    glyphs = "abc %!?\n\t=#()"
    for _ in range(1000):
        source = "".join(rng.choice(glyphs) for _ in range(rng.randrange(0, 80)))
        once = strip_magics(source)
        assert strip_magics(once.text).text == once.text


def test_magic_free_source_is_identity():
    source = "import os\n\ndef f(x):\n    return x % 3\n"
    assert strip_magics(source).text == source


def test_import_forms():
    cleaned = strip_magics(
        "import numpy as np\nimport os.path\nfrom m import f as g\nfrom . import h"
    )
    imports, _ = parse_and_extract(cleaned, 1, BUILTINS)
    assert ImportRecord("numpy", None, "np", 1) in imports
    assert ImportRecord("os.path", None, "os", 1) in imports
    assert ImportRecord("m", "f", "g", 1) in imports
    assert ImportRecord(".", "h", "h", 1) in imports


def test_call_extraction_surface_names():
    cleaned = strip_magics("import matplotlib.pyplot as plt\nplt.plot(x)\nlen(x)")
    imports, calls = parse_and_extract(cleaned, 2, BUILTINS)
    assert [i.module for i in imports] == ["matplotlib.pyplot"]
    by_target = {c.target: c for c in calls}
    assert by_target["plt.plot"].is_builtin is False
    assert by_target["len"].is_builtin is True


def test_defs_without_calls_yield_nothing():
    cleaned = strip_magics("def f():\n  return")
    imports, calls = parse_and_extract(cleaned, 1, BUILTINS)
    assert imports == [] and calls == []


def test_call_chain_rooted_in_call_skipped():
    cleaned = strip_magics("df.head().T\nmodel.fit(x).predict(y)\nval = obj.attr.method()")
    _, calls = parse_and_extract(cleaned, 1, BUILTINS)
    targets = {c.target for c in calls}
    assert "df.head" in targets
    assert "model.fit" in targets
    assert "obj.attr.method" in targets
    assert not any(".predict" in t for t in targets)


def test_parse_failure_raised():
    cleaned = strip_magics("def broken(:\n  pass")
    with pytest.raises(ParseFailure):
        parse_and_extract(cleaned, 4, BUILTINS)


def test_extraction_matches_independent_ast_walk():
    source = (
        "import numpy as np\n"
        "from pandas import DataFrame\n"
        "x = np.array([1])\n"
        "print(len(x))\n"
        "DataFrame(x).head()\n"
    )
    cleaned = strip_magics(source)
    imports, calls = parse_and_extract(cleaned, 1, BUILTINS)

    tree = ast.parse(source)
    expected_imports = sum(
        len(node.names)
        for node in ast.walk(tree)
        if isinstance(node, (ast.Import, ast.ImportFrom))
    )
    def dotted_ok(node):
        while isinstance(node, ast.Attribute):
            node = node.value
        return isinstance(node, ast.Name)
    expected_calls = sum(
        1 for node in ast.walk(tree) if isinstance(node, ast.Call) and dotted_ok(node.func)
    )
    assert len(imports) == expected_imports
    assert len(calls) == expected_calls


def test_resolve_aliases():
    imports = [
        ImportRecord("matplotlib.pyplot", None, "plt", 1),
        ImportRecord("pandas", None, "pd", 1),
        ImportRecord("sklearn", "metrics", "skm", 1),
    ]
    calls = [
        CallRecord("plt.plot", 2),
        CallRecord("pd.DataFrame", 2),
        CallRecord("skm.f1_score", 2),
        CallRecord("unknown.thing", 2),
        CallRecord("len", 2, is_builtin=True),
    ]
    resolve_aliases(imports, calls)
    assert calls[0].resolved_module == "matplotlib"
    assert calls[1].resolved_module == "pandas"
    assert calls[2].resolved_module == "sklearn"
    assert calls[3].resolved_module is None
    assert calls[4].resolved_module is None


def test_rank_usage_counts_and_ties():
    imports = [ImportRecord("numpy", None, "np", i) for i in (1, 2, 3)]
    imports.append(ImportRecord("os", None, "os", 1))
    calls = [
        CallRecord("plt.plot", 1),
        CallRecord("plt.plot", 2),
        CallRecord("print", 1, is_builtin=True),
        CallRecord("aaa", 3),
        CallRecord("bbb", 3),
    ]
    ranking = rank_usage(imports, calls, BUILTINS)
    assert ranking.modules[0] == ("numpy", 3)
    assert ranking.modules[1] == ("os", 1)
    assert ("os", 1) not in ranking.modules_no_stdlib
    assert ranking.calls[0] == ("plt.plot", 2)
    # lexicographic tiebreak among equals
    assert ranking.calls[1:] == [("aaa", 1), ("bbb", 1), ("print", 1)]
    assert ("print", 1) not in ranking.calls_no_builtins


def test_rank_usage_empty_corpus():
    ranking = rank_usage([], [], BUILTINS)
    assert ranking.modules == []
    assert ranking.calls == []


def test_ranking_is_permutation_and_counts_sum():
    rng = random.Random(5)
    calls = [
        CallRecord(rng.choice(["a.b", "c", "d.e.f", "len"]), 1, is_builtin=False)
        for _ in range(200)
    ]
    ranking = rank_usage([], calls, BUILTINS)
    assert {t for t, _ in ranking.calls} == {c.target for c in calls}
    assert sum(n for _, n in ranking.calls) == len(calls)


def test_analyze_cell_magic_then_parse():
    cleaned, imports, calls = analyze_cell(
        "%matplotlib inline\nimport numpy as np\nnp.zeros(3)", 5, BUILTINS
    )
    assert cleaned.removed_lines == [(1, "line_magic")]
    assert imports[0].module == "numpy"
    assert calls[0].target == "np.zeros"
    assert calls[0].cell_index == 5
