"""CommonMark rendering shared by the model, the metrics, and the exporter.

All markdown handling funnels through one parser configuration (CommonMark
plus pipe tables) so that image extraction, heading/table detection, and the
HTML export agree on structure by construction. Reference-style images,
setext headings, and raw inline HTML all come out of the same token stream.
"""

from __future__ import annotations

import html as _html
from functools import lru_cache

from markdown_it import MarkdownIt

from .dom import Element, parse_html


@lru_cache(maxsize=1)
def _plain_md() -> MarkdownIt:
    return MarkdownIt("commonmark").enable("table")


def render_markdown(text: str) -> str:
    """Render markdown to an HTML fragment (no styling attributes)."""
    return _plain_md().render(text)


def markdown_dom(text: str) -> Element:
    """Rendered-fragment DOM for a markdown cell."""
    return parse_html(render_markdown(text))


def _styled_renderer(style_map: tuple[tuple[str, str], ...]) -> MarkdownIt:
    styles = dict(style_map)
    md = MarkdownIt("commonmark").enable("table")

    def _with_style(key: str):
        def rule(self, tokens, idx, options, env):
            tokens[idx].attrSet("style", styles[key])
            return self.renderToken(tokens, idx, options, env)

        return rule

    for token_name, key in (
        ("link_open", "link"),
        ("table_open", "table"),
        ("th_open", "th"),
        ("td_open", "td"),
    ):
        md.add_render_rule(token_name, _with_style(key))

    def fence(self, tokens, idx, options, env):
        content = _html.escape(tokens[idx].content)
        return f'<pre style="{styles["pre"]}"><code>{content}</code></pre>\n'

    def code_inline(self, tokens, idx, options, env):
        content = _html.escape(tokens[idx].content)
        return f'<code style="{styles["code"]}">{content}</code>'

    md.add_render_rule("fence", fence)
    md.add_render_rule("code_block", fence)
    md.add_render_rule("code_inline", code_inline)
    return md


@lru_cache(maxsize=16)
def _styled_md(style_map: tuple[tuple[str, str], ...]) -> MarkdownIt:
    return _styled_renderer(style_map)


def render_markdown_styled(text: str, styles: dict[str, str]) -> str:
    """Render markdown with inline style attributes injected.

    ``styles`` must provide values for ``link``, ``table``, ``th``, ``td``,
    ``pre`` and ``code``. Relative to :func:`render_markdown` only attribute
    values change, never the element structure, so themed exports of one
    cell are structurally identical.
    """
    key = tuple(sorted(styles.items()))
    return _styled_md(key).render(text)
