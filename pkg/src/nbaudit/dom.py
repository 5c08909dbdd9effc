"""Small recovering HTML DOM built on the stdlib parser.

The accessibility scanner and the notebook metrics both need a DOM that is
deterministic, tolerant of sloppy markup (pandas and hand-written HTML
payloads), and able to produce a unique selector path for any element.
None of the usual third-party tree builders are required for that, so this
module keeps the dependency surface at zero.
"""

from __future__ import annotations

from html.parser import HTMLParser
from typing import Iterator, Union

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# Minimal implied-end-tag recovery: opening `tag` first closes any open
# element named in the mapped set.
_CLOSE_BEFORE = {
    "p": {"p"},
    "li": {"li"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "tr": {"tr", "td", "th"},
    "thead": {"tr", "td", "th"},
    "tbody": {"thead", "tbody", "tr", "td", "th"},
    "tfoot": {"thead", "tbody", "tr", "td", "th"},
    "option": {"option"},
}

_BLOCK_CLOSES_P = frozenset(
    "address article aside blockquote div dl fieldset figure footer form "
    "h1 h2 h3 h4 h5 h6 header hr main nav ol p pre section table ul".split()
)


class Text:
    """A text node."""

    __slots__ = ("data", "parent")

    def __init__(self, data: str, parent: "Element | None" = None) -> None:
        self.data = data
        self.parent = parent

    def __repr__(self) -> str:  # pragma: no cover
        return f"Text({self.data!r})"


class Element:
    """An element node with lowercase tag and first-wins attributes."""

    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None) -> None:
        self.tag = tag
        self.attrs: dict[str, str] = attrs or {}
        self.children: list[Node] = []
        self.parent: Element | None = None

    def __repr__(self) -> str:  # pragma: no cover
        return f"<{self.tag} {self.attrs}>"

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    def has_attr(self, name: str) -> bool:
        return name in self.attrs

    def append(self, node: "Node") -> None:
        node.parent = self
        self.children.append(node)

    def iter_elements(self) -> Iterator["Element"]:
        """Yield this element and every descendant element, document order."""
        yield self
        for child in self.children:
            if isinstance(child, Element):
                yield from child.iter_elements()

    def child_elements(self) -> list["Element"]:
        return [c for c in self.children if isinstance(c, Element)]

    def find_all(self, *tags: str) -> list["Element"]:
        wanted = set(tags)
        return [el for el in self.iter_elements() if el.tag in wanted]

    def find(self, tag: str) -> "Element | None":
        for el in self.iter_elements():
            if el.tag == tag:
                return el
        return None

    def text(self) -> str:
        """Concatenated descendant text, excluding script/style content."""
        parts: list[str] = []
        self._collect_text(parts)
        return "".join(parts)

    def _collect_text(self, parts: list[str]) -> None:
        if self.tag in ("script", "style"):
            return
        for child in self.children:
            if isinstance(child, Text):
                parts.append(child.data)
            else:
                child._collect_text(parts)

    def own_text(self) -> str:
        return "".join(c.data for c in self.children if isinstance(c, Text))

    def ancestors(self) -> Iterator["Element"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def css_path(self) -> str:
        """Unique selector path of the form ``html > body > div:nth-child(2)``."""
        segments: list[str] = []
        node: Element | None = self
        while node is not None and node.tag != "#root":
            parent = node.parent
            siblings = parent.child_elements() if parent is not None else [node]
            if parent is None or parent.tag == "#root" or len(siblings) == 1:
                segments.append(node.tag)
            else:
                index = siblings.index(node) + 1
                segments.append(f"{node.tag}:nth-child({index})")
            node = parent
        return " > ".join(reversed(segments))


Node = Union[Element, Text]


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("#root")
        self.stack: list[Element] = [self.root]

    def _top(self) -> Element:
        return self.stack[-1]

    def _close(self, tag: str) -> None:
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # Unmatched end tag: recover by ignoring it.

    def _implied_closes(self, tag: str) -> None:
        while len(self.stack) > 1 and self._top().tag in _CLOSE_BEFORE.get(tag, ()):
            self.stack.pop()
        if tag in _BLOCK_CLOSES_P:
            for i in range(len(self.stack) - 1, 0, -1):
                if self.stack[i].tag == "p":
                    del self.stack[i:]
                    break
                if self.stack[i].tag in ("td", "th", "li", "div", "body"):
                    break

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._implied_closes(tag)
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        element = Element(tag, attr_map)
        self._top().append(element)
        if tag not in VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._implied_closes(tag)
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        self._top().append(Element(tag, attr_map))

    def handle_endtag(self, tag: str) -> None:
        if tag in VOID_ELEMENTS:
            return
        self._close(tag)

    def handle_data(self, data: str) -> None:
        if data:
            self._top().append(Text(data))


def parse_html(source: str | bytes) -> Element:
    """Parse ``source`` into a tree rooted at a synthetic ``#root`` element.

    Recovery is best effort: unmatched end tags are dropped and a small set
    of implied end tags (``<p>``, ``<li>``, table cells) is honoured, which
    is enough for notebook exports and typical library-generated HTML.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")
    builder = _TreeBuilder()
    builder.feed(source)
    builder.close()
    return builder.root


def body_element(root: Element) -> Element:
    """The document's ``<body>``, or the root itself for fragments."""
    body = root.find("body")
    return body if body is not None else root
