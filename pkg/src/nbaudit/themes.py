"""Theme palettes for HTML export.

Six palettes ship as checked-in JSON files (light, dark, solarized,
darcula, horizon, material-darker), each pinning hex values derived from
the theme's published definition. The JSON files, not the names, are the
ground truth for contrast results; the directory can be overridden with
the NBAUDIT_THEME_DIR environment variable for custom palettes.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

THEME_NAMES = ("light", "dark", "solarized", "darcula", "horizon", "material-darker")

PALETTE_ROLES = (
    "page_bg",
    "cell_bg",
    "fg_text",
    "link",
    "visited_link",
    "code_keyword",
    "code_string",
    "code_comment",
    "code_number",
    "table_border",
    "table_header_bg",
)

_HEX = re.compile(r"^#[0-9a-fA-F]{6}$")

ENV_THEME_DIR = "NBAUDIT_THEME_DIR"


class ThemeUnknown(KeyError):
    pass


class ThemeInvalid(ValueError):
    pass


@dataclass(frozen=True)
class Theme:
    name: str
    palette: dict[str, str]

    def __post_init__(self) -> None:
        missing = [role for role in PALETTE_ROLES if role not in self.palette]
        if missing:
            raise ThemeInvalid(f"theme {self.name!r} missing roles: {missing}")
        for role, value in self.palette.items():
            if not _HEX.match(value):
                raise ThemeInvalid(
                    f"theme {self.name!r} role {role}: {value!r} is not #RRGGBB"
                )

    def color(self, role: str) -> str:
        return self.palette[role]


def _theme_dir() -> Path | None:
    override = os.environ.get(ENV_THEME_DIR)
    return Path(override) if override else None


def load_theme(name: str) -> Theme:
    """Load a palette by name from the override dir or the packaged set."""
    directory = _theme_dir()
    if directory is not None:
        candidate = directory / f"{name}.json"
        if not candidate.is_file():
            raise ThemeUnknown(f"no theme file {candidate}")
        data = json.loads(candidate.read_text("utf-8"))
    else:
        try:
            text = (
                resources.files("nbaudit.data.themes")
                .joinpath(f"{name}.json")
                .read_text("utf-8")
            )
        except FileNotFoundError as exc:
            raise ThemeUnknown(f"unknown theme {name!r}") from exc
        data = json.loads(text)
    palette = data.get("palette")
    if not isinstance(palette, dict):
        raise ThemeInvalid(f"theme file for {name!r} has no palette object")
    return Theme(name=data.get("name", name), palette={k: v.lower() for k, v in palette.items()})


def load_themes(names: list[str] | tuple[str, ...] = THEME_NAMES) -> list[Theme]:
    return [load_theme(name) for name in names]
