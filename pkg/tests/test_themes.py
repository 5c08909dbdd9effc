from __future__ import annotations

import json

import pytest

from nbaudit.themes import (
    PALETTE_ROLES,
    THEME_NAMES,
    Theme,
    ThemeInvalid,
    ThemeUnknown,
    load_theme,
    load_themes,
)


def test_all_six_bundled_themes_load_and_validate():
    themes = load_themes(THEME_NAMES)
    assert [t.name for t in themes] == list(THEME_NAMES)
    for theme in themes:
        for role in PALETTE_ROLES:
            value = theme.color(role)
            assert value.startswith("#") and len(value) == 7


def test_unknown_theme():
    with pytest.raises(ThemeUnknown):
        load_theme("neon-dreams")


def test_invalid_palette_rejected():
    palette = {role: "#000000" for role in PALETTE_ROLES}
    palette.pop("link")
    with pytest.raises(ThemeInvalid):
        Theme(name="broken", palette=palette)
    bad_hex = {role: "#000000" for role in PALETTE_ROLES}
    bad_hex["fg_text"] = "black"
    with pytest.raises(ThemeInvalid):
        Theme(name="named", palette=bad_hex)


def test_env_dir_override(tmp_path, monkeypatch):
    palette = {role: "#123456" for role in PALETTE_ROLES}
    (tmp_path / "custom.json").write_text(
        json.dumps({"name": "custom", "palette": palette})
    )
    monkeypatch.setenv("NBAUDIT_THEME_DIR", str(tmp_path))
    theme = load_theme("custom")
    assert theme.color("page_bg") == "#123456"
    with pytest.raises(ThemeUnknown):
        load_theme("light")  # not present in the override directory
