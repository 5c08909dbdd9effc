from __future__ import annotations

import io
import random
import warnings

import pytest
from hypothesis import given, strategies as st
from PIL import Image

from conftest import TINY_PNG, chunk, tiny_png
from pngoracle import oracle_validate
from nbaudit.altpng import (
    DescriptionNotLatin1,
    DescriptionTooLong,
    NotAPng,
    alt_records,
    embed_alt,
    extract_alt,
    validate_png,
)


def pillow_png(width=4, height=3, seed=0) -> bytes:
    rng = random.Random(seed)
    image = Image.new("RGB", (width, height))
    image.putdata(
        [(rng.randrange(256), rng.randrange(256), rng.randrange(256))
         for _ in range(width * height)]
    )
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def pixels(png: bytes) -> bytes:
    return Image.open(io.BytesIO(png)).convert("RGB").tobytes()


def test_roundtrip_simple():
    out = embed_alt(TINY_PNG, "a red dot")
    assert extract_alt(out) == "a red dot"


def test_embed_twice_second_wins():
    once = embed_alt(TINY_PNG, "first")
    twice = embed_alt(once, "second")
    assert extract_alt(twice) == "second"
    records = alt_records(twice)
    assert all(r.description == "second" for r in records)


def test_output_passes_independent_validator():
    out = embed_alt(pillow_png(), "validated")
    types = oracle_validate(out)
    assert types.count(b"eXIf") == 1
    assert b"tEXt" in types


def test_pixels_unchanged():
    source = pillow_png(8, 8, seed=3)
    out = embed_alt(source, "same pixels")
    assert pixels(out) == pixels(source)


def test_extract_none_without_metadata():
    assert extract_alt(TINY_PNG) is None


def test_records_carry_both_encodings():
    out = embed_alt(TINY_PNG, "dual")
    encodings = [r.encoding for r in alt_records(out)]
    assert encodings == ["exif_chunk", "text_chunk"]
    assert all(r.tag_id == 270 for r in alt_records(out))


def test_text_chunk_only_fixture_from_independent_writer():
    # build a tEXt-bearing PNG by hand, not via embed_alt
    body = TINY_PNG
    ihdr_end = 8 + 12 + 13  # signature + IHDR chunk (13-byte payload)
    fixture = (
        body[:ihdr_end]
        + chunk(b"tEXt", b"Description\x00hand written")
        + body[ihdr_end:]
    )
    oracle_validate(fixture)
    assert extract_alt(fixture) == "hand written"


def test_pillow_reads_text_chunk():
    out = embed_alt(pillow_png(), "visible to pillow")
    info = Image.open(io.BytesIO(out)).info
    assert info.get("Description") == "visible to pillow"


def test_pillow_reads_exif_tag_270():
    out = embed_alt(pillow_png(), "exif description")
    exif = Image.open(io.BytesIO(out)).getexif()
    assert exif.get(270) == "exif description"


def test_not_a_png():
    with pytest.raises(NotAPng):
        embed_alt(b"GIF89a not a png", "x")
    with pytest.raises(NotAPng):
        extract_alt(b"\x89PNG\r\n\x1a\njunk")


def test_corrupted_crc_rejected():
    broken = bytearray(TINY_PNG)
    broken[-5] ^= 0xFF  # flip a bit inside IEND's CRC
    with pytest.raises(NotAPng):
        validate_png(bytes(broken))


def test_empty_description_rejected():
    with pytest.raises(ValueError):
        embed_alt(TINY_PNG, "")


def test_non_latin1_goes_exif_only_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = embed_alt(TINY_PNG, "statistiques 日本語")
    assert any(issubclass(w.category, DescriptionNotLatin1) for w in caught)
    assert extract_alt(out) == "statistiques 日本語"
    assert [r.encoding for r in alt_records(out)] == ["exif_chunk"]
    oracle_validate(out)


def test_oversized_description_goes_exif_only_with_warning():
    description = "x" * (2**16)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = embed_alt(TINY_PNG, description)
    assert any(issubclass(w.category, DescriptionTooLong) for w in caught)
    assert extract_alt(out) == description
    assert [r.encoding for r in alt_records(out)] == ["exif_chunk"]
    oracle_validate(out)


def test_short_description_inline_ifd_value():
    # values of four bytes or fewer are stored inline in the IFD entry
    out = embed_alt(TINY_PNG, "abc")
    assert extract_alt(out) == "abc"
    oracle_validate(out)


def test_existing_unrelated_text_chunks_preserved():
    body = TINY_PNG
    ihdr_end = 8 + 12 + 13
    with_soft = (
        body[:ihdr_end]
        + chunk(b"tEXt", b"Software\x00testsuite")
        + body[ihdr_end:]
    )
    out = embed_alt(with_soft, "desc")
    info = Image.open(io.BytesIO(out)).info
    assert info.get("Software") == "testsuite"
    assert extract_alt(out) == "desc"


@given(st.text(min_size=1, max_size=200).filter(lambda s: s.strip()))
def test_roundtrip_property(description):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = embed_alt(TINY_PNG, description)
    assert extract_alt(out) == description


def test_randomized_roundtrip_batch():
    rng = random.Random(1234)
    alphabet = "abcdefghij KLMNOP 0123456789 _.,;éüñ—中文"
    for i in range(100):
        png = tiny_png(rng.randrange(256), rng.randrange(256), rng.randrange(256))
        length = rng.randrange(1, 60)
        description = "".join(rng.choice(alphabet) for _ in range(length))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = embed_alt(png, description)
        assert extract_alt(out) == description
        oracle_validate(out)
