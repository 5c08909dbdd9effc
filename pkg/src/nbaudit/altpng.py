"""Embed and extract image descriptions in PNG metadata.

Descriptions are written twice: as an EXIF ImageDescription entry (tag
0x010e / 270) inside an eXIf chunk, and as a tEXt chunk keyed
"Description". EXIF-in-PNG support varies across consumers while tEXt is
universally readable, so the pair maximizes the chance that downstream
tools surface the description. The eXIf payload is a big-endian TIFF
header with a single IFD holding one entry; extraction prefers it over
tEXt.

tEXt is defined as Latin-1. Descriptions that exceed the tEXt size cap or
contain non-Latin-1 characters are stored in eXIf only and a warning is
emitted; round-tripping is unaffected because eXIf carries UTF-8 bytes.
"""

from __future__ import annotations

import struct
import warnings
import zlib
from dataclasses import dataclass
from typing import Iterator

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
EXIF_IMAGE_DESCRIPTION = 270  # 0x010e
TEXT_KEYWORD = b"Description"
TEXT_MAX_BYTES = 2**16 - 1

ENC_EXIF = "exif_chunk"
ENC_TEXT = "text_chunk"


class NotAPng(ValueError):
    """Input bytes are not a structurally valid PNG."""


class DescriptionTooLong(UserWarning):
    """Description exceeds the tEXt cap; stored in eXIf only."""


class DescriptionNotLatin1(UserWarning):
    """Description is not Latin-1 encodable; tEXt chunk skipped."""


@dataclass
class PngAltRecord:
    description: str
    encoding: str  # exif_chunk | text_chunk
    tag_id: int = EXIF_IMAGE_DESCRIPTION


def _iter_chunks(data: bytes) -> Iterator[tuple[bytes, bytes]]:
    """Yield (type, payload) pairs, validating structure and CRCs."""
    if not data.startswith(PNG_SIGNATURE):
        raise NotAPng("missing PNG signature")
    offset = len(PNG_SIGNATURE)
    first = True
    saw_end = False
    while offset < len(data):
        if saw_end:
            raise NotAPng("data after IEND chunk")
        if offset + 8 > len(data):
            raise NotAPng("truncated chunk header")
        (length,) = struct.unpack(">I", data[offset : offset + 4])
        ctype = data[offset + 4 : offset + 8]
        end = offset + 8 + length
        if end + 4 > len(data):
            raise NotAPng(f"truncated {ctype!r} chunk")
        payload = data[offset + 8 : end]
        (crc,) = struct.unpack(">I", data[end : end + 4])
        if zlib.crc32(ctype + payload) & 0xFFFFFFFF != crc:
            raise NotAPng(f"bad CRC in {ctype!r} chunk")
        if first and ctype != b"IHDR":
            raise NotAPng("first chunk is not IHDR")
        first = False
        if ctype == b"IEND":
            saw_end = True
        yield ctype, payload
        offset = end + 4
    if not saw_end:
        raise NotAPng("missing IEND chunk")


def _chunk(ctype: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + ctype
        + payload
        + struct.pack(">I", zlib.crc32(ctype + payload) & 0xFFFFFFFF)
    )


def _build_exif(description: bytes) -> bytes:
    # Big-endian TIFF: header, one-entry IFD0, value area for long strings.
    value = description + b"\x00"
    header = b"MM\x00\x2a" + struct.pack(">I", 8)
    if len(value) <= 4:
        value_field = value.ljust(4, b"\x00")
        tail = b""
    else:
        # value starts right after count(2) + entry(12) + next-IFD(4)
        value_field = struct.pack(">I", 8 + 2 + 12 + 4)
        tail = value
    entry = struct.pack(">HHI", EXIF_IMAGE_DESCRIPTION, 2, len(value)) + value_field
    ifd = struct.pack(">H", 1) + entry + struct.pack(">I", 0)
    return header + ifd + tail


def _parse_exif(blob: bytes) -> bytes | None:
    if len(blob) < 8:
        return None
    if blob[:2] == b"MM":
        order = ">"
    elif blob[:2] == b"II":
        order = "<"
    else:
        return None
    try:
        (magic,) = struct.unpack(order + "H", blob[2:4])
        if magic != 42:
            return None
        (ifd_offset,) = struct.unpack(order + "I", blob[4:8])
        (count,) = struct.unpack(order + "H", blob[ifd_offset : ifd_offset + 2])
        pos = ifd_offset + 2
        for _ in range(count):
            tag, ftype, n = struct.unpack(order + "HHI", blob[pos : pos + 8])
            value_field = blob[pos + 8 : pos + 12]
            pos += 12
            if tag != EXIF_IMAGE_DESCRIPTION or ftype not in (2, 7):
                continue
            if n <= 4:
                raw = value_field[:n]
            else:
                (data_offset,) = struct.unpack(order + "I", value_field)
                raw = blob[data_offset : data_offset + n]
            # Strip exactly the one NUL terminator; embedded NULs are data.
            return raw[:-1] if raw.endswith(b"\x00") else raw
    except struct.error:
        return None
    return None


def _decode_text(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def embed_alt(png: bytes, description: str) -> bytes:
    """Return a copy of ``png`` carrying ``description`` as alt metadata.

    Pixel data and unrelated chunks are preserved byte for byte; existing
    alt records (eXIf chunk, tEXt Description) are replaced. Raises
    NotAPng for structurally invalid input and ValueError for an empty
    description.
    """
    if not description:
        raise ValueError("description must be non-empty")
    utf8 = description.encode("utf-8")

    kept: list[bytes] = []
    header: bytes | None = None
    for ctype, payload in _iter_chunks(png):
        if ctype == b"eXIf":
            continue
        if ctype == b"tEXt" and payload.split(b"\x00", 1)[0] == TEXT_KEYWORD:
            continue
        if ctype == b"IHDR":
            header = _chunk(ctype, payload)
            continue
        kept.append(_chunk(ctype, payload))
    assert header is not None  # _iter_chunks guarantees IHDR first

    inserted = [_chunk(b"eXIf", _build_exif(utf8))]
    try:
        if "\x00" in description:
            raise UnicodeEncodeError("latin-1", description, 0, 1, "NUL in tEXt text")
        latin = description.encode("latin-1")
    except UnicodeEncodeError:
        warnings.warn(
            "description is not representable as tEXt (non-Latin-1 or NUL); "
            "stored in eXIf only",
            DescriptionNotLatin1,
            stacklevel=2,
        )
    else:
        if len(latin) > TEXT_MAX_BYTES:
            warnings.warn(
                f"description exceeds {TEXT_MAX_BYTES} bytes; stored in eXIf only",
                DescriptionTooLong,
                stacklevel=2,
            )
        else:
            inserted.append(_chunk(b"tEXt", TEXT_KEYWORD + b"\x00" + latin))

    return PNG_SIGNATURE + header + b"".join(inserted) + b"".join(kept)


def alt_records(png: bytes) -> list[PngAltRecord]:
    """Every alt record present, eXIf first."""
    records: list[PngAltRecord] = []
    texts: list[PngAltRecord] = []
    for ctype, payload in _iter_chunks(png):
        if ctype == b"eXIf":
            raw = _parse_exif(payload)
            if raw:
                records.append(PngAltRecord(_decode_text(raw), ENC_EXIF))
        elif ctype == b"tEXt":
            keyword, _, rest = payload.partition(b"\x00")
            if keyword == TEXT_KEYWORD and rest:
                texts.append(PngAltRecord(_decode_text(rest), ENC_TEXT))
    return records + texts


def extract_alt(png: bytes) -> str | None:
    """The embedded description: eXIf tag 270 first, then tEXt, else None."""
    records = alt_records(png)
    return records[0].description if records else None


def validate_png(png: bytes) -> None:
    """Raise NotAPng unless signature, chunk structure and CRCs all hold."""
    for _ in _iter_chunks(png):
        pass
