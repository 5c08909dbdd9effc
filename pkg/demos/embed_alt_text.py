"""Embed an alt description into a PNG and read it back.

The description lands twice in the file: an eXIf chunk carrying an EXIF
ImageDescription entry (tag 270) and a tEXt chunk keyed "Description".
Any PNG-aware tool can surface at least one of the two.
"""

import struct
import zlib

from nbaudit import embed_alt, extract_alt
from nbaudit.altpng import alt_records


def tiny_png() -> bytes:
    def chunk(ctype, payload):
        crc = zlib.crc32(ctype + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + ctype + payload + struct.pack(">I", crc)

    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(b"\x00\xaa\x10\x10"))
        + chunk(b"IEND", b"")
    )


source = tiny_png()
print(f"source image: {len(source)} bytes, alt={extract_alt(source)!r}")

description = "line chart of monthly active users, rising from 2k to 9k"
tagged = embed_alt(source, description)
print(f"tagged image: {len(tagged)} bytes")

for record in alt_records(tagged):
    print(f"  {record.encoding:11s} tag={record.tag_id}: {record.description!r}")

assert extract_alt(tagged) == description
print("round-trip ok")

replaced = embed_alt(tagged, "updated description")
print(f"after re-embed: {extract_alt(replaced)!r}")
