"""Animated GIF assembly from rendered thumbnails.

The encoder writes GIF89a directly: one full-canvas frame per thumbnail,
a Graphic Control Extension carrying the per-frame delay in centiseconds,
and a NETSCAPE2.0 application extension for infinite looping. Writing the
stream ourselves guarantees the frame count and delay fields exactly match
the request, which off-the-shelf writers do not promise (several coalesce
identical consecutive frames).

Frames are palettized independently, each with a local color table, so no
global quantization pass is needed.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import Sequence

from PIL import Image

from .render import Thumbnail, stamp_image

GIF_HEADER = b"GIF89a"


class NoRenderableFrames(ValueError):
    """Every candidate thumbnail failed to render; nothing to animate."""


@dataclass(frozen=True, slots=True)
class GifSpec:
    frame_interval: float = 1.0  # seconds between frames
    timestamp_watermark: bool = False
    uri_stamp: bool = False
    # Loop behavior is always "forever"; GIF89a encodes that as loop count 0.

    def __post_init__(self) -> None:
        if self.frame_interval <= 0:
            raise ValueError("frame_interval must be positive")
        if self.delay_centiseconds < 1:
            raise ValueError("frame_interval is below GIF's 10 ms delay resolution")

    @property
    def delay_centiseconds(self) -> int:
        return round(self.frame_interval * 100)


def assemble_gif(thumbnails: Sequence[Thumbnail], spec: GifSpec = GifSpec()) -> bytes:
    """Encode the ok-thumbnails, in chronological order, as a looping GIF.

    Failed thumbnails are excluded. The datetime watermark goes bottom-left
    and the URI stamp top-left, matching the still-image visualizations.
    """
    frames = sorted((t for t in thumbnails if t.status == "ok"), key=lambda t: t.sort_key)
    if not frames:
        raise NoRenderableFrames("no successfully rendered thumbnails to animate")

    images = []
    for thumb in frames:
        png = thumb.image
        if spec.timestamp_watermark:
            label = thumb.datetime.instant.strftime("%Y-%m-%d %H:%M:%S")
            png = stamp_image(png, label, "bottom-left")
        if spec.uri_stamp:
            png = stamp_image(png, str(thumb.source_uri_r), "top-left")
        images.append(Image.open(io.BytesIO(png)).convert("RGB"))

    width = max(im.width for im in images)
    height = max(im.height for im in images)
    out = io.BytesIO()
    out.write(GIF_HEADER)
    # Logical screen descriptor; no global color table, background 0.
    out.write(struct.pack("<HHBBB", width, height, 0x00, 0, 0))
    _write_netscape_loop(out)
    for image in images:
        _write_frame(out, image, spec.delay_centiseconds)
    out.write(b"\x3b")
    return out.getvalue()


def _write_netscape_loop(out: io.BytesIO, loop_count: int = 0) -> None:
    out.write(b"\x21\xff\x0b")
    out.write(b"NETSCAPE2.0")
    out.write(b"\x03\x01")
    out.write(struct.pack("<H", loop_count))
    out.write(b"\x00")


def _write_frame(out: io.BytesIO, image: Image.Image, delay_cs: int) -> None:
    palettized = image.convert("P", palette=Image.ADAPTIVE, colors=256)
    palette = palettized.getpalette() or []
    palette_colors = max(2, (len(palette) + 2) // 3)
    table_bits = max(1, (palette_colors - 1).bit_length())
    table_size = 1 << table_bits

    # Graphic control extension: packed flags 0 (no disposal, no transparency).
    out.write(b"\x21\xf9\x04\x00")
    out.write(struct.pack("<H", delay_cs))
    out.write(b"\x00\x00")

    # Image descriptor with a local color table at the top-left corner.
    out.write(b"\x2c")
    out.write(struct.pack("<HHHH", 0, 0, image.width, image.height))
    out.write(bytes([0x80 | (table_bits - 1)]))
    table = bytearray(table_size * 3)
    table[: len(palette)] = palette
    out.write(bytes(table))

    min_code_size = max(2, table_bits)
    out.write(bytes([min_code_size]))
    compressed = _lzw_encode(palettized.tobytes(), min_code_size)
    for block_start in range(0, len(compressed), 255):
        block = compressed[block_start : block_start + 255]
        out.write(bytes([len(block)]))
        out.write(block)
    out.write(b"\x00")


class _BitWriter:
    """LSB-first bit packer, as GIF's LZW stream requires."""

    def __init__(self) -> None:
        self.out = bytearray()
        self._accum = 0
        self._bits = 0

    def write(self, code: int, width: int) -> None:
        self._accum |= code << self._bits
        self._bits += width
        while self._bits >= 8:
            self.out.append(self._accum & 0xFF)
            self._accum >>= 8
            self._bits -= 8

    def flush(self) -> bytearray:
        if self._bits:
            self.out.append(self._accum & 0xFF)
            self._accum = 0
            self._bits = 0
        return self.out


def _lzw_encode(indices: bytes, min_code_size: int) -> bytes:
    """GIF-variant LZW: variable code width, clear/end codes, 12-bit cap."""
    clear_code = 1 << min_code_size
    end_code = clear_code + 1
    writer = _BitWriter()

    def fresh_table() -> dict[bytes, int]:
        return {bytes([i]): i for i in range(clear_code)}

    table = fresh_table()
    next_code = end_code + 1
    code_width = min_code_size + 1
    writer.write(clear_code, code_width)

    run = b""
    for byte in indices:
        candidate = run + bytes([byte])
        if candidate in table:
            run = candidate
            continue
        writer.write(table[run], code_width)
        table[candidate] = next_code
        if next_code == 1 << code_width and code_width < 12:
            code_width += 1
        next_code += 1
        if next_code > 4095:
            writer.write(clear_code, code_width)
            table = fresh_table()
            next_code = end_code + 1
            code_width = min_code_size + 1
        run = bytes([byte])
    if run:
        writer.write(table[run], code_width)
    writer.write(end_code, code_width)
    return bytes(writer.flush())
