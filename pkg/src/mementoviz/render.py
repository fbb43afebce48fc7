"""Thumbnail rendering: pluggable page-capture backends plus watermarking.

A backend captures a full-viewport screenshot of a URL as PNG bytes; this
module scales captures down to thumbnail size, stamps datetime/URI
watermarks, and turns capture failures into placeholder thumbnails so one
broken memento never sinks a batch. The deterministic stub backend keeps
the whole pipeline reproducible without a browser.
"""

from __future__ import annotations

import hashlib
import io
import logging
from dataclasses import dataclass
from typing import Literal, Protocol

from PIL import Image, ImageDraw, ImageFont

from .timemap import MementoDatetime, OriginalUri

logger = logging.getLogger(__name__)

DEFAULT_VIEWPORT = (1024, 768)
DEFAULT_THUMBNAIL_WIDTH = 240
DEFAULT_BASE_SETTLE_WAIT = 3.0
DEFAULT_CAPTURE_TIMEOUT = 30.0

Corner = Literal["top-left", "top-right", "bottom-left", "bottom-right"]


class RenderError(Exception):
    """Base class for capture failures."""


class RenderTimeout(RenderError):
    """The page did not produce a screenshot within the timeout."""


class RenderFailure(RenderError):
    """The backend failed for a reason other than a timeout."""


class RenderBackend(Protocol):
    def capture(
        self, uri: str, viewport: tuple[int, int], settle_wait: float, timeout: float
    ) -> bytes:
        """Screenshot `uri` at `viewport` size after letting the page settle
        for `settle_wait` seconds; returns PNG bytes."""
        ...


@dataclass(frozen=True, slots=True)
class Thumbnail:
    uri_m: str
    datetime: MementoDatetime
    source_uri_r: OriginalUri
    image: bytes  # PNG
    width: int
    height: int
    attempt: int
    status: Literal["ok", "failed"]

    @property
    def sort_key(self) -> tuple[MementoDatetime, str]:
        return (self.datetime, self.uri_m)


class StubRenderBackend:
    """Deterministic stand-in for a browser: a solid background colored by
    the URI's hash, with the URI and a hash-derived block pattern drawn on
    top. Byte-identical output for identical inputs, on any platform."""

    def capture(
        self, uri: str, viewport: tuple[int, int], settle_wait: float, timeout: float
    ) -> bytes:
        digest = hashlib.sha256(uri.encode("utf-8")).digest()
        background = (digest[0], digest[1], digest[2])
        image = Image.new("RGB", viewport, background)
        draw = ImageDraw.Draw(image)
        # Blocks make captures visually distinct at thumbnail scale.
        cols, rows = 8, 6
        cell_w, cell_h = viewport[0] // cols, viewport[1] // rows
        for i in range(cols * rows):
            byte = digest[(i + 3) % len(digest)]
            if byte & 1:
                x, y = (i % cols) * cell_w, (i // cols) * cell_h
                shade = (byte, 255 - byte, (byte * 7) % 256)
                draw.rectangle([x, y, x + cell_w - 2, y + cell_h - 2], fill=shade)
        draw.rectangle([0, 0, viewport[0] - 1, 39], fill=(255, 255, 255))
        draw.text((8, 12), uri[:120], fill=(0, 0, 0), font=ImageFont.load_default())
        return _encode_png(image)


def _encode_png(image: Image.Image) -> bytes:
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def _placeholder_image(size: tuple[int, int], text: str) -> bytes:
    image = Image.new("RGB", size, (64, 64, 64))
    draw = ImageDraw.Draw(image)
    draw.rectangle([2, 2, size[0] - 3, size[1] - 3], outline=(160, 160, 160))
    draw.text((8, size[1] // 2 - 6), text, fill=(220, 220, 220), font=ImageFont.load_default())
    return _encode_png(image)


def capture_thumbnail(
    backend: RenderBackend,
    uri_m: str,
    datetime: MementoDatetime,
    source_uri_r: OriginalUri,
    attempt: int = 1,
    *,
    viewport: tuple[int, int] = DEFAULT_VIEWPORT,
    thumbnail_width: int = DEFAULT_THUMBNAIL_WIDTH,
    base_settle_wait: float = DEFAULT_BASE_SETTLE_WAIT,
    timeout: float = DEFAULT_CAPTURE_TIMEOUT,
) -> Thumbnail:
    """Capture uri_m and scale it down to a thumbnail.

    Retries wait longer: settle_wait is base_settle_wait * attempt, so each
    refresh gives slow-loading mementos more time to finish painting. On
    capture failure the result is a placeholder-bearing thumbnail with
    status "failed" instead of an exception.
    """
    if attempt < 1:
        raise ValueError("attempt counts from 1")
    thumb_size = (thumbnail_width, thumbnail_width * viewport[1] // viewport[0])
    try:
        png = backend.capture(uri_m, viewport, base_settle_wait * attempt, timeout)
        full = Image.open(io.BytesIO(png)).convert("RGB")
        thumb = full.resize(thumb_size, Image.LANCZOS)
        image, status = _encode_png(thumb), "ok"
    except RenderError as exc:
        logger.warning("capture failed for %s (attempt %d): %s", uri_m, attempt, exc)
        image, status = _placeholder_image(thumb_size, "unavailable"), "failed"
    return Thumbnail(
        uri_m=uri_m,
        datetime=datetime,
        source_uri_r=source_uri_r,
        image=image,
        width=thumb_size[0],
        height=thumb_size[1],
        attempt=attempt,
        status=status,
    )


def watermark(thumbnail: Thumbnail, text: str, corner: Corner = "bottom-left") -> bytes:
    """Overlay `text` on a contrasting strip in the given corner.

    Pure: returns new PNG bytes, the thumbnail is untouched. Empty text
    returns the original bytes unchanged.
    """
    if thumbnail.status != "ok":
        raise ValueError("cannot watermark a failed thumbnail")
    if not text:
        return thumbnail.image
    image = Image.open(io.BytesIO(thumbnail.image)).convert("RGB")
    return _encode_png(_stamp(image, text, corner))


def _stamp(image: Image.Image, text: str, corner: Corner) -> Image.Image:
    draw = ImageDraw.Draw(image)
    font = ImageFont.load_default()
    left, top, right, bottom = draw.textbbox((0, 0), text, font=font)
    pad = 3
    strip_w = min(right - left + 2 * pad, image.width)
    strip_h = bottom - top + 2 * pad
    x = 0 if "left" in corner else image.width - strip_w
    y = 0 if "top" in corner else image.height - strip_h
    draw.rectangle([x, y, x + strip_w - 1, y + strip_h - 1], fill=(0, 0, 0))
    draw.text((x + pad - left, y + pad - top), text, fill=(255, 255, 255), font=font)
    return image


def stamp_image(png: bytes, text: str, corner: Corner) -> bytes:
    """Watermark raw PNG bytes; used when composing animation frames."""
    if not text:
        return png
    image = Image.open(io.BytesIO(png)).convert("RGB")
    return _encode_png(_stamp(image, text, corner))


def refresh_thumbnail(
    backend: RenderBackend,
    thumbnail: Thumbnail,
    **capture_kwargs,
) -> Thumbnail:
    """Re-capture with the next attempt number (and thus a longer settle)."""
    fresh = capture_thumbnail(
        backend,
        thumbnail.uri_m,
        thumbnail.datetime,
        thumbnail.source_uri_r,
        attempt=thumbnail.attempt + 1,
        **capture_kwargs,
    )
    return fresh


__all__ = [
    "Corner",
    "RenderBackend",
    "RenderError",
    "RenderFailure",
    "RenderTimeout",
    "StubRenderBackend",
    "Thumbnail",
    "capture_thumbnail",
    "refresh_thumbnail",
    "stamp_image",
    "watermark",
]
