"""Grayscale rasters, the PGM codec and nearest-neighbour geometry.

Coordinates follow the convention used throughout the package: ``x`` runs
along the image width ``M`` (array column) and ``y`` along the height ``N``
(array row), so pixel ``(x, y)`` lives at ``pixels[y, x]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DecodeError, InvalidInputError


@dataclass(frozen=True, eq=False)
class GrayImage:
    """An 8-bit grayscale image stored row-major as a ``(height, width)`` array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInputError(f"image must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 255:
                raise InvalidInputError("pixel values must lie in [0, 255]")
            if not np.array_equal(arr, np.round(arr)):
                raise InvalidInputError("pixel values must be integers")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_rows(cls, rows) -> GrayImage:
        return cls(np.asarray(rows))

    @classmethod
    def blank(cls, width: int, height: int, value: int = 0) -> GrayImage:
        return cls(np.full((height, width), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


# -- PGM codec ---------------------------------------------------------------

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _read_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    """Return (token, token_start, position after token), skipping comments."""
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch in _WHITESPACE and ch:
            pos += 1
        elif ch == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    if pos >= n:
        raise DecodeError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        pos += 1
    return data[start:pos], start, pos


def _read_int(data: bytes, pos: int, what: str) -> tuple[int, int, int]:
    tok, start, pos = _read_token(data, pos)
    if not tok.isdigit():
        raise DecodeError(f"malformed header: expected {what}, got {tok[:16]!r}", start)
    return int(tok), start, pos


def decode_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) or ASCII (P2) PGM stream with maxval <= 255."""
    data = bytes(data)
    if len(data) < 2:
        raise DecodeError("stream too short for a PGM magic number", 0)
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise DecodeError(f"unsupported magic number {magic!r}", 0)
    pos = 2
    width, width_start, pos = _read_int(data, pos, "width")
    height, _, pos = _read_int(data, pos, "height")
    maxval, maxval_start, pos = _read_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise DecodeError(f"invalid dimensions {width}x{height}", width_start)
    if maxval < 1 or maxval > 255:
        raise DecodeError(f"maxval {maxval} outside 1..255", maxval_start)
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
            raise DecodeError("missing whitespace after maxval", pos)
        pos += 1
        payload = data[pos:pos + count]
        if len(payload) < count:
            raise DecodeError(
                f"truncated payload: expected {count} bytes, found {len(payload)}",
                pos + len(payload),
            )
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
        if pixels.max(initial=0) > maxval:
            bad = int(np.argmax(pixels.ravel() > maxval))
            raise DecodeError(f"sample exceeds maxval {maxval}", pos + bad)
        return GrayImage(pixels)

    values = np.empty(count, dtype=np.uint8)
    for i in range(count):
        try:
            tok, start, pos = _read_token(data, pos)
        except DecodeError as exc:
            raise DecodeError(f"truncated payload: expected {count} samples, found {i}", exc.offset) from None
        if not tok.isdigit():
            raise DecodeError(f"malformed sample {tok[:16]!r}", start)
        v = int(tok)
        if v > maxval:
            raise DecodeError(f"sample {v} exceeds maxval {maxval}", start)
        values[i] = v
    return GrayImage(values.reshape(height, width))


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_pgm(path) -> GrayImage:
    return decode_pgm(Path(path).read_bytes())


def write_pgm(img: GrayImage, path) -> None:
    Path(path).write_bytes(encode_pgm(img))


# -- geometry ----------------------------------------------------------------

def resize_nearest(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Nearest-neighbour resize: output (i, j) takes input (floor(i*M/out_w), floor(j*N/out_h))."""
    if out_w < 1 or out_h < 1:
        raise InvalidInputError(f"output size must be positive, got {out_w}x{out_h}")
    src_x = (np.arange(out_w) * img.width) // out_w
    src_y = (np.arange(out_h) * img.height) // out_h
    return GrayImage(img.pixels[np.ix_(src_y, src_x)])


def image_center(width: int, height: int) -> tuple[int, int]:
    return width // 2, height // 2


def _cos_sin_degrees(degrees: float) -> tuple[float, float]:
    # exact values on the axes keep quarter turns free of rounding noise
    quarter = degrees / 90.0
    if quarter == math.floor(quarter):
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(quarter) % 4]
    rad = math.radians(degrees)
    return math.cos(rad), math.sin(rad)


def rotate_nearest(img: GrayImage, degrees: float, fill: int = 0) -> GrayImage:
    """Rotate about the image center by ``degrees`` using inverse nearest sampling.

    Positive angles turn content in the direction of increasing polar angle
    ``atan2(y - n, x - m)``. Samples whose preimage falls outside the frame
    take ``fill``.
    """
    m, n = image_center(img.width, img.height)
    cos_t, sin_t = _cos_sin_degrees(degrees)
    ys, xs = np.mgrid[0:img.height, 0:img.width]
    dx = xs - m
    dy = ys - n
    # preimage under rotation by -degrees
    src_x = np.floor(m + cos_t * dx + sin_t * dy + 0.5).astype(np.int64)
    src_y = np.floor(n - sin_t * dx + cos_t * dy + 0.5).astype(np.int64)
    inside = (src_x >= 0) & (src_x < img.width) & (src_y >= 0) & (src_y < img.height)
    out = np.full(img.pixels.shape, fill, dtype=np.uint8)
    out[inside] = img.pixels[src_y[inside], src_x[inside]]
    return GrayImage(out)


# -- vectorisation -------------------------------------------------------------

def to_vector(img: GrayImage) -> np.ndarray:
    """Stack the image column by column into a float64 vector of length M*N."""
    return img.pixels.astype(np.float64).ravel(order="F")


def from_vector(values, width: int, height: int) -> GrayImage:
    """Inverse of :func:`to_vector`; values are rounded and clipped to [0, 255]."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (width * height,):
        raise InvalidInputError(f"expected {width * height} values, got {values.shape}")
    pixels = np.clip(np.rint(values), 0, 255).reshape((height, width), order="F")
    return GrayImage(pixels.astype(np.uint8))
