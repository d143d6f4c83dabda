"""Log-polar registration of face images.

The transform samples the largest disk inscribed in the image, centred on
the geometric image centre, on a grid that is logarithmic in radius and
uniform in angle. Rows of the output index the radius (row 0 is the inner
cutoff, the last row the rim) and columns index the angle, so rotating the
input shifts the output columns circularly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, InvalidInputError
from .image import GrayImage, image_center


@dataclass(frozen=True)
class LogPolarConfig:
    """Parameters of the log-polar transform.

    ``size`` pins the output to a fixed ``size x size`` square instead of
    ``base**q``; this is what makes differently scaled inputs comparable.
    """

    base: int = 2
    r_min: float = 1.0
    fill: int = 0
    size: int | None = None

    def __post_init__(self):
        if int(self.base) != self.base or self.base < 2:
            raise InvalidInputError(f"base must be an integer >= 2, got {self.base}")
        if not self.r_min > 0:
            raise InvalidInputError(f"r_min must be positive, got {self.r_min}")
        if not 0 <= self.fill <= 255:
            raise InvalidInputError(f"fill must be an intensity in [0, 255], got {self.fill}")
        if self.size is not None and self.size < 2:
            raise InvalidInputError(f"size must be >= 2, got {self.size}")

    def scaled(self, factor: float) -> LogPolarConfig:
        """Configuration for an input magnified by ``factor``.

        The inner cutoff is measured in input pixels, so it must grow with the
        magnification to sample the same part of the face.
        """
        return LogPolarConfig(self.base, self.r_min * factor, self.fill, self.size)


@dataclass(frozen=True)
class ReferenceCircle:
    m: int
    n: int
    R: int


def reference_circle(img: GrayImage) -> ReferenceCircle:
    """Centre ``(floor(M/2), floor(N/2))`` and radius of the largest inscribed disk."""
    return _circle_for(img.width, img.height)


def _circle_for(width: int, height: int) -> ReferenceCircle:
    m, n = image_center(width, height)
    radius = min(m, n, width - 1 - m, height - 1 - n)
    if radius < 2:
        raise DegenerateInputError(f"image {width}x{height} too small for log-polar sampling (R={radius})")
    return ReferenceCircle(m, n, radius)


def cartesian_to_polar(x: float, y: float, circle: ReferenceCircle) -> tuple[float, float]:
    """Radius and angle in degrees, ``0 <= theta < 360``, of ``(x, y)`` about the circle centre."""
    dx = x - circle.m
    dy = y - circle.n
    r = math.hypot(dx, dy)
    if r == 0:
        return 0.0, 0.0
    theta = math.degrees(math.atan2(dy, dx)) % 360.0
    if theta >= 360.0:
        theta = 0.0
    return r, theta


def log_radial(r: float, R: float, r_min: float) -> float:
    """Map ``r`` in ``[r_min, R]`` onto ``[0, 1]`` as ``ln(r / r_min) / ln(R / r_min)``."""
    if not 0 < r_min < R:
        raise DomainError(f"need 0 < r_min < R, got r_min={r_min}, R={R}")
    if r < r_min or r > R:
        raise DomainError(f"radius {r} outside [{r_min}, {R}]")
    return math.log(r / r_min) / math.log(R / r_min)


def output_size(radius: int, base: int = 2) -> int:
    """``base**q`` with ``q = ceil(log_base(radius))``, computed in integers."""
    q = 0
    side = 1
    while side < radius:
        side *= base
        q += 1
    return side


def sample_grid(width: int, height: int, cfg: LogPolarConfig) -> tuple[np.ndarray, np.ndarray]:
    """Integer source coordinates ``(xs, ys)`` for every output cell, each of shape ``(S, S)``."""
    circle = _circle_for(width, height)
    if cfg.r_min >= circle.R:
        raise DegenerateInputError(f"r_min={cfg.r_min} must be below the radius R={circle.R}")
    side = cfg.size if cfg.size is not None else output_size(circle.R, cfg.base)
    p = np.arange(side) / (side - 1)
    radii = cfg.r_min * (circle.R / cfg.r_min) ** p
    theta = 2.0 * np.pi * np.arange(side) / side
    xs = np.floor(circle.m + radii[:, None] * np.cos(theta)[None, :] + 0.5).astype(np.int64)
    ys = np.floor(circle.n + radii[:, None] * np.sin(theta)[None, :] + 0.5).astype(np.int64)
    return xs, ys


def log_polar_transform(img: GrayImage, cfg: LogPolarConfig | None = None) -> GrayImage:
    """Resample ``img`` onto the log-polar grid by inverse nearest-neighbour mapping.

    Cells whose source falls outside the frame would take ``cfg.fill``; with the
    inscribed reference circle this does not happen.
    """
    cfg = cfg or LogPolarConfig()
    xs, ys = sample_grid(img.width, img.height, cfg)
    inside = (xs >= 0) & (xs < img.width) & (ys >= 0) & (ys < img.height)
    out = np.full(xs.shape, cfg.fill, dtype=np.uint8)
    out[inside] = img.pixels[ys[inside], xs[inside]]
    return GrayImage(out)


def column_shift(img: GrayImage, shift: int) -> GrayImage:
    """Circularly shift the angular axis (columns) by ``shift`` cells."""
    return GrayImage(np.roll(img.pixels, shift, axis=1))
