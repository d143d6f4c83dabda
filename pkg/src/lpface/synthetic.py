"""Procedural face-like images for demos and tests when no face database is at hand.

A subject is a fixed set of shape parameters (head outline, hair, eye,
brow, nose and mouth placement, contrast). Each image of a subject adds a
small random pose and appearance change: in-plane rotation, scaling,
translation, expression and illumination gain, plus sensor noise. Faces
sit on a dark background like the ORL and OTCBVS photographs.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import GrayImage, write_pgm


@dataclass(frozen=True)
class Variation:
    max_rotation: float = 10.0      # degrees
    max_scale: float = 0.08         # relative
    max_shift: float = 1.5          # pixels
    expression: float = 0.25
    gain: float = 0.12
    noise: float = 4.0              # intensity std


def _subject_params(rng: np.random.Generator) -> dict:
    return {
        "head_a": rng.uniform(0.30, 0.40),
        "head_b": rng.uniform(0.40, 0.48),
        "skin": rng.uniform(120, 200),
        "hair": rng.uniform(20, 90),
        "hair_line": rng.uniform(-0.30, -0.18),
        "eye_y": rng.uniform(-0.10, -0.02),
        "eye_dx": rng.uniform(0.11, 0.17),
        "eye_r": rng.uniform(0.030, 0.050),
        "eye_dark": rng.uniform(50, 110),
        "brow_gap": rng.uniform(0.05, 0.09),
        "brow_w": rng.uniform(0.06, 0.10),
        "brow_dark": rng.uniform(30, 90),
        "nose_len": rng.uniform(0.08, 0.16),
        "nose_w": rng.uniform(0.020, 0.040),
        "nose_shade": rng.uniform(10, 40),
        "mouth_y": rng.uniform(0.18, 0.26),
        "mouth_w": rng.uniform(0.07, 0.13),
        "mouth_dark": rng.uniform(30, 80),
        "cheek": rng.uniform(-25, 25),
        "glasses": rng.random() < 0.25,
        "beard": rng.random() < 0.2,
    }


def _blob(u, v, cu, cv, su, sv):
    return np.exp(-(((u - cu) / su) ** 2 + ((v - cv) / sv) ** 2))


def render_face(params: dict, width: int = 92, height: int = 112, rotation: float = 0.0,
                scale: float = 1.0, shift=(0.0, 0.0), expression: float = 0.0, gain: float = 1.0,
                noise: float = 0.0, rng: np.random.Generator | None = None) -> GrayImage:
    """Render one face; geometry is expressed in units of the image height."""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    cx, cy = width // 2 + shift[0], height // 2 + shift[1]
    t = np.radians(rotation)
    dx, dy = (xs - cx) / (scale * height), (ys - cy) / (scale * height)
    u = np.cos(t) * dx + np.sin(t) * dy
    v = -np.sin(t) * dx + np.cos(t) * dy
    p = params

    head = (u / p["head_a"]) ** 2 + (v / p["head_b"]) ** 2
    inside = 1.0 / (1.0 + np.exp((head - 1.0) * 25.0))
    img = np.full(u.shape, 12.0)
    face = p["skin"] + p["cheek"] * _blob(u, v, 0.0, 0.12, 0.25, 0.15) - 30.0 * np.clip(np.abs(u) / p["head_a"], 0, 1) ** 2
    hair = 1.0 / (1.0 + np.exp((v - p["hair_line"]) * 40.0))
    face = face * (1 - hair) + p["hair"] * hair
    img = img * (1 - inside) + face * inside

    for side in (-1.0, 1.0):
        ex = side * p["eye_dx"]
        img -= (p["skin"] - p["eye_dark"]) * _blob(u, v, ex, p["eye_y"], p["eye_r"] * 1.6, p["eye_r"]) * inside
        brow_y = p["eye_y"] - p["brow_gap"]
        img -= (p["skin"] - p["brow_dark"]) * 0.8 * _blob(u, v, ex, brow_y, p["brow_w"], 0.012) * inside
        if p["glasses"]:
            ring = np.abs(np.hypot((u - ex) / 1.2, v - p["eye_y"]) - p["eye_r"] * 2.2)
            img -= 70.0 * np.exp(-(ring / 0.008) ** 2) * inside
    img -= p["nose_shade"] * _blob(u, v, 0.0, p["eye_y"] + p["nose_len"] / 2 + 0.03, p["nose_w"], p["nose_len"] / 2) * inside
    img -= p["nose_shade"] * 1.5 * _blob(u, v, 0.0, p["eye_y"] + p["nose_len"] + 0.04, p["nose_w"] * 1.5, 0.015) * inside
    mouth_w = p["mouth_w"] * (1.0 + 0.5 * expression)
    mouth_h = 0.018 * (1.0 + 1.5 * max(expression, 0.0))
    img -= (p["skin"] - p["mouth_dark"]) * _blob(u, v, 0.0, p["mouth_y"], mouth_w, mouth_h) * inside
    if p["beard"]:
        img -= 60.0 * np.clip((v - p["mouth_y"] + 0.04) / 0.05, 0, 1) * (head < 1.0)
    img *= gain
    if noise and rng is not None:
        img += rng.normal(0.0, noise, img.shape)
    return GrayImage(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def subject_images(subject_seed: int, count: int, width: int = 92, height: int = 112,
                   variation: Variation = Variation()) -> list[GrayImage]:
    rng = np.random.default_rng([subject_seed, 1])
    params = _subject_params(rng)
    images = []
    for _ in range(count):
        images.append(render_face(
            params, width, height,
            rotation=rng.uniform(-1, 1) * variation.max_rotation,
            scale=1.0 + rng.uniform(-1, 1) * variation.max_scale,
            shift=tuple(rng.uniform(-1, 1, 2) * variation.max_shift),
            expression=rng.uniform(-1, 1) * variation.expression,
            gain=1.0 + rng.uniform(-1, 1) * variation.gain,
            noise=variation.noise,
            rng=rng,
        ))
    return images


def face_fixture(seed: int, width: int = 92, height: int = 112) -> GrayImage:
    """A single upright, unscaled face without noise."""
    params = _subject_params(np.random.default_rng([seed, 1]))
    return render_face(params, width, height)


def write_orl_tree(root, subjects: int = 40, images: int = 10, width: int = 92, height: int = 112,
                   variation: Variation = Variation(), seed: int = 0) -> Path:
    """Write an ORL-shaped tree ``s<k>/<j>.pgm``."""
    root = Path(root)
    for k in range(1, subjects + 1):
        d = root / f"s{k}"
        d.mkdir(parents=True, exist_ok=True)
        for j, img in enumerate(subject_images(seed * 100003 + k, images, width, height, variation), 1):
            write_pgm(img, d / f"{j}.pgm")
    return root


def write_generic_tree(root, subjects: int = 16, images: int = 125, width: int = 92, height: int = 112,
                       variation: Variation = Variation(), seed: int = 0) -> Path:
    """Write a ``<subject>/<image>.pgm`` tree (OTCBVS-like shape by default)."""
    root = Path(root)
    for k in range(subjects):
        d = root / f"subject{k:02d}"
        d.mkdir(parents=True, exist_ok=True)
        for j, img in enumerate(subject_images(seed * 100003 + 50000 + k, images, width, height, variation)):
            write_pgm(img, d / f"img{j:04d}.pgm")
    return root
