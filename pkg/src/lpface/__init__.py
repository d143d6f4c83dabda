"""Rotation- and scale-tolerant face recognition: log-polar registration,
eigenface projection and a delta-bar-delta trained multilayer perceptron."""

from .errors import LpFaceError
from .image import GrayImage, decode_pgm, encode_pgm, read_pgm, write_pgm
from .logpolar import LogPolarConfig, log_polar_transform

__version__ = "0.1.0"

__all__ = [
    "GrayImage",
    "LogPolarConfig",
    "LpFaceError",
    "decode_pgm",
    "encode_pgm",
    "log_polar_transform",
    "read_pgm",
    "write_pgm",
]
