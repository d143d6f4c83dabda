"""Persisted pipelines.

Container layout::

    LPFACE-BUNDLE <format_version>\\n
    <manifest byte length>\\n
    <manifest: UTF-8 JSON>
    <arrays: little-endian float64, concatenated in manifest order>
    <SHA-256 of every preceding byte, 32 bytes>

The manifest records configuration, metadata and, for each array, its name
and shape.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..eigenspace import Eigenspace
from ..errors import ChecksumError, MalformedContainerError, VersionMismatchError
from ..logpolar import LogPolarConfig
from ..mlp import Hyperparams, Network

FORMAT_VERSION = 1
MAGIC = b"LPFACE-BUNDLE"
MODES = ("visual", "logpolar")


@dataclass
class FeatureScaler:
    """Per-component affine map of training features onto [-1, 1].

    Components with zero range on the training set map to 0.
    """

    low: np.ndarray
    high: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> FeatureScaler:
        return cls(features.min(axis=0), features.max(axis=0))

    def transform(self, features) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        span = self.high - self.low
        safe = np.where(span > 0, span, 1.0)
        scaled = 2.0 * (features - self.low) / safe - 1.0
        return np.where(span > 0, scaled, 0.0)


@dataclass
class ModelBundle:
    mode: str
    lp_config: LogPolarConfig
    eigenspace: Eigenspace
    scaler: FeatureScaler
    network: Network
    hyperparams: Hyperparams
    image_size: tuple[int, int]
    feature_width: int
    class_names: list[str]
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @property
    def num_classes(self) -> int:
        return self.network.n_out


def _arrays(bundle: ModelBundle) -> list[tuple[str, np.ndarray]]:
    out = [
        ("mean", bundle.eigenspace.mean),
        ("basis", bundle.eigenspace.basis),
        ("eigenvalues", bundle.eigenspace.eigenvalues),
        ("scaler_low", bundle.scaler.low),
        ("scaler_high", bundle.scaler.high),
    ]
    for i, (w, b) in enumerate(zip(bundle.network.weights, bundle.network.biases)):
        out += [(f"weight{i}", w), (f"bias{i}", b)]
    return out


def dumps(bundle: ModelBundle) -> bytes:
    arrays = _arrays(bundle)
    manifest = {
        "format_version": bundle.format_version,
        "mode": bundle.mode,
        "image_size": list(bundle.image_size),
        "feature_width": bundle.feature_width,
        "class_names": bundle.class_names,
        "layer_sizes": bundle.network.layer_sizes,
        "logpolar": dataclasses.asdict(bundle.lp_config),
        "hyperparams": dataclasses.asdict(bundle.hyperparams),
        "metadata": bundle.metadata,
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
    }
    text = json.dumps(manifest, indent=1, sort_keys=True).encode("utf-8")
    body = b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, arr in arrays)
    head = MAGIC + f" {bundle.format_version}\n{len(text)}\n".encode("ascii")
    payload = head + text + body
    return payload + hashlib.sha256(payload).digest()


def loads(data: bytes) -> ModelBundle:
    if len(data) < len(MAGIC) + 32 or not data.startswith(MAGIC + b" "):
        raise MalformedContainerError("not an lpface bundle")
    payload, digest = data[:-32], data[-32:]
    first_nl = payload.find(b"\n")
    second_nl = payload.find(b"\n", first_nl + 1)
    if first_nl < 0 or second_nl < 0:
        raise MalformedContainerError("bundle header is incomplete")
    try:
        version = int(payload[len(MAGIC) + 1:first_nl])
        manifest_len = int(payload[first_nl + 1:second_nl])
    except ValueError:
        raise MalformedContainerError("bundle header is not numeric") from None
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"bundle format version {version}, this build reads {FORMAT_VERSION}")
    start = second_nl + 1
    if start + manifest_len > len(payload):
        raise MalformedContainerError("bundle truncated inside the manifest")
    try:
        manifest = json.loads(payload[start:start + manifest_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise MalformedContainerError("bundle manifest is not valid JSON") from None
    sizes = [int(np.prod(a["shape"], dtype=np.int64)) * 8 for a in manifest.get("arrays", [])]
    body = payload[start + manifest_len:]
    if len(body) != sum(sizes):
        raise MalformedContainerError(f"bundle array section holds {len(body)} bytes, expected {sum(sizes)}")
    if hashlib.sha256(payload).digest() != digest:
        raise ChecksumError("bundle checksum mismatch")
    if manifest.get("format_version") != version:
        raise VersionMismatchError("manifest and header disagree on format version")

    arrays, offset = {}, 0
    for spec, nbytes in zip(manifest["arrays"], sizes):
        chunk = np.frombuffer(body, dtype="<f8", count=nbytes // 8, offset=offset)
        arrays[spec["name"]] = chunk.astype(np.float64).reshape(spec["shape"])
        offset += nbytes
    n_layers = len(manifest["layer_sizes"]) - 1
    try:
        network = Network(
            [arrays[f"weight{i}"] for i in range(n_layers)],
            [arrays[f"bias{i}"] for i in range(n_layers)],
        )
        return ModelBundle(
            mode=manifest["mode"],
            lp_config=LogPolarConfig(**manifest["logpolar"]),
            eigenspace=Eigenspace(arrays["mean"], arrays["basis"], arrays["eigenvalues"]),
            scaler=FeatureScaler(arrays["scaler_low"], arrays["scaler_high"]),
            network=network,
            hyperparams=Hyperparams(**manifest["hyperparams"]),
            image_size=tuple(manifest["image_size"]),
            feature_width=manifest["feature_width"],
            class_names=manifest["class_names"],
            metadata=manifest["metadata"],
            format_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedContainerError(f"bundle content is inconsistent: {exc}") from None


def save_bundle(bundle: ModelBundle, path) -> None:
    Path(path).write_bytes(dumps(bundle))


def load_bundle(path) -> ModelBundle:
    return loads(Path(path).read_bytes())
