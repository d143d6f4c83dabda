"""Face datasets on disk and train/test splitting."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DecodeError, IngestionError, InvalidInputError, InvalidSplitError
from ..image import GrayImage, read_pgm, resize_nearest

ORL_SIZE = (92, 112)


@dataclass
class Dataset:
    """Labelled images; ``labels[i]`` is the class of ``images[i]``."""

    images: list[GrayImage]
    labels: list[int]
    num_classes: int
    class_names: list[str] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise InvalidInputError("images and labels differ in length")
        if self.labels and (min(self.labels) < 0 or max(self.labels) >= self.num_classes):
            raise InvalidInputError(f"labels must lie in [0, {self.num_classes})")
        if not self.class_names:
            self.class_names = [str(k) for k in range(self.num_classes)]
        if not self.sources:
            self.sources = [""] * len(self.images)

    def __len__(self):
        return len(self.images)

    @property
    def samples(self) -> list[tuple[int, GrayImage]]:
        return list(zip(self.labels, self.images))

    @property
    def image_size(self) -> tuple[int, int]:
        sizes = {img.size for img in self.images}
        if len(sizes) != 1:
            raise InvalidInputError(f"dataset mixes image sizes {sorted(sizes)}")
        return sizes.pop()

    def class_counts(self) -> np.ndarray:
        return np.bincount(np.asarray(self.labels, dtype=np.int64), minlength=self.num_classes)

    def subset(self, indices) -> Dataset:
        indices = list(indices)
        return Dataset(
            [self.images[i] for i in indices],
            [self.labels[i] for i in indices],
            self.num_classes,
            list(self.class_names),
            [self.sources[i] for i in indices],
        )


def _load_image(path: Path, root: Path) -> GrayImage:
    try:
        return read_pgm(path)
    except DecodeError as exc:
        raise IngestionError(f"cannot decode image ({exc})", path.relative_to(root).as_posix()) from exc
    except OSError as exc:
        raise IngestionError(f"cannot read image ({exc.strerror})", path.relative_to(root).as_posix()) from exc


def load_orl(path, expected_size: tuple[int, int] | None = None) -> Dataset:
    """Load an ORL/AT&T tree ``s<k>/<j>.pgm``.

    Subjects ``s1..sK`` and images ``1..J`` must form complete ranges, where
    K and J are the largest indices present. Subject ``s<k>`` becomes class
    ``k - 1``. All images must share one size (``expected_size`` if given).
    """
    root = Path(path)
    if not root.is_dir():
        raise IngestionError("dataset directory not found", str(root))
    subjects = {}
    for d in root.iterdir():
        match = re.fullmatch(r"s(\d+)", d.name)
        if d.is_dir() and match:
            subjects[int(match.group(1))] = d
    if not subjects:
        raise IngestionError("no s<k> subject directories", str(root))
    n_subjects = max(subjects)
    n_images = 0
    for d in subjects.values():
        for f in d.iterdir():
            match = re.fullmatch(r"(\d+)\.pgm", f.name, flags=re.IGNORECASE)
            if match:
                n_images = max(n_images, int(match.group(1)))
    if n_images < 2:
        raise IngestionError("subjects need at least 2 images", str(root))

    images, labels, sources = [], [], []
    for k in range(1, n_subjects + 1):
        if k not in subjects:
            raise IngestionError("missing subject directory", f"s{k}")
        for j in range(1, n_images + 1):
            rel = f"s{k}/{j}.pgm"
            f = root / rel
            if not f.is_file():
                candidates = [c for c in subjects[k].glob("*") if c.name.lower() == f"{j}.pgm"]
                if not candidates:
                    raise IngestionError("missing image", rel)
                f = candidates[0]
            img = _load_image(f, root)
            want = expected_size or (images[0].size if images else img.size)
            if img.size != want:
                raise IngestionError(f"image is {img.width}x{img.height}, expected {want[0]}x{want[1]}", rel)
            images.append(img)
            labels.append(k - 1)
            sources.append(rel)
    names = [f"s{k}" for k in range(1, n_subjects + 1)]
    return Dataset(images, labels, n_subjects, names, sources)


def load_generic(path, size: tuple[int, int] | None = None) -> Dataset:
    """Load ``<subject>/<image>.pgm`` trees; classes are sorted by directory name.

    Images are resized (nearest neighbour) to ``size`` or, by default, to the
    size of the first image read.
    """
    root = Path(path)
    if not root.is_dir():
        raise IngestionError("dataset directory not found", str(root))
    subject_dirs = sorted(d for d in root.iterdir() if d.is_dir())
    if len(subject_dirs) < 2:
        raise IngestionError("need at least 2 subject directories", str(root))
    images, labels, sources = [], [], []
    for label, d in enumerate(subject_dirs):
        files = sorted(f for f in d.iterdir() if f.is_file() and f.suffix.lower() == ".pgm")
        if len(files) < 2:
            raise IngestionError("subject needs at least 2 PGM images", d.relative_to(root).as_posix())
        for f in files:
            img = _load_image(f, root)
            if size is None:
                size = img.size
            if img.size != size:
                img = resize_nearest(img, *size)
            images.append(img)
            labels.append(label)
            sources.append(f.relative_to(root).as_posix())
    return Dataset(images, labels, len(subject_dirs), [d.name for d in subject_dirs], sources)


def load_dataset(path, layout: str = "auto", size: tuple[int, int] | None = None) -> Dataset:
    """Dispatch on ``layout`` ("orl", "generic" or "auto": ORL when ``s<k>`` dirs exist)."""
    root = Path(path)
    if layout == "auto":
        is_orl = root.is_dir() and any(d.is_dir() and re.fullmatch(r"s\d+", d.name) for d in root.iterdir())
        layout = "orl" if is_orl else "generic"
    if layout == "orl":
        return load_orl(root, expected_size=size)
    if layout == "generic":
        return load_generic(root, size=size)
    raise InvalidInputError(f"unknown dataset layout {layout!r}")


@dataclass(frozen=True)
class SplitSpec:
    per_class_train: int = 5
    seed: int = 0
    mode: str = "first-k"

    def __post_init__(self):
        if self.mode not in ("first-k", "seeded-random"):
            raise InvalidSplitError(f"unknown split mode {self.mode!r}")
        if self.per_class_train < 1:
            raise InvalidSplitError("per_class_train must be at least 1")


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Put ``spec.per_class_train`` samples of every class in train, the rest in test.

    ``first-k`` takes the first samples of each class in dataset order;
    ``seeded-random`` draws them with a generator seeded by ``spec.seed``.
    Both outputs keep dataset order.
    """
    counts = ds.class_counts()
    if counts.size == 0 or counts.min() <= spec.per_class_train:
        raise InvalidSplitError(
            f"per_class_train={spec.per_class_train} needs every class to have more samples "
            f"(smallest class has {int(counts.min()) if counts.size else 0})"
        )
    labels = np.asarray(ds.labels)
    rng = np.random.default_rng(spec.seed)
    train_idx = []
    for k in range(ds.num_classes):
        members = np.flatnonzero(labels == k)
        if spec.mode == "seeded-random":
            chosen = rng.choice(members, size=spec.per_class_train, replace=False)
        else:
            chosen = members[:spec.per_class_train]
        train_idx.extend(int(i) for i in chosen)
    train_set = set(train_idx)
    test_idx = [i for i in range(len(ds)) if i not in train_set]
    return ds.subset(sorted(train_idx)), ds.subset(test_idx)
