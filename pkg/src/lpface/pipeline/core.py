"""Train/evaluate orchestration: transform, eigenspace, classifier, metrics."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..eigenspace import Eigenspace, build_eigenspace, center, mean_image, project
from ..errors import InvalidInputError, LpFaceError
from ..image import GrayImage, to_vector
from ..logpolar import LogPolarConfig, log_polar_transform
from ..mlp import Hyperparams, forward, init_network, one_hot_targets, train
from .bundle import MODES, FeatureScaler, ModelBundle
from .config import PIPELINE_ERROR_NORM
from .dataset import Dataset

log = logging.getLogger(__name__)

# published recognition rates of the method, reported next to measured values
REFERENCE_ORL_RECOGNITION = {"visual": 89.5, "logpolar": 97.5}
REFERENCE_ORL_ERROR = {"visual": 10.5, "logpolar": 2.5}
REFERENCE_OTCBVS_RECOGNITION = {"visual": 87.84, "logpolar": 96.36}


def _check_mode(mode: str) -> str:
    mode = mode.replace("-", "")
    if mode not in MODES:
        raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def prepare_image(img: GrayImage, mode: str, lp_cfg: LogPolarConfig) -> np.ndarray:
    """Image vector fed to the eigenspace: raw pixels, or pixels of the log-polar image."""
    if _check_mode(mode) == "logpolar":
        img = log_polar_transform(img, lp_cfg)
    return to_vector(img)


def image_matrix(images, mode: str, lp_cfg: LogPolarConfig) -> np.ndarray:
    """Stack prepared image vectors as rows of a ``(count, H)`` array."""
    return np.vstack([prepare_image(img, mode, lp_cfg) for img in images])


def _pad(features: np.ndarray, width: int) -> np.ndarray:
    if features.shape[1] >= width:
        return features[:, :width]
    return np.hstack([features, np.zeros((features.shape[0], width - features.shape[1]))])


@dataclass
class FeatureSet:
    """Eigenspace built on a training set plus the scaled training features."""

    eigenspace: Eigenspace
    scaler: FeatureScaler
    features: np.ndarray      # (P, width), already scaled
    labels: np.ndarray
    width: int
    warnings: list[str] = field(default_factory=list)


def build_features(ds_train: Dataset, mode: str, lp_cfg: LogPolarConfig, max_u: int = 40) -> FeatureSet:
    rows = image_matrix(ds_train.images, mode, lp_cfg)
    mean = mean_image(rows.T)
    space = build_eigenspace(center(rows.T, mean), mean, max_u=max_u)
    warnings = []
    if space.n_components < max_u:
        msg = f"only {space.n_components} positive eigenvalues; features zero-padded to {max_u}"
        log.warning(msg)
        warnings.append(msg)
    raw = _pad(project(space, rows), max_u)
    scaler = FeatureScaler.fit(raw)
    return FeatureSet(space, scaler, scaler.transform(raw), np.asarray(ds_train.labels), max_u, warnings)


def train_pipeline(ds_train: Dataset, mode: str = "logpolar", lp_cfg: LogPolarConfig | None = None,
                   hp: Hyperparams | None = None, max_u: int = 40, hidden=(40, 25),
                   progress_every: int = 0) -> ModelBundle:
    """Transform, build the eigenspace, project and train the classifier."""
    mode = _check_mode(mode)
    lp_cfg = lp_cfg or LogPolarConfig()
    hp = hp or Hyperparams(error_norm=PIPELINE_ERROR_NORM)
    started = time.perf_counter()
    fs = build_features(ds_train, mode, lp_cfg, max_u)
    sizes = [fs.width, *hidden, ds_train.num_classes]
    net = init_network(sizes, hp.seed)
    targets = one_hot_targets(fs.labels, ds_train.num_classes)
    result = train(net, fs.features, targets, hp, progress_every=progress_every)
    metadata = {
        "seed": hp.seed,
        "epochs_run": result.epochs,
        "final_error": result.final_error,
        "stop_reason": result.stop_reason,
        "train_samples": len(ds_train),
        "components": fs.eigenspace.n_components,
        "warnings": fs.warnings,
        "train_seconds": round(time.perf_counter() - started, 3),
    }
    return ModelBundle(
        mode=mode,
        lp_config=lp_cfg,
        eigenspace=fs.eigenspace,
        scaler=fs.scaler,
        network=result.network,
        hyperparams=hp,
        image_size=ds_train.image_size,
        feature_width=fs.width,
        class_names=list(ds_train.class_names),
        metadata=metadata,
    )


def bundle_features(bundle: ModelBundle, images) -> np.ndarray:
    """Scaled feature rows for ``images`` under the bundle's transform and eigenspace."""
    for img in images:
        if img.size != tuple(bundle.image_size):
            raise InvalidInputError(
                f"image is {img.width}x{img.height} but the bundle was trained on "
                f"{bundle.image_size[0]}x{bundle.image_size[1]}"
            )
    rows = image_matrix(images, bundle.mode, bundle.lp_config)
    if rows.shape[1] != bundle.eigenspace.dim:
        raise InvalidInputError(
            f"{bundle.mode} vectors have {rows.shape[1]} pixels, eigenspace expects {bundle.eigenspace.dim}"
        )
    return bundle.scaler.transform(_pad(project(bundle.eigenspace, rows), bundle.feature_width))


def predict(bundle: ModelBundle, images) -> tuple[np.ndarray, np.ndarray]:
    """Predicted classes (ties to the lowest index) and the ``(count, K)`` output scores."""
    images = list(images)
    if not images:
        return np.zeros(0, dtype=np.int64), np.zeros((0, bundle.num_classes))
    scores, _ = forward(bundle.network, bundle_features(bundle, images))
    return np.argmax(scores, axis=1), scores


@dataclass
class Metrics:
    recognition_rate: float
    false_rejection_rate: float
    confusion: np.ndarray
    curve: list[tuple[int, float, float]]
    predictions: np.ndarray
    scores: np.ndarray
    threshold: float

    @property
    def error_rate(self) -> float:
        return 100.0 - self.recognition_rate

    @property
    def total(self) -> int:
        return int(self.confusion.sum())


def score_predictions(labels, predictions, top_scores, num_classes: int, threshold: float = 0.0,
                      curve_step: int = 20) -> Metrics:
    """Metrics from per-sample predictions.

    A sample is falsely rejected when it is misclassified or its winning
    score is below ``threshold``. Curve points cover test-set prefixes of
    ``curve_step, 2*curve_step, ...`` samples and always the full set.
    """
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    top_scores = np.asarray(top_scores, dtype=np.float64)
    total = labels.size
    if total == 0:
        raise InvalidInputError("cannot score an empty test set")
    correct = predictions == labels
    rejected = ~correct | (top_scores < threshold)
    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(confusion, (labels, predictions), 1)
    stops = list(range(curve_step, total, curve_step)) if curve_step > 0 else []
    curve = [(n, 100.0 * correct[:n].mean(), 100.0 * rejected[:n].mean()) for n in stops + [total]]
    return Metrics(
        recognition_rate=100.0 * correct.mean(),
        false_rejection_rate=100.0 * rejected.mean(),
        confusion=confusion,
        curve=curve,
        predictions=predictions,
        scores=top_scores,
        threshold=threshold,
    )


def evaluate(bundle: ModelBundle, ds_test: Dataset, threshold: float = 0.0, curve_step: int = 20) -> Metrics:
    if ds_test.num_classes != bundle.num_classes:
        raise InvalidInputError(
            f"dataset has {ds_test.num_classes} classes, bundle was trained on {bundle.num_classes}"
        )
    predictions, scores = predict(bundle, ds_test.images)
    top = scores[np.arange(len(predictions)), predictions]
    return score_predictions(ds_test.labels, predictions, top, bundle.num_classes, threshold, curve_step)


@dataclass
class SweepResult:
    size: int
    errors: list[float]
    error: str | None = None

    @property
    def final_error(self) -> float:
        return self.errors[-1] if self.errors else float("nan")


def sweep_hidden1(ds_train: Dataset, mode: str, lp_cfg: LogPolarConfig | None, hp: Hyperparams,
                  sizes, epochs_budget: int, max_u: int = 40, hidden2: int = 25) -> list[SweepResult]:
    """Train one network per first-hidden-layer width on shared features.

    Every run uses the same seed and a fixed epoch budget with the early
    stopping rules disabled; a trace holds the error before each of the
    ``epochs_budget`` updates followed by the final error. A failing size is reported in its result without
    stopping the sweep.
    """
    sizes = list(sizes)
    if not sizes:
        raise InvalidInputError("sweep needs at least one hidden-layer size")
    fs = build_features(ds_train, mode, lp_cfg or LogPolarConfig(), max_u)
    targets = one_hot_targets(fs.labels, ds_train.num_classes)
    budget = Hyperparams(**{**hp.__dict__, "max_epochs": epochs_budget, "goal": 0.0, "e_max": 0.0})
    results = []
    for size in sizes:
        try:
            net = init_network([fs.width, size, hidden2, ds_train.num_classes], budget.seed)
            run = train(net, fs.features, targets, budget)
            results.append(SweepResult(size, run.errors + [run.final_error]))
        except LpFaceError as exc:
            log.warning("hidden1=%d failed: %s", size, exc)
            results.append(SweepResult(size, [], str(exc)))
    return results
