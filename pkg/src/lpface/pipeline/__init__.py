from .bundle import FeatureScaler, ModelBundle, load_bundle, save_bundle
from .config import ExperimentConfig, load_config, parse_config
from .core import Metrics, evaluate, predict, sweep_hidden1, train_pipeline
from .dataset import Dataset, SplitSpec, load_dataset, load_generic, load_orl, split

__all__ = [
    "Dataset", "ExperimentConfig", "FeatureScaler", "Metrics", "ModelBundle", "SplitSpec",
    "evaluate", "load_bundle", "load_config", "load_dataset", "load_generic", "load_orl",
    "parse_config", "predict", "save_bundle", "split", "sweep_hidden1", "train_pipeline",
]
