import logging

import numpy as np

from models.dataset import Dataset
from utils import make_rng

logger = logging.getLogger(__name__)


def _class_means(n_features: int, n_classes: int, separation: float, rng: np.random.Generator) -> np.ndarray:
    """
    One mean per class, pairwise distance `separation`.

    Scaled standard basis vectors when there are enough dimensions; random
    unit directions otherwise (pairwise distance then only approximate).
    """
    scale = separation / np.sqrt(2.0)
    if n_features >= n_classes:
        means = np.zeros((n_classes, n_features))
        axes = rng.permutation(n_features)[:n_classes]
        means[np.arange(n_classes), axes] = scale
        return means
    directions = rng.standard_normal((n_classes, n_features))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * scale


def generate_blobs(n_samples: int, n_features: int, n_classes: int, separation: float, seed: int) -> Dataset:
    """
    Balanced Gaussian class clusters (unit covariance) around well separated means
    """
    if min(n_samples, n_features, n_classes) < 1:
        raise ValueError("n_samples, n_features and n_classes must be positive")
    if separation < 0:
        raise ValueError("separation cannot be negative")

    rng = make_rng(seed, "data-blobs")
    means = _class_means(n_features, n_classes, float(separation), rng)

    per_class = np.full(n_classes, n_samples // n_classes)
    per_class[: n_samples % n_classes] += 1
    labels = np.repeat(np.arange(n_classes), per_class)
    features = means[labels] + rng.standard_normal((n_samples, n_features))

    order = rng.permutation(n_samples)
    dataset = Dataset(features[order], labels[order], n_classes)
    dataset.validate()
    logger.debug(f"Generated blobs: {n_samples} samples, {n_features} features, {n_classes} classes")
    return dataset
