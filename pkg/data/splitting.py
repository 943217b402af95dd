import logging
from typing import Dict, Tuple

import numpy as np

from models.dataset import Dataset
from utils import make_rng, round_half_up

logger = logging.getLogger(__name__)


def split_indices(dataset: Dataset, test_fraction: float, stratified: bool, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sorted (train, test) index arrays forming a disjoint cover of the dataset
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")

    rng = make_rng(seed, "train-test-split")
    n = len(dataset)

    if not stratified:
        n_test = min(max(round_half_up(test_fraction * n), 1 if n > 1 else 0), n - 1)
        order = rng.permutation(n)
        return np.sort(order[n_test:]), np.sort(order[:n_test])

    train_parts, test_parts = [], []
    for label in range(dataset.n_classes):
        members = np.flatnonzero(dataset.labels == label)
        if members.size == 0:
            continue
        if members.size == 1:
            logger.warning(f"Class {label} has a single sample; it stays in the training set")
            train_parts.append(members)
            continue
        n_test = round_half_up(test_fraction * members.size)
        # keep at least one training sample per class
        n_test = min(n_test, members.size - 1)
        shuffled = rng.permutation(members)
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])

    train = np.sort(np.concatenate(train_parts)) if train_parts else np.zeros(0, dtype=np.int64)
    test = np.sort(np.concatenate(test_parts)) if test_parts else np.zeros(0, dtype=np.int64)
    return train, test


def train_test_split(dataset: Dataset, test_fraction: float, stratified: bool, seed: int) -> Tuple[Dataset, Dataset]:
    """
    Split a dataset into train and test parts
    """
    train_idx, test_idx = split_indices(dataset, test_fraction, stratified, seed)
    logger.info(f"Split {len(dataset)} samples into {train_idx.size} train / {test_idx.size} test")
    return dataset.subset(train_idx), dataset.subset(test_idx)


def iid_slices(dataset: Dataset, n_slices: int, seed: int, stream: str = "client-test-split") -> Dict[int, Dataset]:
    """
    Random near-equal slices of a dataset, one per client (some may be empty
    when the dataset has fewer rows than slices)
    """
    if n_slices < 1:
        raise ValueError("n_slices must be at least 1")
    order = make_rng(seed, stream).permutation(len(dataset))
    return {c: dataset.subset(np.sort(part)) for c, part in enumerate(np.array_split(order, n_slices))}
