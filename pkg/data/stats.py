from itertools import combinations

import numpy as np

from models.dataset import Dataset, Partition, SkewReport


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.abs(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)).sum())


def label_distribution(histogram: np.ndarray) -> np.ndarray:
    total = histogram.sum()
    return histogram / total if total > 0 else np.zeros_like(histogram, dtype=np.float64)


def partition_stats(dataset: Dataset, partition: Partition) -> SkewReport:
    """
    Per-client sizes and label histograms, plus the mean pairwise total
    variation distance between client label distributions
    """
    histograms = np.stack([
        np.bincount(dataset.labels[partition.assignment[c]], minlength=dataset.n_classes)
        for c in partition.clients()
    ]) if partition.n_clients else np.zeros((0, dataset.n_classes), dtype=np.int64)

    distributions = [label_distribution(h) for h in histograms]
    pairs = list(combinations(range(len(distributions)), 2))
    mean_tv = float(np.mean([total_variation(distributions[a], distributions[b]) for a, b in pairs])) if pairs else 0.0

    return SkewReport(sizes=partition.sizes(), label_histograms=histograms, mean_pairwise_tv=mean_tv)
