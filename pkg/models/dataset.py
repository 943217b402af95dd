from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np


@dataclass
class Dataset:
    """
    Feature matrix with dense integer labels in [0, n_classes)
    """
    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.n_classes = int(self.n_classes)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_samples(self) -> int:
        return len(self)

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def validate(self) -> bool:
        """
        Validate the dataset
        """
        if self.features.ndim != 2:
            raise ValueError("Features must be a 2-d matrix")
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("Features and labels disagree on the number of samples")
        if len(self) < 1:
            raise ValueError("A dataset needs at least one sample")
        if self.n_classes < 1:
            raise ValueError("n_classes must be positive")
        if self.labels.min() < 0 or self.labels.max() >= self.n_classes:
            raise ValueError(f"Labels must lie in [0, {self.n_classes})")
        return True

    def subset(self, indices, feature_offset: Optional[np.ndarray] = None) -> "Dataset":
        """
        Rows at `indices`; features shifted by `feature_offset` when given
        """
        indices = np.asarray(indices, dtype=np.int64)
        features = self.features[indices]
        if feature_offset is not None:
            features = features + feature_offset
        return Dataset(features, self.labels[indices], self.n_classes)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def equals(self, other: "Dataset") -> bool:
        return (self.n_classes == other.n_classes
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.features, other.features))


class PartitionStrategy(str, Enum):
    IID = "iid"
    DIRICHLET_LABEL = "dirichlet_label"
    QUANTITY_SKEW = "quantity_skew"
    PATHOLOGICAL_LABEL = "pathological_label"
    LABEL_QUANTITY = "label_quantity"
    COVARIATE_SHIFT = "covariate_shift"


# parameter name -> default for each strategy
STRATEGY_PARAMS: Dict[PartitionStrategy, Dict[str, float]] = {
    PartitionStrategy.IID: {},
    PartitionStrategy.DIRICHLET_LABEL: {"alpha": 0.5},
    PartitionStrategy.QUANTITY_SKEW: {"beta": 0.5},
    PartitionStrategy.PATHOLOGICAL_LABEL: {"k": 2},
    PartitionStrategy.LABEL_QUANTITY: {"k": 2},
    PartitionStrategy.COVARIATE_SHIFT: {"sigma": 1.0},
}

COVERING_STRATEGIES = (
    PartitionStrategy.IID,
    PartitionStrategy.DIRICHLET_LABEL,
    PartitionStrategy.QUANTITY_SKEW,
    PartitionStrategy.COVARIATE_SHIFT,
)

# strategies whose clients each hold exactly k distinct labels
LABEL_COUNT_STRATEGIES = (
    PartitionStrategy.PATHOLOGICAL_LABEL,
    PartitionStrategy.LABEL_QUANTITY,
)


@dataclass
class PartitionSpec:
    """
    Which skew family to apply and with which parameters
    """
    strategy: PartitionStrategy = PartitionStrategy.IID
    params: Dict[str, float] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        self.strategy = PartitionStrategy(self.strategy)
        merged = dict(STRATEGY_PARAMS[self.strategy])
        merged.update(self.params or {})
        self.params = merged

    def validate(self, n_classes: Optional[int] = None) -> bool:
        allowed = STRATEGY_PARAMS[self.strategy]
        unknown = sorted(set(self.params) - set(allowed))
        if unknown:
            expected = ", ".join(allowed) or "no parameters"
            raise ValueError(f"Unknown parameter(s) {unknown} for {self.strategy.value} (expected {expected})")

        if "alpha" in self.params and not self.params["alpha"] > 0:
            raise ValueError("alpha must be > 0")
        if "beta" in self.params and not self.params["beta"] > 0:
            raise ValueError("beta must be > 0")
        if "sigma" in self.params and not self.params["sigma"] >= 0:
            raise ValueError("sigma must be >= 0")
        if "k" in self.params:
            k = self.params["k"]
            if int(k) != k or k < 1:
                raise ValueError("k must be a positive integer")
            if n_classes is not None and k > n_classes:
                raise ValueError(f"k must be in [1, {n_classes}]")
        return True


@dataclass
class Partition:
    """
    Client index -> sorted sample indices (plus per-client feature offsets
    for covariate shift)
    """
    assignment: Dict[int, np.ndarray]
    feature_offsets: Optional[Dict[int, np.ndarray]] = None

    def __post_init__(self):
        self.assignment = {
            int(c): np.sort(np.asarray(idx, dtype=np.int64)) for c, idx in sorted(self.assignment.items())
        }

    @property
    def n_clients(self) -> int:
        return len(self.assignment)

    def clients(self) -> List[int]:
        return sorted(self.assignment)

    def sizes(self) -> List[int]:
        return [int(self.assignment[c].size) for c in self.clients()]

    def client_dataset(self, dataset: Dataset, client: int) -> Dataset:
        offset = self.feature_offsets.get(client) if self.feature_offsets else None
        return dataset.subset(self.assignment[client], offset)

    def all_indices(self) -> np.ndarray:
        if not self.assignment:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.assignment[c] for c in self.clients()])


@dataclass
class SkewReport:
    """
    How heterogeneous a partition is
    """
    sizes: List[int]
    label_histograms: np.ndarray
    mean_pairwise_tv: float
