"""
Client partitioning: IID plus five non-IID skew families.

All strategies are deterministic given (dataset, n_clients, spec).
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from models.dataset import (COVERING_STRATEGIES, LABEL_COUNT_STRATEGIES, Dataset, Partition, PartitionSpec,
                            PartitionStrategy)
from services.error_service import PartitionError
from utils import largest_remainder_counts, make_rng
from validators.partition_validator import PartitionValidator

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 100


def sample_dirichlet(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Draw from Dirichlet(alpha) by normalizing Gamma variates.

    numpy's standard_gamma is Marsaglia-Tsang for shape >= 1; shapes below 1
    use the boost G(a) = G(a+1) * U^(1/a), carried in log space so tiny
    alphas do not underflow to an all-zero draw.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    log_gamma = np.empty_like(alpha)
    small = alpha < 1.0
    large = ~small
    if np.any(large):
        log_gamma[large] = np.log(rng.standard_gamma(alpha[large]))
    if np.any(small):
        boosted = rng.standard_gamma(alpha[small] + 1.0)
        uniforms = rng.uniform(size=int(small.sum()))
        log_gamma[small] = np.log(boosted) + np.log(uniforms) / alpha[small]
    weights = np.exp(log_gamma - log_gamma.max())
    return weights / weights.sum()


def _chunks(indices: np.ndarray, counts: List[int]) -> List[np.ndarray]:
    return np.split(indices, np.cumsum(counts)[:-1])


def _present_classes(dataset: Dataset) -> np.ndarray:
    return np.flatnonzero(dataset.class_counts() > 0)


def _iid(dataset: Dataset, n_clients: int, params: Dict[str, float], rng: np.random.Generator) -> Partition:
    n = len(dataset)
    if n < n_clients:
        raise PartitionError(f"Cannot give {n_clients} clients a sample each from {n} samples")
    sizes = [n // n_clients + (1 if c < n % n_clients else 0) for c in range(n_clients)]
    return Partition(dict(enumerate(_chunks(rng.permutation(n), sizes))))


def _dirichlet_label(dataset: Dataset, n_clients: int, params: Dict[str, float],
                     rng: np.random.Generator) -> Partition:
    alpha = np.full(n_clients, float(params["alpha"]))
    buckets: List[List[np.ndarray]] = [[] for _ in range(n_clients)]
    for label in _present_classes(dataset):
        members = rng.permutation(np.flatnonzero(dataset.labels == label))
        counts = largest_remainder_counts(sample_dirichlet(alpha, rng), members.size)
        for client, chunk in enumerate(_chunks(members, counts)):
            buckets[client].append(chunk)
    return Partition({c: np.concatenate(parts) for c, parts in enumerate(buckets)})


def _class_balanced_order(dataset: Dataset, rng: np.random.Generator) -> np.ndarray:
    """
    All indices, interleaved so every contiguous slice is close to the
    global class mix
    """
    keys, order = [], []
    for label in _present_classes(dataset):
        members = rng.permutation(np.flatnonzero(dataset.labels == label))
        keys.extend((rank + 0.5) / members.size + label * 1e-9 for rank in range(members.size))
        order.extend(members.tolist())
    return np.asarray(order, dtype=np.int64)[np.argsort(keys, kind="stable")]


def _quantity_skew(dataset: Dataset, n_clients: int, params: Dict[str, float],
                   rng: np.random.Generator) -> Partition:
    pool = _class_balanced_order(dataset, rng)
    proportions = sample_dirichlet(np.full(n_clients, float(params["beta"])), rng)
    sizes = largest_remainder_counts(proportions, pool.size)
    return Partition(dict(enumerate(_chunks(pool, sizes))))


def _check_k(dataset: Dataset, params: Dict[str, float]) -> Tuple[int, np.ndarray]:
    k = int(params["k"])
    present = _present_classes(dataset)
    if k > present.size:
        raise PartitionError(f"k={k} exceeds the {present.size} classes present in the data")
    return k, present


def _assign_owned_classes(dataset: Dataset, owners: Dict[int, List[int]], rng: np.random.Generator,
                          shuffle_shards: bool) -> Partition:
    counts = dataset.class_counts()
    assignment: Dict[int, List[np.ndarray]] = {}
    for label, clients in sorted(owners.items()):
        if len(clients) > counts[label]:
            raise PartitionError(
                f"Infeasible spec: class {label} needs {len(clients)} shards but has only {counts[label]} samples"
            )
        members = rng.permutation(np.flatnonzero(dataset.labels == label))
        shards = np.array_split(members, len(clients))
        if shuffle_shards:
            shards = [shards[i] for i in rng.permutation(len(shards))]
        for client, shard in zip(clients, shards):
            assignment.setdefault(client, []).append(shard)
    return Partition({c: np.concatenate(parts) for c, parts in assignment.items()})


def _pathological_label(dataset: Dataset, n_clients: int, params: Dict[str, float],
                        rng: np.random.Generator) -> Partition:
    """
    Label-sorted data cut into n_clients*k shards that never straddle a
    class boundary; client i takes k consecutive slots of a shuffled,
    repeating class sequence, so its k shards carry k distinct labels.
    """
    k, present = _check_k(dataset, params)
    class_sequence = present[rng.permutation(present.size)]
    owners: Dict[int, List[int]] = {}
    for slot in range(n_clients * k):
        owners.setdefault(int(class_sequence[slot % present.size]), []).append(slot // k)
    return _assign_owned_classes(dataset, owners, rng, shuffle_shards=True)


def _label_quantity(dataset: Dataset, n_clients: int, params: Dict[str, float],
                    rng: np.random.Generator) -> Partition:
    """
    Client i owns classes (i*k + j) mod n_classes for j < k; each class is
    split equally among its owners.
    """
    k, present = _check_k(dataset, params)
    owners: Dict[int, List[int]] = {}
    for client in range(n_clients):
        for j in range(k):
            owners.setdefault(int(present[(client * k + j) % present.size]), []).append(client)
    return _assign_owned_classes(dataset, owners, rng, shuffle_shards=False)


def _covariate_shift(dataset: Dataset, n_clients: int, params: Dict[str, float],
                     rng: np.random.Generator) -> Partition:
    base = _iid(dataset, n_clients, params, rng)
    sigma = float(params["sigma"])
    offsets = {c: rng.normal(0.0, sigma, size=dataset.n_features) for c in base.clients()}
    return Partition(base.assignment, feature_offsets=offsets)


_STRATEGIES: Dict[PartitionStrategy, Callable[..., Partition]] = {
    PartitionStrategy.IID: _iid,
    PartitionStrategy.DIRICHLET_LABEL: _dirichlet_label,
    PartitionStrategy.QUANTITY_SKEW: _quantity_skew,
    PartitionStrategy.PATHOLOGICAL_LABEL: _pathological_label,
    PartitionStrategy.LABEL_QUANTITY: _label_quantity,
    PartitionStrategy.COVARIATE_SHIFT: _covariate_shift,
}


def partition(dataset: Dataset, n_clients: int, spec: PartitionSpec) -> Partition:
    """
    Distribute sample indices over `n_clients` clients according to `spec`.

    A draw leaving any client empty is redrawn (same random stream) up to
    MAX_RESAMPLES times before giving up.
    """
    if n_clients < 1:
        raise PartitionError("n_clients must be at least 1")
    try:
        spec.validate(dataset.n_classes)
    except ValueError as e:
        raise PartitionError(str(e)) from None

    strategy = _STRATEGIES[spec.strategy]
    rng = make_rng(spec.seed, "partition")
    validator = PartitionValidator()
    k = int(spec.params["k"]) if spec.strategy in LABEL_COUNT_STRATEGIES else None

    for attempt in range(1, MAX_RESAMPLES + 1):
        result = strategy(dataset, n_clients, spec.params, rng)
        for client in range(n_clients):
            result.assignment.setdefault(client, np.zeros(0, dtype=np.int64))

        empty = validator.validate_non_empty(result)['empty_clients']
        if empty:
            logger.debug(f"{spec.strategy.value} draw {attempt} left clients {empty} empty; resampling")
            continue

        checks = validator.run_all_validations(result, dataset, require_cover=spec.strategy in COVERING_STRATEGIES,
                                             k=k)
        if not checks['all_valid']:
            raise PartitionError(f"{spec.strategy.value} produced an invalid partition: {checks['failed']}")
        logger.info(f"Partitioned {len(dataset)} samples over {n_clients} clients ({spec.strategy.value}); "
                    f"sizes {result.sizes()}")
        return result

    raise PartitionError(
        f"{spec.strategy.value} left a client without data after {MAX_RESAMPLES} draws; "
        f"use fewer clients or a milder skew"
    )
