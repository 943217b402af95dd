from typing import List, Sequence

import numpy as np

from models.model_params import ModelParams
from services.error_service import AggregationError


def normalize_weights(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise AggregationError("Aggregation needs one weight per model")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise AggregationError("Aggregation weights must be finite and non-negative")
    total = w.sum()
    if total <= 0:
        raise AggregationError("Aggregation weights are all zero")
    return w / total


def weighted_average(models: List[ModelParams], weights: Sequence[float]) -> ModelParams:
    """
    Entrywise sum of w_c * theta_c with weights normalized to sum to one
    """
    if not models:
        raise AggregationError("Nothing to aggregate")
    if len(models) != len(weights):
        raise AggregationError(f"{len(models)} models but {len(weights)} weights")

    reference = models[0]
    for other in models[1:]:
        if not reference.is_compatible(other):
            raise AggregationError(
                f"Incompatible client models: {reference.shapes()} vs {other.shapes()}"
            )

    normalized = normalize_weights(weights)
    result = reference.zeros_like()
    for w, model in zip(normalized, models):
        for name, values in model.items():
            result[name] = result[name] + w * values
    return result
