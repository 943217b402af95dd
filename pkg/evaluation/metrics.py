"""
Single-label multiclass classification metrics.

Per-class precision and recall with a zero denominator count as 0, so a
class absent from both labels and predictions drags macro averages down.
F1 is computed from counts (2tp / (2tp + fp + fn)), which makes micro F1
exactly equal to accuracy.
"""

from typing import Dict

import numpy as np

from models.metrics_report import METRIC_FIELDS


def _check_labels(y_true, y_pred, n_classes: int):
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.ndim != 1 or y_pred.ndim != 1:
        raise ValueError("Label vectors must be 1-d")
    if y_true.shape != y_pred.shape:
        raise ValueError(f"Length mismatch: {y_true.size} true labels, {y_pred.size} predictions")
    if y_true.size == 0:
        raise ValueError("Cannot compute metrics on empty label vectors")
    if n_classes < 1:
        raise ValueError("n_classes must be positive")
    for name, labels in (("y_true", y_true), ("y_pred", y_pred)):
        if labels.min() < 0 or labels.max() >= n_classes:
            raise ValueError(f"{name} contains labels outside [0, {n_classes})")
    return y_true, y_pred


def confusion_counts(y_true, y_pred, n_classes: int) -> Dict[str, np.ndarray]:
    """
    One-vs-rest counts per class: arrays 'tp', 'fp', 'fn' of length n_classes
    """
    y_true, y_pred = _check_labels(y_true, y_pred, n_classes)
    hits = y_true == y_pred
    tp = np.bincount(y_true[hits], minlength=n_classes)
    predicted = np.bincount(y_pred, minlength=n_classes)
    actual = np.bincount(y_true, minlength=n_classes)
    return {"tp": tp, "fp": predicted - tp, "fn": actual - tp}


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def metrics(y_true, y_pred, n_classes: int) -> Dict[str, float]:
    """
    Accuracy plus micro/macro precision, recall and F1
    """
    counts = confusion_counts(y_true, y_pred, n_classes)
    tp, fp, fn = counts["tp"], counts["fp"], counts["fn"]

    tp_all, fp_all, fn_all = tp.sum(), fp.sum(), fn.sum()
    n = int(np.asarray(y_true).size)

    values = {
        "accuracy": float(tp_all / n),
        "precision_micro": float(_safe_ratio(tp_all, tp_all + fp_all)),
        "precision_macro": float(_safe_ratio(tp, tp + fp).mean()),
        "recall_micro": float(_safe_ratio(tp_all, tp_all + fn_all)),
        "recall_macro": float(_safe_ratio(tp, tp + fn).mean()),
        "f1_micro": float(_safe_ratio(2 * tp_all, 2 * tp_all + fp_all + fn_all)),
        "f1_macro": float(_safe_ratio(2 * tp, 2 * tp + fp + fn).mean()),
    }
    return {name: values[name] for name in METRIC_FIELDS}
