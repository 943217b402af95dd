import csv
import io
import logging
import math
import os
from typing import List, Optional

import numpy as np

from models.dataset import Dataset
from services.error_service import DataError

logger = logging.getLogger(__name__)


def _parse_float(cell: str, path: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"{path}:{line}: non-numeric value {cell!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}:{line}: non-finite value {cell!r} in column {column!r}")
    return value


def _read_text(path: str) -> str:
    with open(path, "rb") as handle:
        raw = handle.read()
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = raw[:e.start].count(b"\n") + 1
        raise DataError(f"{path}:{line}: invalid UTF-8") from None


def _parse_label(cell: str, path: str, line: int, column: str) -> int:
    value = _parse_float(cell, path, line, column)
    if not float(value).is_integer():
        raise DataError(f"{path}:{line}: label {cell!r} in column {column!r} is not an integer")
    return int(value)


def load_csv(path: str, label_column: str) -> Dataset:
    """
    Load a comma-separated file with a header row.

    Labels are re-indexed to a dense [0, n_classes) range that keeps the
    sort order of the original label values.
    """
    if not os.path.isfile(path):
        raise DataError(f"{path}: file not found")

    with io.StringIO(_read_text(path), newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file (no header row)")
        header = [name.strip() for name in header]
        if label_column not in header:
            raise DataError(f"{path}:1: label column {label_column!r} not in header {header}")
        label_pos = header.index(label_column)
        feature_names = [name for i, name in enumerate(header) if i != label_pos]

        rows: List[List[float]] = []
        raw_labels: List[int] = []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line}: expected {len(header)} cells, found {len(row)}")
            raw_labels.append(_parse_label(row[label_pos].strip(), path, line, label_column))
            rows.append([
                _parse_float(cell.strip(), path, line, header[i]) for i, cell in enumerate(row) if i != label_pos
            ])

    if not rows:
        raise DataError(f"{path}: empty dataset (header only)")

    label_values = np.asarray(raw_labels, dtype=np.int64)
    distinct = np.unique(label_values)
    labels = np.searchsorted(distinct, label_values)
    features = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(feature_names))

    dataset = Dataset(features, labels, int(distinct.size))
    dataset.validate()
    logger.info(f"Loaded {len(dataset)} samples with {dataset.n_features} features and {dataset.n_classes} classes from {path}")
    return dataset


def save_csv(dataset: Dataset, path: str, label_column: str = "label",
             feature_names: Optional[List[str]] = None):
    """
    Write a dataset in the format load_csv reads
    """
    names = feature_names or [f"x{i}" for i in range(dataset.n_features)]
    if len(names) != dataset.n_features:
        raise ValueError("One feature name per column is required")

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([*names, label_column])
        for features, label in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in features] + [int(label)])
