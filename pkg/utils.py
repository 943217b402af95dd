from typing import List, Sequence
import hashlib
import math

import numpy as np


def derive_seed(seed: int, stream: str) -> int:
    """
    Derive a stable 64-bit seed for a named random stream.

    Streams are independent of each other, so drawing more from one (e.g.
    more rounds of client selection) never shifts another (e.g. data shuffles).
    """
    digest = hashlib.sha256(f"{int(seed)}:{stream}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int, stream: str) -> np.random.Generator:
    """
    Create a numpy Generator for a named stream of the global seed
    """
    return np.random.default_rng(derive_seed(seed, stream))


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from zero for positives"""
    return int(math.floor(value + 0.5))


def largest_remainder_counts(proportions: Sequence[float], total: int) -> List[int]:
    """
    Turn proportions into integer counts summing to `total`.

    Counts are floored, then the remainder is handed out one by one by
    largest fractional part; ties go to the lower index.
    """
    props = np.asarray(proportions, dtype=np.float64)
    if props.sum() <= 0:
        raise ValueError("proportions must have a positive sum")
    props = props / props.sum()
    raw = props * total
    counts = np.floor(raw).astype(np.int64)
    remainder = int(total - counts.sum())
    if remainder > 0:
        fractions = raw - counts
        # stable sort on the negated fraction keeps lower indices first on ties
        order = np.argsort(-fractions, kind="stable")
        for idx in order[:remainder]:
            counts[idx] += 1
    return [int(c) for c in counts]
