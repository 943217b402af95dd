from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Tuple

import numpy as np

from services.error_service import IncompatibleParamsError


@dataclass
class ModelParams:
    """
    Ordered, named collection of float64 tensors.

    The unit of exchange between server and clients and of aggregation.
    Gradients, control variates and optimizer moments use the same type.
    """
    entries: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)

    def __post_init__(self):
        if not isinstance(self.entries, OrderedDict):
            self.entries = OrderedDict(self.entries)
        for name, values in self.entries.items():
            self.entries[name] = np.asarray(values, dtype=np.float64)

    # -- mapping protocol -------------------------------------------------

    def __getitem__(self, name: str) -> np.ndarray:
        return self.entries[name]

    def __setitem__(self, name: str, values: np.ndarray):
        self.entries[name] = np.asarray(values, dtype=np.float64)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def names(self) -> List[str]:
        return list(self.entries.keys())

    def shapes(self) -> List[Tuple[int, ...]]:
        return [tuple(v.shape) for v in self.entries.values()]

    def num_elements(self) -> int:
        """
        Total number of scalar values across all tensors
        """
        return int(sum(v.size for v in self.entries.values()))

    # -- structure ----------------------------------------------------------

    def is_compatible(self, other: "ModelParams") -> bool:
        """
        True iff names, order and shapes match exactly
        """
        return self.names() == other.names() and self.shapes() == other.shapes()

    def check_compatible(self, other: "ModelParams"):
        if not self.is_compatible(other):
            raise IncompatibleParamsError(
                f"incompatible parameter sets: {list(zip(self.names(), self.shapes()))} "
                f"vs {list(zip(other.names(), other.shapes()))}"
            )

    def copy(self) -> "ModelParams":
        return ModelParams(OrderedDict((k, np.array(v, dtype=np.float64, copy=True)) for k, v in self.entries.items()))

    def frozen_copy(self) -> "ModelParams":
        """
        Deep copy whose arrays are read-only
        """
        frozen = self.copy()
        for values in frozen.entries.values():
            values.setflags(write=False)
        return frozen

    def zeros_like(self) -> "ModelParams":
        return ModelParams(OrderedDict((k, np.zeros_like(v)) for k, v in self.entries.items()))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ModelParams":
        return ModelParams(OrderedDict((k, fn(v)) for k, v in self.entries.items()))

    def zip_map(self, other: "ModelParams", fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "ModelParams":
        self.check_compatible(other)
        return ModelParams(OrderedDict((k, fn(v, other[k])) for k, v in self.entries.items()))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "ModelParams") -> "ModelParams":
        return self.zip_map(other, lambda a, b: a + b)

    def __sub__(self, other: "ModelParams") -> "ModelParams":
        return self.zip_map(other, lambda a, b: a - b)

    def __mul__(self, scalar: float) -> "ModelParams":
        return self.map(lambda a: a * float(scalar))

    __rmul__ = __mul__

    def dot(self, other: "ModelParams") -> float:
        self.check_compatible(other)
        return float(sum(np.sum(v * other[k]) for k, v in self.entries.items()))

    def squared_norm(self) -> float:
        return self.dot(self)

    def to_vector(self) -> np.ndarray:
        if not self.entries:
            return np.zeros(0)
        return np.concatenate([v.ravel() for v in self.entries.values()])

    def allclose(self, other: "ModelParams", atol: float = 1e-12) -> bool:
        if not self.is_compatible(other):
            return False
        return all(np.allclose(v, other[k], rtol=0.0, atol=atol) for k, v in self.entries.items())

    def max_abs_diff(self, other: "ModelParams") -> float:
        self.check_compatible(other)
        if not self.entries:
            return 0.0
        return float(max(np.max(np.abs(v - other[k])) if v.size else 0.0 for k, v in self.entries.items()))


Gradient = ModelParams
