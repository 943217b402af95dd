from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence


class ModelKind(str, Enum):
    LINEAR = "linear"
    MLP = "mlp"


class Activation(str, Enum):
    RELU = "relu"
    TANH = "tanh"


@dataclass(frozen=True)
class ModelArchitecture:
    """
    Shape of a classifier: layer sizes from input to output (= n_classes)
    """
    kind: ModelKind
    layer_sizes: tuple = field(default_factory=tuple)
    activation: Activation = Activation.RELU

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "activation", Activation(self.activation))
        object.__setattr__(self, "layer_sizes", tuple(int(s) for s in self.layer_sizes))
        self.validate()

    @classmethod
    def linear(cls, n_features: int, n_classes: int) -> "ModelArchitecture":
        return cls(ModelKind.LINEAR, (n_features, n_classes))

    @classmethod
    def mlp(cls, n_features: int, hidden: Sequence[int], n_classes: int,
            activation: Activation = Activation.RELU) -> "ModelArchitecture":
        return cls(ModelKind.MLP, (n_features, *hidden, n_classes), activation)

    def validate(self) -> bool:
        if len(self.layer_sizes) < 2:
            raise ValueError("An architecture needs at least input and output sizes")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("Layer sizes must be positive")
        if self.kind == ModelKind.LINEAR and len(self.layer_sizes) != 2:
            raise ValueError("A linear model has exactly input and output sizes")
        if self.kind == ModelKind.MLP and len(self.layer_sizes) < 3:
            raise ValueError("An MLP needs at least one hidden layer")
        return True

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    @property
    def n_features(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_classes(self) -> int:
        return self.layer_sizes[-1]

    def param_names(self) -> List[str]:
        names = []
        for layer in range(self.n_layers):
            names.extend([f"layers.{layer}.weight", f"layers.{layer}.bias"])
        return names

    def num_params(self) -> int:
        return sum(fan_out * fan_in + fan_out for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]))
