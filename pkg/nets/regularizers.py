from typing import Tuple

from models.model_params import Gradient, ModelParams


class ProximalTerm:
    """
    (mu/2) * ||theta - reference||^2, gradient mu * (theta - reference)
    """

    def __init__(self, reference: ModelParams, mu: float):
        if mu < 0:
            raise ValueError("Proximal coefficient mu cannot be negative")
        self.reference = reference.copy()
        self.mu = float(mu)

    def __call__(self, params: ModelParams) -> Tuple[float, Gradient]:
        diff = params - self.reference
        return 0.5 * self.mu * diff.squared_norm(), diff * self.mu


class LinearCorrection:
    """
    <correction, theta>, gradient = correction.

    Shifts every local gradient by a constant tensor set (control variate
    correction c - c_i).
    """

    def __init__(self, correction: ModelParams):
        self.correction = correction.copy()

    def __call__(self, params: ModelParams) -> Tuple[float, Gradient]:
        return self.correction.dot(params), self.correction.copy()
