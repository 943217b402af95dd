"""
FedOpt: the server treats theta_prev - mean_w(theta_c) as a gradient and
feeds it to its own optimizer. Momentum mode with beta=0.9 is FedAvgM;
momentum mode with beta=0 and server_lr=1 is plain FedAvg.
"""

import logging
from typing import List, Literal, Optional, Type

import numpy as np
from pydantic import Field

from algorithms.base import CentralizedFL
from federation.client import Client
from federation.server import Server
from models.experiment_config import ServerParams
from models.model_params import ModelParams

logger = logging.getLogger(__name__)


class FedOptServerParams(ServerParams):
    """Server optimizer settings"""
    mode: Literal["momentum", "adam"] = "adam"
    server_lr: float = Field(0.01, gt=0)
    beta: float = Field(0.9, ge=0, lt=1)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.99, ge=0, lt=1)
    epsilon: float = Field(1e-3, gt=0)


class MomentumServerOptimizer:
    """
    v <- beta*v + delta; theta <- theta - lr*v
    """

    def __init__(self, server_lr: float, beta: float):
        self.server_lr = server_lr
        self.beta = beta
        self.velocity: Optional[ModelParams] = None

    def step(self, params: ModelParams, pseudo_grad: ModelParams) -> ModelParams:
        if self.velocity is None:
            self.velocity = pseudo_grad.zeros_like()
        self.velocity = self.velocity * self.beta + pseudo_grad
        return params - self.velocity * self.server_lr


class AdamServerOptimizer:
    """
    Bias-corrected Adam on the pseudo-gradient
    """

    def __init__(self, server_lr: float, beta1: float, beta2: float, epsilon: float):
        self.server_lr = server_lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.first_moment: Optional[ModelParams] = None
        self.second_moment: Optional[ModelParams] = None
        self.steps = 0

    def step(self, params: ModelParams, pseudo_grad: ModelParams) -> ModelParams:
        if self.first_moment is None:
            self.first_moment = pseudo_grad.zeros_like()
            self.second_moment = pseudo_grad.zeros_like()
        self.steps += 1
        self.first_moment = self.first_moment.zip_map(
            pseudo_grad, lambda m, g: self.beta1 * m + (1.0 - self.beta1) * g)
        self.second_moment = self.second_moment.zip_map(
            pseudo_grad, lambda v, g: self.beta2 * v + (1.0 - self.beta2) * g * g)

        m_correction = 1.0 - self.beta1 ** self.steps
        v_correction = 1.0 - self.beta2 ** self.steps
        update = self.first_moment.zip_map(
            self.second_moment,
            lambda m, v: (m / m_correction) / (np.sqrt(v / v_correction) + self.epsilon),
        )
        return params - update * self.server_lr


class FedOptServer(Server):

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        settings = FedOptServerParams(weighted=self.weighted, **self.hyperparams)
        if settings.mode == "momentum":
            self.server_optimizer = MomentumServerOptimizer(settings.server_lr, settings.beta)
        else:
            self.server_optimizer = AdamServerOptimizer(settings.server_lr, settings.beta1, settings.beta2,
                                                        settings.epsilon)
        logger.debug(f"FedOpt server optimizer: {settings.mode}")

    def aggregate(self, eligible: List[Client], client_models: List[ModelParams]) -> ModelParams:
        averaged = super().aggregate(eligible, client_models)
        return self.server_optimizer.step(self.model, self.model - averaged)


class FedOpt(CentralizedFL):
    name = "fedopt"
    server_params_model = FedOptServerParams

    @classmethod
    def get_server_class(cls) -> Type[Server]:
        return FedOptServer
