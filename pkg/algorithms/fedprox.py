from typing import Optional, Type

from pydantic import Field

from algorithms.base import CentralizedFL
from federation.client import Client
from models.experiment_config import ClientParams
from models.model_params import ModelParams
from nets.functional import RegularizerHook
from nets.regularizers import ProximalTerm


class FedProxClientParams(ClientParams):
    """Client hyper-parameters plus the proximal coefficient"""
    mu: float = Field(0.01, ge=0)


class FedProxClient(Client):
    """
    Local objective = loss + (mu/2) * ||theta - theta_global||^2
    """

    def regularizer(self, reference: ModelParams) -> Optional[RegularizerHook]:
        return ProximalTerm(reference, float(self.hyperparams.get("mu", 0.0)))


class FedProx(CentralizedFL):
    name = "fedprox"
    client_params_model = FedProxClientParams

    @classmethod
    def get_client_class(cls) -> Type[Client]:
        return FedProxClient
