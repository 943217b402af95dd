"""
Algorithm entry point: a CentralizedFL subclass picks the client and server
classes (and their hyper-parameter schemas) and wires a federation together.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Type

from comm.channel import Channel
from evaluation.evaluator import EvalSchedule, Evaluator
from federation.client import Client
from federation.server import Server
from models.dataset import Dataset
from models.experiment_config import ClientParams, ServerParams
from models.metrics_report import FederationResult
from nets.architecture import ModelArchitecture
from nets.functional import init_params

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlgorithmDescriptor:
    """
    Registry entry for one algorithm
    """
    name: str
    fl_class: Type["CentralizedFL"]

    @property
    def client_params_model(self) -> Type[ClientParams]:
        return self.fl_class.client_params_model

    @property
    def server_params_model(self) -> Type[ServerParams]:
        return self.fl_class.server_params_model

    def hyperparams(self) -> Dict[str, Dict[str, Any]]:
        """
        Default server and client hyper-parameters
        """
        return {
            "server": self.server_params_model().model_dump(mode="json"),
            "client": self.client_params_model().model_dump(mode="json"),
        }

    def build(self, *args, **kwargs) -> "CentralizedFL":
        return self.fl_class(*args, **kwargs)


class CentralizedFL:
    """
    A centralized federation: one server, a set of clients and the channel
    between them. The base class runs FedAvg.

    Subclasses override get_client_class/get_server_class and, when they
    add hyper-parameters, the two params models.
    """

    name = "fedavg"
    client_params_model: Type[ClientParams] = ClientParams
    server_params_model: Type[ServerParams] = ServerParams

    def __init__(self, architecture: ModelArchitecture, client_data: Dict[int, Dataset],
                 client_params: Optional[ClientParams] = None, server_params: Optional[ServerParams] = None,
                 eligibility: float = 1.0, seed: int = 0, evaluator: Optional[Evaluator] = None,
                 schedule: Optional[EvalSchedule] = None, max_workers: int = 1,
                 client_test_data: Optional[Dict[int, Dataset]] = None):
        if not client_data:
            raise ValueError("A federation needs at least one client")
        self.architecture = architecture
        self.client_params = client_params or self.client_params_model()
        self.server_params = server_params or self.server_params_model()
        self.seed = seed
        self.channel = Channel()
        self.clients = self.init_clients(client_data, client_test_data or {})
        self.server = self.init_server(eligibility, evaluator, schedule, max_workers)
        logger.info(f"{self.name}: {len(self.clients)} clients, model {architecture.layer_sizes} "
                    f"({architecture.num_params()} parameters)")

    @classmethod
    def get_client_class(cls) -> Type[Client]:
        return Client

    @classmethod
    def get_server_class(cls) -> Type[Server]:
        return Server

    def init_clients(self, client_data: Dict[int, Dataset], client_test_data: Dict[int, Dataset]) -> List[Client]:
        client_class = self.get_client_class()
        return [
            client_class(index=index, train_data=data, channel=self.channel, architecture=self.architecture,
                         local_work=self.client_params.local_work(),
                         optimizer=self.client_params.optimizer.to_spec(), seed=self.seed,
                         test_data=client_test_data.get(index), hyperparams=self.client_params.hyperparams())
            for index, data in sorted(client_data.items())
        ]

    def init_server(self, eligibility: float, evaluator: Optional[Evaluator], schedule: Optional[EvalSchedule],
                    max_workers: int) -> Server:
        server_class = self.get_server_class()
        return server_class(model=init_params(self.architecture, self.seed), clients=self.clients,
                            channel=self.channel, eligibility=eligibility, seed=self.seed, evaluator=evaluator,
                            schedule=schedule, weighted=self.server_params.weighted, max_workers=max_workers,
                            hyperparams=self.server_params.hyperparams())

    def run(self, n_rounds: int) -> FederationResult:
        """
        Run the federation for `n_rounds` rounds
        """
        return self.server.fit(n_rounds)

    @classmethod
    def descriptor(cls, name: Optional[str] = None) -> AlgorithmDescriptor:
        return AlgorithmDescriptor(name=name or cls.name, fl_class=cls)
