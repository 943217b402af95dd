"""
SCAFFOLD: control variates correct client drift.

The client steps with g - c_i + c (a linear correction term added to the
local objective) and updates its control variate with the cheap rule

    c_i <- c_i - c + (theta_global - theta_c) / (K * lr)

where K is the number of local steps just taken. The server receives both
the model and the control delta of every participant and applies

    theta <- theta + global_lr * mean_w(theta_c - theta)
    c     <- c + (|E| / |C|) * mean(delta c_i)

Model deltas use the usual aggregation weights; control deltas are
averaged uniformly.
"""

import logging
from typing import Dict, List, Optional, Type

from pydantic import Field

from algorithms.base import CentralizedFL
from federation.aggregation import weighted_average
from federation.client import Client
from federation.server import Server
from models.experiment_config import ServerParams
from models.message import PayloadKind
from models.model_params import ModelParams
from nets.functional import RegularizerHook
from nets.regularizers import LinearCorrection

logger = logging.getLogger(__name__)


class ScaffoldServerParams(ServerParams):
    """Server hyper-parameters plus the global step size"""
    global_lr: float = Field(1.0, gt=0)


class ScaffoldClient(Client):

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.control: Optional[ModelParams] = None
        self.server_control: Optional[ModelParams] = None
        self.control_delta: Optional[ModelParams] = None

    def receive_model(self) -> ModelParams:
        model = super().receive_model()
        message = self.channel.receive(self.id, sender=self.server_id, kind=PayloadKind.CONTROL)
        self.server_control = message.payload.copy()
        if self.control is None:
            self.control = model.zeros_like()
        return model

    def regularizer(self, reference: ModelParams) -> Optional[RegularizerHook]:
        return LinearCorrection(self.server_control - self.control)

    def local_training(self):
        global_model = self.receive_model()
        self.model = self.fit(global_model)

        scale = self.last_step_count * self.optimizer.learning_rate
        if scale <= 0:
            raise ValueError("SCAFFOLD needs local steps * learning rate > 0 to update control variates")
        updated = self.control - self.server_control + (global_model - self.model) * (1.0 / scale)
        self.control_delta = updated - self.control
        self.control = updated

        self.send_model()

    def send_model(self):
        super().send_model()
        self.channel.send_payload(PayloadKind.CONTROL, self.control_delta, self.id, self.server_id)


class ScaffoldServer(Server):

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.control = self.model.zeros_like()
        # round -> control deltas received that round, in client index order
        self.control_deltas: Dict[int, List[ModelParams]] = {}
        self._round_deltas: List[ModelParams] = []

    @property
    def global_lr(self) -> float:
        return float(self.hyperparams.get("global_lr", 1.0))

    def broadcast_model(self, eligible: List[Client]):
        super().broadcast_model(eligible)
        self.channel.broadcast(PayloadKind.CONTROL, self.control, self.id, [c.id for c in eligible])

    def receive_client_models(self, eligible: List[Client]) -> List[ModelParams]:
        models = super().receive_client_models(eligible)
        self._round_deltas = [self._receive(client, PayloadKind.CONTROL) for client in eligible]
        return models

    def aggregate(self, eligible: List[Client], client_models: List[ModelParams]) -> ModelParams:
        model_delta = weighted_average([m - self.model for m in client_models], self.get_client_weights(eligible))
        control_delta = weighted_average(self._round_deltas, [1.0] * len(self._round_deltas))

        self.control = self.control + control_delta * (len(eligible) / len(self.clients))
        self.control_deltas[self.round] = [d.copy() for d in self._round_deltas]
        logger.debug(f"Round {self.round}: server control norm^2 {self.control.squared_norm():.6f}")

        return self.model + model_delta * self.global_lr


class Scaffold(CentralizedFL):
    name = "scaffold"
    server_params_model = ScaffoldServerParams

    @classmethod
    def get_client_class(cls) -> Type[Client]:
        return ScaffoldClient

    @classmethod
    def get_server_class(cls) -> Type[Server]:
        return ScaffoldServer
