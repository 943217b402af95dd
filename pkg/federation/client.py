import logging
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from comm.channel import Channel
from models.dataset import Dataset
from models.message import ActorId, PayloadKind
from models.model_params import ModelParams
from models.training_spec import LocalWorkSpec, OptimizerSpec, WorkMode
from nets.architecture import ModelArchitecture
from nets.functional import RegularizerHook, loss_and_grad
from nets.optim import SGDOptimizer
from services.error_service import DataError
from utils import make_rng

logger = logging.getLogger(__name__)


class Client:
    """
    A federation participant holding a private training set.

    The base behavior is plain FedAvg local training: receive the global
    model through the channel, run mini-batch SGD on the local data and
    send the result back. Subclasses change the objective through
    `regularizer`, or the exchange through `receive_model`/`send_model`.
    """

    def __init__(self, index: int, train_data: Dataset, channel: Channel, architecture: ModelArchitecture,
                 local_work: LocalWorkSpec, optimizer: OptimizerSpec, seed: int,
                 test_data: Optional[Dataset] = None, hyperparams: Optional[Dict[str, Any]] = None):
        if len(train_data) == 0:
            raise DataError(f"client {index} has an empty training set")
        self.id = ActorId.client(index)
        self.server_id = ActorId.server()
        self.train_data = train_data
        self.test_data = test_data
        self.channel = channel
        self.architecture = architecture
        self.local_work = local_work
        self.optimizer = optimizer
        self.hyperparams: Dict[str, Any] = dict(hyperparams or {})
        self.rng = make_rng(seed, f"client-batching-{index}")

        self.model: Optional[ModelParams] = None
        self.last_step_count = 0
        self.loss_history: List[float] = []

        # steps mode draws batches from a permutation that carries over between calls
        self._order = np.zeros(0, dtype=np.int64)
        self._cursor = 0

        channel.register(self.id)

    @property
    def index(self) -> int:
        return self.id.index

    @property
    def n_examples(self) -> int:
        return len(self.train_data)

    @property
    def last_loss(self) -> Optional[float]:
        return float(np.mean(self.loss_history)) if self.loss_history else None

    # -- communication ------------------------------------------------------------

    def receive_model(self) -> ModelParams:
        """
        Take the global model out of this client's mailbox
        """
        message = self.channel.receive(self.id, sender=self.server_id, kind=PayloadKind.MODEL)
        return message.payload.copy()

    def send_model(self):
        self.channel.send_payload(PayloadKind.MODEL, self.model, self.id, self.server_id)

    # -- training -------------------------------------------------------------------

    def batches(self) -> Iterator[np.ndarray]:
        """
        Index batches for one call to fit.

        Epochs mode walks a fresh permutation per epoch (last batch may be
        short); steps mode yields full batches, drawing a new permutation
        whenever the current one runs out.
        """
        n = self.n_examples
        batch_size = min(self.local_work.batch_size, n)
        if self.local_work.mode == WorkMode.EPOCHS:
            for _ in range(self.local_work.amount):
                order = self.rng.permutation(n)
                for start in range(0, n, batch_size):
                    yield order[start:start + batch_size]
            return

        for _ in range(self.local_work.amount):
            if self._cursor + batch_size > self._order.size:
                self._order = self.rng.permutation(n)
                self._cursor = 0
            yield self._order[self._cursor:self._cursor + batch_size]
            self._cursor += batch_size

    def regularizer(self, reference: ModelParams) -> Optional[RegularizerHook]:
        """
        Extra loss term for local training, given the model received this round
        """
        return None

    def fit(self, model: ModelParams, optimizer: Optional[SGDOptimizer] = None) -> ModelParams:
        """
        Mini-batch SGD on the local training set starting from `model`.

        A fresh optimizer (zero momentum buffer) is used unless one is
        passed in; callers training one model over several calls pass the
        same optimizer to keep its velocity.
        """
        hook = self.regularizer(model)
        if optimizer is None:
            optimizer = SGDOptimizer(self.optimizer)
        steps_before = optimizer.steps
        params = model.copy()
        self.loss_history = []
        for batch in self.batches():
            loss, grad = loss_and_grad(self.architecture, params, self.train_data.features[batch],
                                       self.train_data.labels[batch], hook)
            params = optimizer.step(params, grad)
            self.loss_history.append(loss)
        self.last_step_count = optimizer.steps - steps_before
        logger.debug(f"{self.id} ran {self.last_step_count} steps, mean loss {self.last_loss:.4f}")
        return params

    def local_training(self):
        """
        One round on the client side: receive, fit, send back
        """
        self.model = self.receive_model()
        self.model = self.fit(self.model)
        self.send_model()

    def finalize(self):
        """
        Hook run once after the last round
        """
        logger.debug(f"{self.id} finalized")
