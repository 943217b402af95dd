import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np

from comm.channel import Channel
from evaluation.evaluator import EvalSchedule, Evaluator
from federation.aggregation import weighted_average
from federation.client import Client
from logging_config import create_progress_callback
from models.message import ActorId, PayloadKind
from models.metrics_report import FederationResult
from models.model_params import ModelParams
from services.error_service import NoMessageError, ProtocolError
from utils import make_rng, round_half_up

logger = logging.getLogger(__name__)


class Server:
    """
    Orchestrates synchronous federated rounds.

    Each round: select clients, broadcast the global model, let every
    selected client train, wait for all of their models, aggregate. The
    base behavior is FedAvg with |D_c| aggregation weights.
    """

    def __init__(self, model: ModelParams, clients: List[Client], channel: Channel, eligibility: float = 1.0,
                 seed: int = 0, evaluator: Optional[Evaluator] = None,
                 schedule: Optional[EvalSchedule] = None, weighted: bool = True, max_workers: int = 1,
                 hyperparams: Optional[Dict[str, Any]] = None):
        if not 0 < eligibility <= 1:
            raise ValueError("eligibility must be in (0,1]")
        if max_workers < 1:
            raise ValueError("max_workers must be at least 1")
        self.id = ActorId.server()
        self.model = model.copy()
        self.clients = sorted(clients, key=lambda c: c.index)
        self.channel = channel
        self.eligibility = float(eligibility)
        self.rng = make_rng(seed, "selection")
        self.evaluator = evaluator
        self.schedule = schedule or EvalSchedule()
        self.weighted = weighted
        self.max_workers = max_workers
        self.hyperparams: Dict[str, Any] = dict(hyperparams or {})

        self.round = 0
        self.result = FederationResult()
        self._finalized = False
        channel.register(self.id)

    # -- the federated loop -------------------------------------------------------

    def fit(self, n_rounds: int) -> FederationResult:
        """
        Run `n_rounds` rounds, then finalize
        """
        if n_rounds < 0:
            raise ValueError("n_rounds cannot be negative")
        if not self.clients:
            raise ProtocolError("The server has no clients")

        progress = create_progress_callback(logger)
        for t in range(1, n_rounds + 1):
            self.round = t
            self.channel.begin_round(t)

            eligible = self.select_clients()
            self.result.selections[t] = [c.index for c in eligible]

            self.broadcast_model(eligible)
            self.local_training(eligible)
            client_models = self.receive_client_models(eligible)
            self.model = self.aggregate(eligible, client_models)
            self.result.history.append(self.model.copy())

            losses = [c.last_loss for c in eligible if c.last_loss is not None]
            if losses:
                self.result.train_losses[t] = float(np.mean(losses))
                logger.info(f"Round {t}: clients {self.result.selections[t]}, "
                            f"mean train loss {self.result.train_losses[t]:.4f}")

            if self.schedule.should_evaluate(t, n_rounds):
                self.evaluate_round(t)
            progress(t, n_rounds, f"round {t} complete")

        self.finalize()
        self.result.traffic = self.channel.traffic_report()
        self.result.final_model = self.model.copy()
        return self.result

    def select_clients(self) -> List[Client]:
        """
        Uniform sample without replacement of max(1, round(rate*|C|)) clients,
        returned in ascending client index order
        """
        n = len(self.clients)
        k = min(n, max(1, round_half_up(self.eligibility * n)))
        chosen = np.sort(self.rng.choice(n, size=k, replace=False))
        return [self.clients[i] for i in chosen]

    def broadcast_model(self, eligible: List[Client]):
        self.channel.broadcast(PayloadKind.MODEL, self.model, self.id, [c.id for c in eligible])

    def local_training(self, eligible: List[Client]):
        """
        Trigger local training on every selected client and return once all
        are done
        """
        if self.max_workers > 1 and len(eligible) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                # list() re-raises the first client failure
                list(pool.map(lambda client: client.local_training(), eligible))
        else:
            for client in eligible:
                client.local_training()

    def _receive(self, client: Client, kind: PayloadKind) -> ModelParams:
        try:
            return self.channel.receive(self.id, sender=client.id, kind=kind).payload
        except NoMessageError:
            raise ProtocolError(
                f"{client.id} returned no {kind.value} message in round {self.round}"
            ) from None

    def receive_client_models(self, eligible: List[Client]) -> List[ModelParams]:
        return [self._receive(client, PayloadKind.MODEL) for client in eligible]

    def get_client_weights(self, eligible: List[Client]) -> List[float]:
        if self.weighted:
            return [float(c.n_examples) for c in eligible]
        return [1.0] * len(eligible)

    def aggregate(self, eligible: List[Client], client_models: List[ModelParams]) -> ModelParams:
        """
        Weighted average of the client models
        """
        return weighted_average(client_models, self.get_client_weights(eligible))

    # -- evaluation and shutdown ----------------------------------------------------

    def evaluate_round(self, round_number: int):
        if self.evaluator is None:
            return
        self.result.reports.extend(self.evaluator.evaluate_round(round_number, self.model))

    def finalize(self):
        """
        Finalize every client, then evaluate the global model one last time
        (tagged with the last round)
        """
        if self._finalized:
            raise ProtocolError("finalize was already called for this run")
        self._finalized = True
        for client in self.clients:
            client.finalize()
        self.evaluate_round(self.round)
        logger.info(f"Federation finished after {self.round} rounds")
