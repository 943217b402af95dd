import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from evaluation.metrics import metrics
from models.dataset import Dataset
from models.metrics_report import METRIC_FIELDS, EvalScope, MetricsReport
from models.model_params import ModelParams
from nets.architecture import ModelArchitecture
from nets.functional import predict

logger = logging.getLogger(__name__)


class EvalTarget(str, Enum):
    SERVER = "server"
    CLIENTS = "clients"
    BOTH = "both"


@dataclass(frozen=True)
class EvalSchedule:
    """
    Evaluate every `frequency` rounds; the last round is always evaluated
    (by the finalization step, not by the round loop)
    """
    frequency: int = 1

    def __post_init__(self):
        if self.frequency < 1:
            raise ValueError("Evaluation frequency must be at least 1")

    def should_evaluate(self, round_number: int, n_rounds: int) -> bool:
        """
        Whether the round loop evaluates after `round_number`
        """
        return round_number < n_rounds and round_number % self.frequency == 0

    def rounds(self, n_rounds: int) -> List[int]:
        """
        Every round tag that gets a report in a run of `n_rounds` rounds
        """
        tags = [t for t in range(1, n_rounds + 1) if self.should_evaluate(t, n_rounds)]
        return tags + [n_rounds]


class Evaluator:
    """
    Runs predictions on the configured test sets and turns them into
    MetricsReports
    """

    def __init__(self, architecture: ModelArchitecture, server_test: Optional[Dataset] = None,
                 client_tests: Optional[Dict[int, Dataset]] = None, target: EvalTarget = EvalTarget.SERVER,
                 weighted: bool = True):
        self.architecture = architecture
        self.server_test = server_test if server_test is not None and len(server_test) else None
        self.client_tests = {c: d for c, d in sorted((client_tests or {}).items()) if len(d)}
        self.target = EvalTarget(target)
        self.weighted = weighted

    @property
    def evaluates_server(self) -> bool:
        return self.target in (EvalTarget.SERVER, EvalTarget.BOTH) and self.server_test is not None

    @property
    def evaluates_clients(self) -> bool:
        return self.target in (EvalTarget.CLIENTS, EvalTarget.BOTH) and bool(self.client_tests)

    def evaluate_model(self, params: ModelParams, dataset: Dataset, round_number: int,
                       scope: EvalScope = EvalScope.SERVER_GLOBAL) -> MetricsReport:
        y_pred = predict(self.architecture, params, dataset.features)
        values = metrics(dataset.labels, y_pred, dataset.n_classes)
        return MetricsReport(round=round_number, scope=scope, n_samples=len(dataset), **values)

    def _client_mean(self, per_client: List[MetricsReport], round_number: int) -> MetricsReport:
        sizes = np.array([r.n_samples for r in per_client], dtype=np.float64)
        weights = sizes / sizes.sum() if self.weighted else np.full(len(per_client), 1.0 / len(per_client))
        values = {
            name: float(np.clip(sum(w * getattr(r, name) for w, r in zip(weights, per_client)), 0.0, 1.0))
            for name in METRIC_FIELDS
        }
        return MetricsReport(round=round_number, scope=EvalScope.CLIENT_MEAN,
                             n_samples=int(sizes.sum()), **values)

    def evaluate_client_models(self, models: Dict[int, ModelParams], round_number: int) -> Optional[MetricsReport]:
        """
        client_mean report where each client is scored with its own model
        """
        per_client = [
            self.evaluate_model(models[c], test, round_number, EvalScope.CLIENT_MEAN)
            for c, test in self.client_tests.items() if c in models
        ]
        return self._client_mean(per_client, round_number) if per_client else None

    def evaluate_round(self, round_number: int, global_model: ModelParams) -> List[MetricsReport]:
        """
        Reports for the configured scope(s); empty when no test data exists
        """
        reports = []
        if self.evaluates_server:
            reports.append(self.evaluate_model(global_model, self.server_test, round_number))
        if self.evaluates_clients:
            report = self.evaluate_client_models({c: global_model for c in self.client_tests}, round_number)
            if report is not None:
                reports.append(report)

        for report in reports:
            logger.info(f"Round {round_number} [{report.scope.value}] accuracy={report.accuracy:.4f} "
                        f"f1_macro={report.f1_macro:.4f}")
        return reports
