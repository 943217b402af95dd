"""
Experiment runner: builds the data, the model and the algorithm from the
two configuration documents and runs one of the three experiment types.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from algorithms.base import AlgorithmDescriptor
from algorithms.registry import AlgorithmRegistry, registry as default_registry
from comm.channel import Channel
from data.csv_io import load_csv
from data.generators import generate_blobs
from data.partitioners import partition
from data.splitting import iid_slices, train_test_split
from data.stats import partition_stats
from evaluation.evaluator import EvalSchedule, EvalTarget, Evaluator
from federation.client import Client
from logging_config import create_progress_callback
from models.dataset import Dataset, Partition
from models.experiment_config import AlgorithmConfig, BlobsDataset, ClientParams, ExperimentConfig, ServerParams
from models.metrics_report import FederationResult
from models.training_spec import LocalWorkSpec, WorkMode
from nets.architecture import ModelArchitecture
from nets.functional import init_params
from nets.optim import SGDOptimizer
from validators.config_validator import bind_params

logger = logging.getLogger(__name__)


class ExperimentType(str, Enum):
    FEDERATION = "federation"
    CENTRALIZED = "centralized"
    CLIENTS_ONLY = "clients-only"


@dataclass
class ExperimentData:
    """
    Train/test split plus the per-client views of it
    """
    train: Dataset
    test: Dataset
    partition: Optional[Partition] = None
    client_train: Dict[int, Dataset] = field(default_factory=dict)
    client_test: Dict[int, Dataset] = field(default_factory=dict)


def clients_only_units(n_rounds: int, eligibility: float, work: LocalWorkSpec) -> int:
    """
    Training units for a clients-only run: ceil(n_rounds * eligibility * E)
    epochs, or ceil(n_rounds * eligibility) units of the per-round steps
    """
    expected = n_rounds * eligibility * (work.amount if work.mode == WorkMode.EPOCHS else 1)
    # 9 decimals absorb float noise such as 100 * 0.07 = 7.000000000000001
    return max(1, math.ceil(round(expected, 9)))


class ExperimentService:
    """
    Service for running one experiment described by an experiment and an
    algorithm document
    """

    def __init__(self, experiment: ExperimentConfig, algorithm: AlgorithmConfig, plugins_dir: Optional[str] = None,
                 registry: Optional[AlgorithmRegistry] = None):
        """
        Resolve the algorithm and validate its hyper-parameters
        """
        self.experiment = experiment
        self.algorithm = algorithm
        self.descriptor: AlgorithmDescriptor = (registry or default_registry).resolve(algorithm.name, plugins_dir)
        self.client_params: ClientParams = bind_params(algorithm, "client", self.descriptor.client_params_model)
        self.server_params: ServerParams = bind_params(algorithm, "server", self.descriptor.server_params_model)

        if experiment.device:
            logger.info(f"device '{experiment.device}' ignored: the simulator runs on the CPU")

    # -- data -----------------------------------------------------------------------

    def load_dataset(self) -> Dataset:
        source = self.experiment.dataset
        if isinstance(source, BlobsDataset):
            p = source.params
            return generate_blobs(p.n_samples, p.n_features, p.n_classes, p.separation, self.experiment.seed)
        return load_csv(source.params.path, source.params.label_column)

    def prepare_data(self, partitioned: bool = True) -> ExperimentData:
        """
        Split into train/test, then (optionally) partition the training set
        and cut IID client slices out of the test set
        """
        exp = self.experiment
        train, test = train_test_split(self.load_dataset(), exp.split.test_fraction, exp.split.stratified, exp.seed)
        data = ExperimentData(train=train, test=test)
        if partitioned:
            data.partition = partition(train, exp.n_clients, exp.partition_spec())
            data.client_train = {c: data.partition.client_dataset(train, c) for c in data.partition.clients()}
            report = partition_stats(train, data.partition)
            logger.info(f"Client sizes {report.sizes}, mean pairwise label TV {report.mean_pairwise_tv:.3f}")
        data.client_test = iid_slices(test, exp.n_clients, exp.seed)
        return data

    def architecture(self, data: ExperimentData) -> ModelArchitecture:
        return self.algorithm.model.build(data.train.n_features, data.train.n_classes)

    def evaluator(self, data: ExperimentData, architecture: ModelArchitecture,
                  target: Optional[EvalTarget] = None) -> Evaluator:
        return Evaluator(architecture, server_test=data.test, client_tests=data.client_test,
                         target=target or self.experiment.eval.scope, weighted=self.experiment.eval.weighted)

    # -- experiment types -------------------------------------------------------------

    def run(self, experiment_type: ExperimentType) -> FederationResult:
        runners = {
            ExperimentType.FEDERATION: self.run_federation,
            ExperimentType.CENTRALIZED: self.run_centralized,
            ExperimentType.CLIENTS_ONLY: self.run_clients_only,
        }
        return runners[ExperimentType(experiment_type)]()

    def run_federation(self) -> FederationResult:
        """
        Partition, build the algorithm's federation and run n_rounds rounds
        """
        exp = self.experiment
        data = self.prepare_data()
        architecture = self.architecture(data)
        federation = self.descriptor.build(
            architecture, data.client_train, client_params=self.client_params, server_params=self.server_params,
            eligibility=exp.eligibility, seed=exp.seed, evaluator=self.evaluator(data, architecture),
            schedule=EvalSchedule(exp.eval.frequency), max_workers=exp.max_workers,
            client_test_data=data.client_test,
        )
        return federation.run(exp.n_rounds)

    def _train_alone(self, clients: Dict[int, Client], n_units: int, evaluate) -> FederationResult:
        """
        Train each client on its own data for `n_units` calls to fit,
        evaluating per the schedule. No channel traffic is generated.

        Each client keeps one optimizer for the whole run, so momentum
        carries across units as in one uninterrupted training run.
        """
        schedule = EvalSchedule(self.experiment.eval.frequency)
        initial = init_params(next(iter(clients.values())).architecture, self.experiment.seed)
        models = {c: initial.copy() for c in clients}
        optimizers = {c: SGDOptimizer(client.optimizer) for c, client in clients.items()}
        result = FederationResult()
        progress = create_progress_callback(logger)

        for unit in range(1, n_units + 1):
            for c, client in clients.items():
                models[c] = client.fit(models[c], optimizers[c])
            result.train_losses[unit] = sum(client.last_loss for client in clients.values()) / len(clients)
            if len(models) == 1:
                result.history.append(next(iter(models.values())).copy())
            if schedule.should_evaluate(unit, n_units):
                result.reports.extend(evaluate(unit, models))
            progress(unit, n_units, f"unit {unit} complete")

        for client in clients.values():
            client.finalize()
        result.reports.extend(evaluate(n_units, models))
        if len(models) == 1:
            result.final_model = next(iter(models.values())).copy()
        return result

    def _unit_work(self) -> LocalWorkSpec:
        work = self.client_params.local_work()
        return work.with_amount(1) if work.mode == WorkMode.EPOCHS else work

    def run_centralized(self) -> FederationResult:
        """
        One model on the whole training set. The budget is n_rounds times the
        per-round client work: n_rounds*E epoch units, or n_rounds units of
        the per-round step count.
        """
        exp = self.experiment
        if exp.distribution is not None:
            logger.warning("The distribution section is ignored by centralized runs")

        data = self.prepare_data(partitioned=False)
        architecture = self.architecture(data)
        work = self.client_params.local_work()
        n_units = exp.n_rounds * work.amount if work.mode == WorkMode.EPOCHS else exp.n_rounds

        client = Client(0, data.train, Channel(), architecture, self._unit_work(),
                        self.client_params.optimizer.to_spec(), exp.seed, test_data=data.test)
        evaluator = self.evaluator(data, architecture)
        logger.info(f"Centralized training for {n_units} units of {self._unit_work().amount} {work.mode.value}")
        return self._train_alone({0: client}, n_units,
                                 lambda unit, models: evaluator.evaluate_round(unit, models[0]))

    def run_clients_only(self) -> FederationResult:
        """
        Every client trains alone for the number of rounds it would expect
        to take part in: ceil(n_rounds * eligibility) rounds' worth of work
        """
        exp = self.experiment
        data = self.prepare_data()
        architecture = self.architecture(data)
        n_units = clients_only_units(exp.n_rounds, exp.eligibility, self.client_params.local_work())

        channel = Channel()
        clients = {
            c: Client(c, train, channel, architecture, self._unit_work(), self.client_params.optimizer.to_spec(),
                      exp.seed, test_data=data.client_test.get(c))
            for c, train in data.client_train.items()
        }
        evaluator = self.evaluator(data, architecture, target=EvalTarget.CLIENTS)
        logger.info(f"Clients-only training: {len(clients)} clients, {n_units} units each")

        def evaluate(unit, models):
            report = evaluator.evaluate_client_models(models, unit)
            return [report] if report is not None else []

        result = self._train_alone(clients, n_units, evaluate)
        result.traffic = channel.traffic_report()
        return result
