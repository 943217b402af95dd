"""
Schemas of the two configuration documents: the experiment (data,
federation size, rounds, evaluation, logging) and the algorithm (model,
server and client hyper-parameters).
"""

from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from evaluation.evaluator import EvalTarget
from models.dataset import PartitionSpec, PartitionStrategy
from models.training_spec import LocalWorkSpec, OptimizerSpec, WorkMode
from nets.architecture import Activation, ModelArchitecture, ModelKind


class StrictModel(BaseModel):
    """Base for config sections: unknown keys are rejected"""
    model_config = ConfigDict(extra="forbid")


# -- experiment document ------------------------------------------------------------

class BlobsParams(StrictModel):
    """Synthetic Gaussian blobs"""
    n_samples: int = Field(2000, ge=1)
    n_features: int = Field(20, ge=1)
    n_classes: int = Field(2, ge=1)
    separation: float = Field(6.0, ge=0)


class BlobsDataset(StrictModel):
    source: Literal["blobs"]
    params: BlobsParams = Field(default_factory=BlobsParams)


class CsvParams(StrictModel):
    """A CSV file with a header row; relative paths resolve against the config file"""
    path: str
    label_column: str = "label"


class CsvDataset(StrictModel):
    source: Literal["csv"]
    params: CsvParams


DatasetConfig = Annotated[Union[BlobsDataset, CsvDataset], Field(discriminator="source")]


class DistributionConfig(StrictModel):
    """How the training set is spread over clients"""
    strategy: PartitionStrategy = PartitionStrategy.IID
    params: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_params(self):
        self.to_spec(0).validate()
        return self

    def to_spec(self, seed: int) -> PartitionSpec:
        return PartitionSpec(strategy=self.strategy, params=dict(self.params), seed=seed)


class SplitConfig(StrictModel):
    test_fraction: float = Field(0.2, gt=0, lt=1)
    stratified: bool = True


class EvalConfig(StrictModel):
    frequency: int = Field(1, ge=1)
    scope: EvalTarget = EvalTarget.SERVER
    weighted: bool = True


class LogFormat(str, Enum):
    STDOUT = "stdout"
    CSV = "csv"
    JSON = "json"


class LoggerConfig(StrictModel):
    format: LogFormat = LogFormat.STDOUT
    path: Optional[str] = None

    @model_validator(mode="after")
    def check_path(self):
        if self.format != LogFormat.STDOUT and not self.path:
            raise ValueError(f"a path is required for the {self.format.value} format")
        return self


class ExperimentConfig(StrictModel):
    """The experiment document"""
    dataset: DatasetConfig
    distribution: Optional[DistributionConfig] = None
    n_clients: int = Field(ge=1)
    n_rounds: int = Field(ge=1)
    eligibility: float = 1.0
    seed: int = 0
    split: SplitConfig = Field(default_factory=SplitConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    logger: LoggerConfig = Field(default_factory=LoggerConfig)
    device: Optional[str] = None
    max_workers: int = Field(1, ge=1)

    _source: Optional[str] = PrivateAttr(default=None)

    @field_validator("eligibility")
    @classmethod
    def check_eligibility(cls, value: float) -> float:
        if not 0 < value <= 1:
            raise ValueError("eligibility must be in (0,1]")
        return value

    def partition_spec(self) -> PartitionSpec:
        return (self.distribution or DistributionConfig()).to_spec(self.seed)


# -- algorithm document ---------------------------------------------------------------

class ModelConfig(StrictModel):
    kind: ModelKind = ModelKind.LINEAR
    hidden: List[int] = Field(default_factory=list)
    activation: Activation = Activation.RELU

    @model_validator(mode="after")
    def check_layers(self):
        if any(size < 1 for size in self.hidden):
            raise ValueError("hidden layer sizes must be positive")
        if self.kind == ModelKind.LINEAR and self.hidden:
            raise ValueError("a linear model has no hidden layers")
        if self.kind == ModelKind.MLP and not self.hidden:
            raise ValueError("an mlp needs at least one hidden layer")
        return self

    def build(self, n_features: int, n_classes: int) -> ModelArchitecture:
        if self.kind == ModelKind.LINEAR:
            return ModelArchitecture.linear(n_features, n_classes)
        return ModelArchitecture.mlp(n_features, self.hidden, n_classes, self.activation)


class AlgorithmConfig(StrictModel):
    """The algorithm document; server/client maps are checked by the algorithm's own schemas"""
    name: str = Field(min_length=1)
    model: ModelConfig = Field(default_factory=ModelConfig)
    server: Dict[str, Any] = Field(default_factory=dict)
    client: Dict[str, Any] = Field(default_factory=dict)

    _source: Optional[str] = PrivateAttr(default=None)
    _node: Any = PrivateAttr(default=None)


# -- hyper-parameter schemas declared by algorithms -----------------------------------------

class OptimizerParams(StrictModel):
    learning_rate: float = Field(0.1, gt=0)
    weight_decay: float = Field(0.0, ge=0)
    momentum: float = Field(0.0, ge=0, lt=1)

    def to_spec(self) -> OptimizerSpec:
        return OptimizerSpec(self.learning_rate, self.weight_decay, self.momentum)


class ClientParams(StrictModel):
    """Client hyper-parameters shared by every algorithm"""
    batch_size: int = Field(32, ge=1)
    local_epochs: Optional[int] = Field(None, ge=1)
    local_steps: Optional[int] = Field(None, ge=1)
    optimizer: OptimizerParams = Field(default_factory=OptimizerParams)

    @model_validator(mode="after")
    def check_work(self):
        if self.local_epochs is not None and self.local_steps is not None:
            raise ValueError("set either local_epochs or local_steps, not both")
        return self

    def local_work(self) -> LocalWorkSpec:
        if self.local_steps is not None:
            return LocalWorkSpec(WorkMode.STEPS, self.local_steps, self.batch_size)
        return LocalWorkSpec(WorkMode.EPOCHS, self.local_epochs or 1, self.batch_size)

    def hyperparams(self) -> Dict[str, Any]:
        """
        Fields beyond the shared ones (e.g. FedProx's mu)
        """
        return self.model_dump(exclude=set(ClientParams.model_fields))


class ServerParams(StrictModel):
    """Server hyper-parameters shared by every algorithm"""
    weighted: bool = True

    def hyperparams(self) -> Dict[str, Any]:
        return self.model_dump(exclude=set(ServerParams.model_fields))
