from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Any, List, Optional

from models.model_params import ModelParams
from models.traffic_log import TrafficLog

METRIC_FIELDS = (
    "accuracy",
    "precision_micro",
    "precision_macro",
    "recall_micro",
    "recall_macro",
    "f1_micro",
    "f1_macro",
)


class EvalScope(str, Enum):
    SERVER_GLOBAL = "server_global"
    CLIENT_MEAN = "client_mean"


@dataclass
class MetricsReport:
    """
    Classification metrics of one evaluation
    """
    round: int
    scope: EvalScope
    accuracy: float = 0.0
    precision_micro: float = 0.0
    precision_macro: float = 0.0
    recall_micro: float = 0.0
    recall_macro: float = 0.0
    f1_micro: float = 0.0
    f1_macro: float = 0.0
    n_samples: int = 0

    def __post_init__(self):
        self.scope = EvalScope(self.scope)

    def metric_values(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_FIELDS}

    def validate(self) -> bool:
        for name, value in self.metric_values().items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.n_samples < 0:
            raise ValueError("n_samples cannot be negative")
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "round": self.round,
            **self.metric_values(),
            "scope": self.scope.value,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MetricsReport':
        return cls(
            round=int(data["round"]),
            scope=EvalScope(data["scope"]),
            n_samples=int(data.get("n_samples", 0)),
            **{name: float(data[name]) for name in METRIC_FIELDS},
        )


@dataclass
class FederationResult:
    """
    Everything a run produces: evaluation reports, channel traffic, who
    took part in each round, and the model trajectory
    """
    reports: List[MetricsReport] = field(default_factory=list)
    traffic: TrafficLog = field(default_factory=TrafficLog)
    selections: Dict[int, List[int]] = field(default_factory=dict)
    train_losses: Dict[int, float] = field(default_factory=dict)
    history: List[ModelParams] = field(default_factory=list)
    final_model: Optional[ModelParams] = None

    def reports_for(self, scope: EvalScope) -> List[MetricsReport]:
        return [r for r in self.reports if r.scope == EvalScope(scope)]

    def final_report(self, scope: EvalScope = EvalScope.SERVER_GLOBAL) -> Optional[MetricsReport]:
        matching = self.reports_for(scope)
        return matching[-1] if matching else None

    def evaluated_rounds(self) -> List[int]:
        return sorted({r.round for r in self.reports})
