import unittest
import os
import sys

# Add the project root to the path so we can import modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from models.experiment_config import AlgorithmConfig, ExperimentConfig
from models.metrics_report import EvalScope
from services.experiment_service import ExperimentService, ExperimentType


def desk_experiment() -> ExperimentConfig:
    """2-class blobs over 10 label-skewed clients, 20% participation, 30 rounds"""
    return ExperimentConfig.model_validate({
        "dataset": {"source": "blobs",
                    "params": {"n_samples": 2000, "n_features": 20, "n_classes": 2, "separation": 6.0}},
        "distribution": {"strategy": "dirichlet_label", "params": {"alpha": 0.5}},
        "n_clients": 10,
        "n_rounds": 30,
        "eligibility": 0.2,
        "seed": 42,
        "eval": {"frequency": 10},
    })


def desk_algorithm(name: str) -> AlgorithmConfig:
    return AlgorithmConfig.model_validate({
        "name": name,
        "model": {"kind": "linear"},
        "client": {"batch_size": 32, "local_steps": 5, "optimizer": {"learning_rate": 0.1}},
    })


class TestDeskScaleLearning(unittest.TestCase):
    """End-to-end learning check on the default experiment setting"""

    @classmethod
    def setUpClass(cls):
        """Run FedAvg and SCAFFOLD once for every test in the class"""
        cls.results = {
            name: ExperimentService(desk_experiment(), desk_algorithm(name)).run(ExperimentType.FEDERATION)
            for name in ("fedavg", "scaffold")
        }

    def final_accuracy(self, name: str) -> float:
        return self.results[name].final_report(EvalScope.SERVER_GLOBAL).accuracy

    def test_fedavg_learns(self):
        """Test that FedAvg reaches at least 0.90 test accuracy"""
        self.assertGreaterEqual(self.final_accuracy("fedavg"), 0.90)

    def test_scaffold_keeps_up(self):
        """Test that SCAFFOLD ends within 0.02 of FedAvg or better"""
        self.assertGreaterEqual(self.final_accuracy("scaffold"), self.final_accuracy("fedavg") - 0.02)

    def test_report_rounds(self):
        """Test that frequency 10 over 30 rounds reports rounds 10, 20 and 30"""
        self.assertEqual(self.results["fedavg"].evaluated_rounds(), [10, 20, 30])


if __name__ == '__main__':
    unittest.main()
