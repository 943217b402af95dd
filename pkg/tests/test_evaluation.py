import unittest
import os
import sys

import numpy as np

# Add the project root to the path so we can import modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from evaluation.evaluator import EvalSchedule, EvalTarget, Evaluator
from evaluation.metrics import confusion_counts, metrics
from models.dataset import Dataset
from models.metrics_report import EvalScope, MetricsReport
from nets.architecture import ModelArchitecture
from nets.functional import init_params


def enumeration_oracle(y_true, y_pred, n_classes):
    """Per-class metrics counted one sample at a time"""
    n = len(y_true)
    correct = sum(1 for t, p in zip(y_true, y_pred) if t == p)
    precisions, recalls, f1s = [], [], []
    for c in range(n_classes):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return {
        "accuracy": correct / n,
        "precision_micro": correct / n,
        "precision_macro": sum(precisions) / n_classes,
        "recall_micro": correct / n,
        "recall_macro": sum(recalls) / n_classes,
        "f1_micro": correct / n,
        "f1_macro": sum(f1s) / n_classes,
    }


class TestConfusionCounts(unittest.TestCase):
    """Test cases for per-class confusion counts"""

    def test_small_example(self):
        """Test counts for y_true=[0,1,1], y_pred=[0,1,0]"""
        counts = confusion_counts([0, 1, 1], [0, 1, 0], 2)
        self.assertEqual(counts["tp"].tolist(), [1, 1])
        self.assertEqual(counts["fp"].tolist(), [1, 0])
        self.assertEqual(counts["fn"].tolist(), [0, 1])

    def test_perfect_prediction(self):
        """Test that perfect predictions have no errors"""
        counts = confusion_counts([2, 0, 1], [2, 0, 1], 3)
        self.assertEqual(counts["fp"].sum() + counts["fn"].sum(), 0)
        self.assertEqual(counts["tp"].sum(), 3)

    def test_invalid_inputs(self):
        """Test that empty, mismatched or out-of-range labels are rejected"""
        with self.assertRaises(ValueError):
            confusion_counts([], [], 2)
        with self.assertRaises(ValueError):
            confusion_counts([0, 1], [0], 2)
        with self.assertRaises(ValueError):
            confusion_counts([0, 2], [0, 1], 2)


class TestMetrics(unittest.TestCase):
    """Test cases for the classification metrics"""

    def test_small_example(self):
        """Test accuracy 2/3, macro P/R 0.75 and macro F1 2/3"""
        values = metrics([0, 1, 1], [0, 1, 0], 2)
        self.assertAlmostEqual(values["accuracy"], 2 / 3, places=12)
        self.assertAlmostEqual(values["f1_micro"], 2 / 3, places=12)
        self.assertAlmostEqual(values["precision_macro"], 0.75, places=12)
        self.assertAlmostEqual(values["recall_macro"], 0.75, places=12)
        self.assertAlmostEqual(values["f1_macro"], 2 / 3, places=12)

    def test_all_correct(self):
        """Test that perfect predictions score 1 everywhere"""
        values = metrics([0, 1, 2, 1], [0, 1, 2, 1], 3)
        for name, value in values.items():
            self.assertEqual(value, 1.0, name)

    def test_absent_class_counts_as_zero(self):
        """Test that a class absent from labels and predictions lowers macro scores"""
        values = metrics([0, 0], [0, 0], 2)
        self.assertEqual(values["accuracy"], 1.0)
        self.assertEqual(values["precision_macro"], 0.5)
        self.assertEqual(values["f1_macro"], 0.5)

    def test_matches_enumeration_oracle(self):
        """Test metrics against per-sample enumeration on 1000 random draws"""
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            n_classes = int(rng.integers(1, 6))
            length = int(rng.integers(1, 51))
            y_true = rng.integers(0, n_classes, size=length)
            y_pred = rng.integers(0, n_classes, size=length)
            values = metrics(y_true, y_pred, n_classes)
            expected = enumeration_oracle(y_true.tolist(), y_pred.tolist(), n_classes)
            for name, value in expected.items():
                self.assertAlmostEqual(values[name], value, delta=1e-12, msg=name)
            self.assertEqual(values["f1_micro"], values["accuracy"])

    def test_permutation_invariance(self):
        """Test that reordering samples does not change the metrics"""
        rng = np.random.default_rng(5)
        y_true = rng.integers(0, 4, size=40)
        y_pred = rng.integers(0, 4, size=40)
        order = rng.permutation(40)
        self.assertEqual(metrics(y_true, y_pred, 4), metrics(y_true[order], y_pred[order], 4))


class TestEvalSchedule(unittest.TestCase):
    """Test cases for the evaluation schedule"""

    def test_frequency_with_final_round(self):
        """Test that frequency 5 over 12 rounds evaluates rounds 5, 10 and 12"""
        self.assertEqual(EvalSchedule(5).rounds(12), [5, 10, 12])

    def test_every_round(self):
        """Test that frequency 1 evaluates every round once"""
        self.assertEqual(EvalSchedule(1).rounds(3), [1, 2, 3])

    def test_final_round_left_to_finalize(self):
        """Test that the loop never evaluates the last round itself"""
        self.assertFalse(EvalSchedule(5).should_evaluate(10, 10))
        self.assertTrue(EvalSchedule(5).should_evaluate(5, 10))

    def test_invalid_frequency(self):
        """Test that frequency 0 is rejected"""
        with self.assertRaises(ValueError):
            EvalSchedule(0)


class TestEvaluator(unittest.TestCase):
    """Test cases for the Evaluator"""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.arch = ModelArchitecture.linear(2, 2)
        # an all-zero model predicts class 0 everywhere
        self.model = init_params(self.arch, 0).zeros_like()
        self.server_test = Dataset(np.zeros((4, 2)), [0, 0, 1, 1], 2)
        self.client_tests = {
            0: Dataset(np.zeros((1, 2)), [0], 2),
            1: Dataset(np.zeros((3, 2)), [1, 1, 1], 2),
        }

    def test_server_scope(self):
        """Test a server_global report on the held-out set"""
        reports = Evaluator(self.arch, server_test=self.server_test).evaluate_round(3, self.model)
        self.assertEqual(len(reports), 1)
        self.assertEqual(reports[0].scope, EvalScope.SERVER_GLOBAL)
        self.assertEqual(reports[0].round, 3)
        self.assertEqual(reports[0].accuracy, 0.5)
        self.assertEqual(reports[0].n_samples, 4)

    def test_client_mean_weighted_by_test_size(self):
        """Test that client_mean weights each client by its test set size"""
        evaluator = Evaluator(self.arch, client_tests=self.client_tests, target=EvalTarget.CLIENTS)
        report = evaluator.evaluate_round(1, self.model)[0]
        self.assertEqual(report.scope, EvalScope.CLIENT_MEAN)
        self.assertAlmostEqual(report.accuracy, (1 * 1.0 + 3 * 0.0) / 4, places=12)
        self.assertEqual(report.n_samples, 4)

    def test_client_mean_unweighted(self):
        """Test that weighted=False averages clients uniformly"""
        evaluator = Evaluator(self.arch, client_tests=self.client_tests, target=EvalTarget.CLIENTS, weighted=False)
        self.assertAlmostEqual(evaluator.evaluate_round(1, self.model)[0].accuracy, 0.5, places=12)

    def test_both_scopes(self):
        """Test that target both gives one report per scope"""
        evaluator = Evaluator(self.arch, self.server_test, self.client_tests, target=EvalTarget.BOTH)
        scopes = [r.scope for r in evaluator.evaluate_round(1, self.model)]
        self.assertEqual(scopes, [EvalScope.SERVER_GLOBAL, EvalScope.CLIENT_MEAN])

    def test_no_test_data(self):
        """Test that an evaluator without test data produces no reports"""
        evaluator = Evaluator(self.arch, server_test=Dataset(np.zeros((0, 2)), [], 2))
        self.assertEqual(evaluator.evaluate_round(1, self.model), [])

    def test_report_round_trip(self):
        """Test that a report survives to_dict/from_dict"""
        report = Evaluator(self.arch, server_test=self.server_test).evaluate_round(2, self.model)[0]
        self.assertEqual(MetricsReport.from_dict(report.to_dict()), report)
        self.assertTrue(report.validate())


if __name__ == '__main__':
    unittest.main()
