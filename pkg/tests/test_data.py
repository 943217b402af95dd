import unittest
import os
import shutil
import sys
import tempfile

import numpy as np

# Add the project root to the path so we can import modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from data.csv_io import load_csv, save_csv
from data.generators import generate_blobs
from data.partitioners import partition, sample_dirichlet
from data.splitting import iid_slices, split_indices, train_test_split
from data.stats import label_distribution, partition_stats, total_variation
from models.dataset import COVERING_STRATEGIES, Dataset, Partition, PartitionSpec, PartitionStrategy
from services.error_service import DataError, PartitionError
from utils import largest_remainder_counts, make_rng, round_half_up
from validators.partition_validator import PartitionValidator


def nearest_mean_accuracy(train: Dataset, test: Dataset) -> float:
    means = np.stack([train.features[train.labels == c].mean(axis=0) for c in range(train.n_classes)])
    distances = ((test.features[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(np.argmin(distances, axis=1) == test.labels))


class TestUtils(unittest.TestCase):
    """Test cases for seeding and rounding helpers"""

    def test_streams_are_independent(self):
        """Test that different stream names give different draws"""
        a = make_rng(42, "selection").random(5)
        b = make_rng(42, "partition").random(5)
        self.assertFalse(np.array_equal(a, b))
        np.testing.assert_array_equal(a, make_rng(42, "selection").random(5))

    def test_round_half_up(self):
        """Test that halves round up"""
        self.assertEqual(round_half_up(2.5), 3)
        self.assertEqual(round_half_up(0.5), 1)
        self.assertEqual(round_half_up(0.49), 0)

    def test_largest_remainder(self):
        """Test that counts sum to the total and ties go to lower indices"""
        self.assertEqual(largest_remainder_counts([1, 1, 1], 10), [4, 3, 3])
        self.assertEqual(sum(largest_remainder_counts([0.2, 0.3, 0.5], 7)), 7)


class TestBlobs(unittest.TestCase):
    """Test cases for the synthetic blob generator"""

    def test_deterministic(self):
        """Test that the same seed gives the same dataset"""
        a = generate_blobs(200, 5, 3, 4.0, seed=9)
        b = generate_blobs(200, 5, 3, 4.0, seed=9)
        self.assertTrue(a.equals(b))
        self.assertFalse(a.equals(generate_blobs(200, 5, 3, 4.0, seed=10)))

    def test_shape_and_balance(self):
        """Test sizes and the balanced class counts"""
        data = generate_blobs(101, 4, 3, 2.0, seed=0)
        self.assertEqual(data.features.shape, (101, 4))
        self.assertEqual(data.class_counts().tolist(), [34, 34, 33])

    def test_well_separated_blobs_are_separable(self):
        """Test that separation 10 is almost perfectly separable by the class means"""
        data = generate_blobs(200, 20, 2, 10.0, seed=1)
        self.assertGreaterEqual(nearest_mean_accuracy(data, data), 0.99)

    def test_zero_separation_is_chance(self):
        """Test that separation 0 gives chance-level held-out accuracy"""
        data = generate_blobs(1000, 2, 2, 0.0, seed=2)
        train, test = data.subset(np.arange(500)), data.subset(np.arange(500, 1000))
        self.assertLessEqual(abs(nearest_mean_accuracy(train, test) - 0.5), 0.1)

    def test_invalid_arguments(self):
        """Test that non-positive sizes are rejected"""
        with self.assertRaises(ValueError):
            generate_blobs(0, 2, 2, 1.0, seed=0)
        with self.assertRaises(ValueError):
            generate_blobs(10, 2, 2, -1.0, seed=0)


class TestCsv(unittest.TestCase):
    """Test cases for the CSV loader"""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up after each test method."""
        shutil.rmtree(self.temp_dir)

    def _write(self, text: str) -> str:
        path = os.path.join(self.temp_dir, "data.csv")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_labels_are_reindexed(self):
        """Test that labels {5, 9, 5} become {0, 1, 0}"""
        path = self._write("a,b,y\n1.0,2.0,5\n3.0,4.0,9\n5.0,6.0,5\n")
        data = load_csv(path, "y")
        self.assertEqual(data.labels.tolist(), [0, 1, 0])
        self.assertEqual(data.n_classes, 2)
        np.testing.assert_array_equal(data.features, [[1, 2], [3, 4], [5, 6]])

    def test_label_column_anywhere(self):
        """Test that the label column need not be last"""
        data = load_csv(self._write("y,a\n1,0.5\n0,1.5\n"), "y")
        self.assertEqual(data.labels.tolist(), [1, 0])
        self.assertEqual(data.features[:, 0].tolist(), [0.5, 1.5])

    def test_header_only(self):
        """Test that a header-only file is an empty-dataset error"""
        with self.assertRaises(DataError):
            load_csv(self._write("a,b,y\n"), "y")

    def test_non_numeric_cell_names_the_line(self):
        """Test that a non-numeric cell reports its line"""
        with self.assertRaises(DataError) as ctx:
            load_csv(self._write("a,y\n1.0,0\noops,1\n"), "y")
        self.assertIn(":3:", str(ctx.exception))

    def test_invalid_utf8_names_the_line(self):
        """Test that bytes that are not UTF-8 give a DataError with their line"""
        path = os.path.join(self.temp_dir, "data.csv")
        with open(path, "wb") as f:
            f.write(b"a,label\n1,0\n\xff,1\n")
        with self.assertRaises(DataError) as ctx:
            load_csv(path, "label")
        self.assertIn(":3:", str(ctx.exception))
        self.assertIn("UTF-8", str(ctx.exception))

    def test_non_finite_cells_rejected(self):
        """Test that nan and inf cells are rejected with their line"""
        for cell, line in (("nan", 2), ("inf", 3), ("-inf", 3)):
            body = f"a,label\n{cell},0\n1.0,1\n" if line == 2 else f"a,label\n1.0,0\n{cell},1\n"
            with self.assertRaises(DataError, msg=cell) as ctx:
                load_csv(self._write(body), "label")
            self.assertIn(f":{line}:", str(ctx.exception))
            self.assertIn("non-finite", str(ctx.exception))

    def test_non_finite_label_rejected(self):
        """Test that an infinite label is rejected"""
        with self.assertRaises(DataError):
            load_csv(self._write("a,label\n1.0,inf\n"), "label")

    def test_missing_label_column(self):
        """Test that an unknown label column is rejected"""
        with self.assertRaises(DataError):
            load_csv(self._write("a,b\n1,2\n"), "y")

    def test_missing_file(self):
        """Test that a missing file is a data error"""
        with self.assertRaises(DataError):
            load_csv(os.path.join(self.temp_dir, "nope.csv"), "y")

    def test_save_then_load(self):
        """Test that a saved dataset loads back identically"""
        data = generate_blobs(30, 3, 3, 2.0, seed=4)
        path = os.path.join(self.temp_dir, "out", "blobs.csv")
        save_csv(data, path)
        self.assertTrue(load_csv(path, "label").equals(data))


class TestSplitting(unittest.TestCase):
    """Test cases for train/test splitting"""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.data = generate_blobs(100, 3, 2, 3.0, seed=5)

    def test_plain_split_sizes(self):
        """Test that 100 samples at 0.2 give 80/20"""
        train, test = train_test_split(self.data, 0.2, stratified=False, seed=0)
        self.assertEqual((len(train), len(test)), (80, 20))

    def test_stratified_split_per_class(self):
        """Test that a balanced 2-class split puts 10 per class in test"""
        train, test = train_test_split(self.data, 0.2, stratified=True, seed=0)
        self.assertEqual(test.class_counts().tolist(), [10, 10])
        self.assertEqual(len(train), 80)

    def test_split_is_disjoint_cover(self):
        """Test that train and test indices partition the dataset"""
        for stratified in (True, False):
            train_idx, test_idx = split_indices(self.data, 0.3, stratified, seed=1)
            self.assertEqual(np.intersect1d(train_idx, test_idx).size, 0)
            np.testing.assert_array_equal(np.sort(np.concatenate([train_idx, test_idx])), np.arange(100))

    def test_singleton_class_stays_in_train(self):
        """Test that a single-sample class warns and goes to train"""
        data = Dataset(np.arange(12, dtype=float).reshape(6, 2), [0, 0, 0, 0, 0, 1], 2)
        with self.assertLogs("data.splitting", level="WARNING"):
            train_idx, test_idx = split_indices(data, 0.4, stratified=True, seed=0)
        self.assertIn(5, train_idx.tolist())
        self.assertNotIn(5, test_idx.tolist())

    def test_invalid_fraction(self):
        """Test that fractions outside (0, 1) are rejected"""
        with self.assertRaises(ValueError):
            split_indices(self.data, 1.0, False, seed=0)

    def test_iid_slices(self):
        """Test that slices are near-equal and cover the dataset"""
        slices = iid_slices(self.data, 3, seed=0)
        self.assertEqual(sorted(len(s) for s in slices.values()), [33, 33, 34])
        self.assertEqual(sum(len(s) for s in slices.values()), 100)


class TestDirichletSampling(unittest.TestCase):
    """Test cases for the Dirichlet sampler"""

    def test_sums_to_one(self):
        """Test that draws are probability vectors, even for tiny alpha"""
        rng = np.random.default_rng(0)
        for alpha in (1e-3, 0.01, 0.5, 1.0, 100.0):
            draw = sample_dirichlet(np.full(6, alpha), rng)
            self.assertAlmostEqual(draw.sum(), 1.0, places=12)
            self.assertTrue(np.all(draw >= 0))


class TestPartition(unittest.TestCase):
    """Test cases for the partitioning strategies"""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.data = generate_blobs(1000, 10, 10, 4.0, seed=0)

    def _labels_per_client(self, result, data):
        return {c: set(np.unique(data.labels[result.assignment[c]]).tolist()) for c in result.clients()}

    def test_iid_sizes(self):
        """Test that 100 samples over 4 clients give 25 each"""
        data = generate_blobs(100, 3, 2, 1.0, seed=0)
        result = partition(data, 4, PartitionSpec(PartitionStrategy.IID, seed=0))
        self.assertEqual(result.sizes(), [25, 25, 25, 25])

    def test_covering_strategies_are_disjoint_covers(self):
        """Test that covering strategies assign every sample exactly once"""
        for strategy in COVERING_STRATEGIES:
            result = partition(self.data, 5, PartitionSpec(strategy, seed=3))
            indices = np.sort(result.all_indices())
            np.testing.assert_array_equal(indices, np.arange(len(self.data)), strategy.value)
            self.assertTrue(all(size > 0 for size in result.sizes()))

    def test_deterministic(self):
        """Test that the same spec and seed give the same partition"""
        spec = PartitionSpec(PartitionStrategy.DIRICHLET_LABEL, {"alpha": 0.3}, seed=7)
        a, b = partition(self.data, 6, spec), partition(self.data, 6, spec)
        for c in a.clients():
            np.testing.assert_array_equal(a.assignment[c], b.assignment[c])

    def test_pathological_k_labels(self):
        """Test that pathological k=2 gives every client exactly 2 labels"""
        result = partition(self.data, 5, PartitionSpec(PartitionStrategy.PATHOLOGICAL_LABEL, {"k": 2}, seed=1))
        for c, labels in self._labels_per_client(result, self.data).items():
            self.assertEqual(len(labels), 2, f"client {c}")
        self.assertEqual(np.unique(result.all_indices()).size, result.all_indices().size)

    def test_label_quantity_k_labels(self):
        """Test that label_quantity gives every client exactly k labels"""
        for k in (1, 3):
            result = partition(self.data, 7, PartitionSpec(PartitionStrategy.LABEL_QUANTITY, {"k": k}, seed=2))
            for labels in self._labels_per_client(result, self.data).values():
                self.assertEqual(len(labels), k)

    def test_k_larger_than_classes(self):
        """Test that k above the class count is rejected"""
        with self.assertRaises(PartitionError):
            partition(self.data, 5, PartitionSpec(PartitionStrategy.PATHOLOGICAL_LABEL, {"k": 11}, seed=0))

    def test_unknown_parameter(self):
        """Test that a parameter of another strategy is rejected"""
        with self.assertRaises(PartitionError):
            partition(self.data, 5, PartitionSpec(PartitionStrategy.IID, {"alpha": 1.0}, seed=0))

    def test_too_many_clients(self):
        """Test that more clients than samples cannot be satisfied"""
        data = generate_blobs(3, 2, 2, 1.0, seed=0)
        with self.assertRaises(PartitionError):
            partition(data, 5, PartitionSpec(PartitionStrategy.IID, seed=0))

    def test_huge_alpha_is_near_iid(self):
        """Test that dirichlet alpha=1e6 keeps every client within TV 0.05 of the global mix"""
        data = generate_blobs(5000, 10, 10, 4.0, seed=1)
        result = partition(data, 10, PartitionSpec(PartitionStrategy.DIRICHLET_LABEL, {"alpha": 1e6}, seed=4))
        global_dist = label_distribution(data.class_counts())
        for c in result.clients():
            hist = np.bincount(data.labels[result.assignment[c]], minlength=10)
            self.assertLessEqual(total_variation(label_distribution(hist), global_dist), 0.05)

    def test_tiny_alpha_concentrates_labels(self):
        """Test that dirichlet alpha=0.01 puts most clients' mass on at most 2 classes"""
        data = generate_blobs(360, 6, 6, 4.0, seed=2)
        result = partition(data, 5, PartitionSpec(PartitionStrategy.DIRICHLET_LABEL, {"alpha": 0.01}, seed=8))
        concentrated = 0
        for c in result.clients():
            hist = np.sort(np.bincount(data.labels[result.assignment[c]], minlength=6))[::-1]
            if hist[:2].sum() >= 0.9 * hist.sum():
                concentrated += 1
        self.assertGreaterEqual(concentrated, 0.8 * result.n_clients)

    def test_covariate_shift_offsets(self):
        """Test that covariate shift offsets client features and keeps labels"""
        result = partition(self.data, 4, PartitionSpec(PartitionStrategy.COVARIATE_SHIFT, {"sigma": 2.0}, seed=0))
        client = result.client_dataset(self.data, 0)
        raw = self.data.subset(result.assignment[0])
        np.testing.assert_array_equal(client.labels, raw.labels)
        np.testing.assert_allclose(client.features - raw.features,
                                   np.broadcast_to(result.feature_offsets[0], raw.features.shape))


class TestPartitionValidator(unittest.TestCase):
    """Test cases for the partition structure checks"""

    def setUp(self):
        """Set up test fixtures before each test method."""
        self.data = Dataset(np.zeros((6, 1)), [0, 0, 1, 1, 2, 2], 3)
        self.validator = PartitionValidator()

    def test_label_count_offenders(self):
        """Test that a client holding the wrong number of labels is flagged"""
        result = Partition({0: [0, 1], 1: [2, 3, 4, 5]})
        checks = self.validator.run_all_validations(result, self.data, k=2)
        self.assertFalse(checks['all_valid'])
        self.assertEqual(checks['failed'], ['label_count'])
        self.assertEqual(checks['label_count']['offenders'], {0: 1})

    def test_label_count_satisfied(self):
        """Test that clients with exactly k labels pass"""
        result = Partition({0: [0, 2], 1: [3, 4]})
        self.assertTrue(self.validator.run_all_validations(result, self.data, k=2)['all_valid'])

    def test_label_count_skipped_without_k(self):
        """Test that the label check only runs when k is given"""
        checks = self.validator.run_all_validations(Partition({0: [0, 1, 2, 3, 4, 5]}), self.data,
                                                    require_cover=True)
        self.assertNotIn('label_count', checks)
        self.assertTrue(checks['all_valid'])

    def test_partition_enforces_k_labels(self):
        """Test that label-count strategies return clients with exactly k labels"""
        data = generate_blobs(600, 4, 6, 4.0, seed=3)
        for strategy in (PartitionStrategy.PATHOLOGICAL_LABEL, PartitionStrategy.LABEL_QUANTITY):
            result = partition(data, 4, PartitionSpec(strategy, {"k": 3}, seed=1))
            self.assertTrue(self.validator.validate_label_count(result, data, 3)['valid'], strategy.value)


class TestPartitionStats(unittest.TestCase):
    """Test cases for partition skew statistics"""

    def test_iid_has_low_skew(self):
        """Test that an IID split of 2000 samples has mean pairwise TV <= 0.1"""
        data = generate_blobs(2000, 4, 2, 3.0, seed=0)
        report = partition_stats(data, partition(data, 4, PartitionSpec(PartitionStrategy.IID, seed=0)))
        self.assertLessEqual(report.mean_pairwise_tv, 0.1)
        self.assertEqual(sum(report.sizes), 2000)

    def test_one_class_per_client_is_maximal(self):
        """Test that pathological k=1 over 10 classes and 10 clients has TV 1.0"""
        data = generate_blobs(500, 10, 10, 4.0, seed=0)
        result = partition(data, 10, PartitionSpec(PartitionStrategy.PATHOLOGICAL_LABEL, {"k": 1}, seed=0))
        report = partition_stats(data, result)
        self.assertAlmostEqual(report.mean_pairwise_tv, 1.0, places=12)
        self.assertEqual(report.label_histograms.shape, (10, 10))
        self.assertEqual(report.label_histograms.sum(), sum(report.sizes))

    def test_total_variation(self):
        """Test total variation on small vectors"""
        self.assertAlmostEqual(total_variation([1, 0], [0, 1]), 1.0)
        self.assertAlmostEqual(total_variation([0.5, 0.5], [0.5, 0.5]), 0.0)


if __name__ == '__main__':
    unittest.main()
