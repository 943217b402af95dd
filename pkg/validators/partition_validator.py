from typing import Dict, Any, Optional
import logging

import numpy as np

from models.dataset import Dataset, Partition

logger = logging.getLogger(__name__)


class PartitionValidator:
    """
    Validator for the structural invariants of a client partition
    """

    def validate_indices(self, partition: Partition, n_samples: int) -> Dict[str, Any]:
        """
        Every index valid and owned by at most one client
        """
        all_indices = partition.all_indices()
        out_of_range = int(np.sum((all_indices < 0) | (all_indices >= n_samples)))
        duplicates = int(all_indices.size - np.unique(all_indices).size)

        result = {
            'valid': out_of_range == 0 and duplicates == 0,
            'assigned': int(all_indices.size),
            'out_of_range': out_of_range,
            'duplicates': duplicates,
        }
        if not result['valid']:
            logger.warning(f"Partition index validation failed: {result}")
        return result

    def validate_non_empty(self, partition: Partition) -> Dict[str, Any]:
        """
        Every client owns at least one sample
        """
        empty = [c for c in partition.clients() if partition.assignment[c].size == 0]
        return {'valid': not empty, 'empty_clients': empty}

    def validate_cover(self, partition: Partition, n_samples: int) -> Dict[str, Any]:
        """
        The union of client indices is exactly range(n_samples)
        """
        all_indices = np.sort(partition.all_indices())
        covered = all_indices.size == n_samples and np.array_equal(all_indices, np.arange(n_samples))
        return {'valid': bool(covered), 'assigned': int(all_indices.size), 'n_samples': n_samples}

    def validate_label_count(self, partition: Partition, dataset: Dataset, k: int) -> Dict[str, Any]:
        """
        Every client holds exactly k distinct labels
        """
        offenders = {}
        for client in partition.clients():
            distinct = int(np.unique(dataset.labels[partition.assignment[client]]).size)
            if distinct != k:
                offenders[client] = distinct
        return {'valid': not offenders, 'offenders': offenders}

    def run_all_validations(self, partition: Partition, dataset: Dataset, require_cover: bool = False,
                            k: Optional[int] = None) -> Dict[str, Any]:
        """
        Run every applicable validation and summarize
        """
        results = {
            'indices': self.validate_indices(partition, len(dataset)),
            'non_empty': self.validate_non_empty(partition),
        }
        if require_cover:
            results['cover'] = self.validate_cover(partition, len(dataset))
        if k is not None:
            results['label_count'] = self.validate_label_count(partition, dataset, k)

        failed = [name for name, r in results.items() if not r['valid']]
        results['all_valid'] = not failed
        results['failed'] = failed
        return results
