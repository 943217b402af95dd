"""Registry of federated learning algorithms, built-in and plug-in."""

import importlib
import logging
import os
import sys
from typing import Dict, List, Optional

from algorithms.base import AlgorithmDescriptor, CentralizedFL
from algorithms.fedavg import FedAvg
from algorithms.fedopt import FedOpt
from algorithms.fedprox import FedProx
from algorithms.scaffold import Scaffold
from services.error_service import RegistryError

logger = logging.getLogger(__name__)


class AlgorithmRegistry:
    """
    Name -> AlgorithmDescriptor. Dotted names ("module.Class") that are not
    registered are imported from the plug-in directory on first use.
    """

    def __init__(self, builtins: bool = True):
        self._algorithms: Dict[str, AlgorithmDescriptor] = {}
        if builtins:
            self._register_builtin_algorithms()

    def _register_builtin_algorithms(self):
        for fl_class in (FedAvg, FedProx, Scaffold, FedOpt):
            self.register(fl_class.descriptor())

    def register(self, descriptor: AlgorithmDescriptor):
        if descriptor.name in self._algorithms:
            raise RegistryError(f"An algorithm named '{descriptor.name}' is already registered")
        self._algorithms[descriptor.name] = descriptor
        logger.debug(f"Registered algorithm {descriptor.name}")

    def available(self) -> List[str]:
        return sorted(self._algorithms)

    def resolve(self, name: str, plugins_dir: Optional[str] = None) -> AlgorithmDescriptor:
        """
        Look up an algorithm by name, loading dotted names dynamically
        """
        if name in self._algorithms:
            return self._algorithms[name]
        if "." in name:
            descriptor = self._load_plugin(name, plugins_dir)
            self.register(descriptor)
            return descriptor
        raise RegistryError(f"Unknown algorithm '{name}'; available: {', '.join(self.available())}")

    def _load_plugin(self, name: str, plugins_dir: Optional[str]) -> AlgorithmDescriptor:
        module_name, class_name = name.rsplit(".", 1)
        search_dir = os.path.abspath(plugins_dir or os.getcwd())
        if not os.path.isdir(search_dir):
            raise RegistryError(f"Plug-in directory not found: {search_dir}")
        if search_dir not in sys.path:
            sys.path.insert(0, search_dir)

        try:
            module = importlib.import_module(module_name)
        except ImportError as e:
            raise RegistryError(
                f"Cannot import plug-in module '{module_name}' from {search_dir} ({e}); "
                f"available: {', '.join(self.available())}"
            ) from None

        fl_class = getattr(module, class_name, None)
        if fl_class is None:
            raise RegistryError(f"Module '{module_name}' has no class '{class_name}'")
        if not isinstance(fl_class, type) or not issubclass(fl_class, CentralizedFL):
            raise RegistryError(f"'{name}' is not a CentralizedFL subclass")

        logger.info(f"Loaded plug-in algorithm {name} from {search_dir}")
        return fl_class.descriptor(name)


# Global registry instance
registry = AlgorithmRegistry()


def register(descriptor: AlgorithmDescriptor):
    registry.register(descriptor)


def resolve(name: str, plugins_dir: Optional[str] = None) -> AlgorithmDescriptor:
    return registry.resolve(name, plugins_dir)
