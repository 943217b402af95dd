from typing import Any, Dict, Optional, Sequence, Tuple, Type, TypeVar, Union
import logging
import os

import yaml
from pydantic import BaseModel, ValidationError
from yaml.nodes import MappingNode, Node, SequenceNode

from models.experiment_config import AlgorithmConfig, CsvDataset, ExperimentConfig
from services.error_service import ConfigError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


class ConfigValidator:
    """
    Loads YAML configuration documents and turns schema violations into
    ConfigErrors that point at the offending key and line
    """

    @staticmethod
    def load_yaml(path: str) -> Tuple[Dict[str, Any], Optional[Node]]:
        """
        Parse a YAML file into (data, node tree); the tree keeps line marks
        """
        if not os.path.isfile(path):
            raise ConfigError("file not found", path=path)
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except UnicodeDecodeError:
            raise ConfigError("not valid UTF-8 text", path=path) from None
        try:
            node = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            problem = getattr(e, "problem", None) or str(e)
            raise ConfigError(f"malformed YAML: {problem}", path=path,
                              line=mark.line + 1 if mark is not None else None) from None
        ConfigValidator.check_duplicate_keys(node, path)

        if data is None:
            raise ConfigError("empty configuration document", path=path)
        if not isinstance(data, dict):
            raise ConfigError("the document must be a mapping of keys to values", path=path,
                              line=node.start_mark.line + 1 if node is not None else None)
        return data, node

    @staticmethod
    def check_duplicate_keys(node: Optional[Node], path: str, prefix: Tuple[str, ...] = ()):
        """
        Reject a mapping that repeats a key (YAML would keep the last value)
        """
        if isinstance(node, MappingNode):
            seen = set()
            for key_node, value_node in node.value:
                key = str(key_node.value)
                if key in seen:
                    raise ConfigError("duplicate key", key=".".join((*prefix, key)), path=path,
                                      line=key_node.start_mark.line + 1)
                seen.add(key)
                ConfigValidator.check_duplicate_keys(value_node, path, (*prefix, key))
        elif isinstance(node, SequenceNode):
            for i, item in enumerate(node.value):
                ConfigValidator.check_duplicate_keys(item, path, (*prefix, str(i)))

    @staticmethod
    def locate(node: Optional[Node], loc: Sequence[Union[str, int]]) -> Tuple[str, Optional[int]]:
        """
        Follow a pydantic error location through the YAML node tree.

        Returns the dotted key and the line of the deepest node found.
        Discriminator tags (e.g. the `blobs` in dataset.blobs.params) are
        dropped from the key.
        """
        parts = []
        line = node.start_mark.line + 1 if node is not None else None
        for item in loc:
            if isinstance(node, MappingNode):
                values = {str(k.value): (k, v) for k, v in node.value}
                source = values.get("source")
                if str(item) not in values and source is not None and source[1].value == str(item):
                    continue
                parts.append(str(item))
                if str(item) in values:
                    key_node, node = values[str(item)]
                    line = key_node.start_mark.line + 1
                else:
                    node = None
            elif isinstance(node, SequenceNode) and isinstance(item, int) and item < len(node.value):
                parts.append(str(item))
                node = node.value[item]
                line = node.start_mark.line + 1
            else:
                parts.append(str(item))
                node = None
        return ".".join(parts), line

    @staticmethod
    def describe(error: Dict[str, Any]) -> str:
        if error.get("type") == "extra_forbidden":
            return "unknown key"
        if error.get("type") == "missing":
            return "required key is missing"
        message = error.get("msg", "invalid value")
        return message[len("Value error, "):] if message.startswith("Value error, ") else message

    @classmethod
    def validate_model(cls, model: Type[M], data: Dict[str, Any], path: Optional[str], node: Optional[Node],
                       prefix: Sequence[str] = ()) -> M:
        """
        Validate `data` against `model`, raising a ConfigError for the first
        violation
        """
        try:
            return model.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            key, line = cls.locate(node, [*prefix, *first["loc"]])
            raise ConfigError(cls.describe(first), key=key or None, path=path, line=line) from None


def _guess_kind(data: Dict[str, Any]) -> str:
    return "algorithm" if "name" in data and "dataset" not in data else "experiment"


def parse_config(path: str, kind: Optional[str] = None) -> Union[ExperimentConfig, AlgorithmConfig]:
    """
    Load and validate a configuration document.

    `kind` is "experiment" or "algorithm"; guessed from the keys when omitted.
    """
    data, node = ConfigValidator.load_yaml(path)
    kind = kind or _guess_kind(data)
    if kind == "experiment":
        return load_experiment_config(path, data, node)
    if kind == "algorithm":
        return load_algorithm_config(path, data, node)
    raise ValueError(f"Unknown configuration kind: {kind}")


def load_experiment_config(path: str, data: Optional[Dict[str, Any]] = None,
                           node: Optional[Node] = None) -> ExperimentConfig:
    if data is None:
        data, node = ConfigValidator.load_yaml(path)
    config = ConfigValidator.validate_model(ExperimentConfig, data, path, node)
    if isinstance(config.dataset, CsvDataset) and not os.path.isabs(config.dataset.params.path):
        config.dataset.params.path = os.path.join(os.path.dirname(os.path.abspath(path)), config.dataset.params.path)
    config._source = path
    logger.debug(f"Loaded experiment config from {path}")
    return config


def load_algorithm_config(path: str, data: Optional[Dict[str, Any]] = None,
                          node: Optional[Node] = None) -> AlgorithmConfig:
    if data is None:
        data, node = ConfigValidator.load_yaml(path)
    config = ConfigValidator.validate_model(AlgorithmConfig, data, path, node)
    config._source = path
    config._node = node
    logger.debug(f"Loaded algorithm config '{config.name}' from {path}")
    return config


def bind_params(config: AlgorithmConfig, section: str, model: Type[M]) -> M:
    """
    Validate the `server` or `client` map of an algorithm document with the
    schema the resolved algorithm declares
    """
    return ConfigValidator.validate_model(model, getattr(config, section), config._source, config._node,
                                          prefix=(section,))
