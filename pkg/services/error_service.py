from typing import List, Dict, Any, Optional
import logging
import time

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


class FLSimError(Exception):
    """Base class for every error raised by the simulator"""


class ConfigError(FLSimError):
    """
    Invalid configuration document or option.

    Carries the offending key (dotted path), the file it came from and,
    when known, the line number.
    """

    def __init__(self, message: str, key: Optional[str] = None, path: Optional[str] = None,
                 line: Optional[int] = None):
        self.key = key
        self.path = path
        self.line = line
        location = ""
        if path:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        prefix = f"{key}: " if key else ""
        super().__init__(f"{location}{prefix}{message}")


class TemplateError(FLSimError):
    """Unknown template or refused overwrite"""


class RegistryError(FLSimError):
    """Unknown or duplicate algorithm name"""


class ProtocolError(FLSimError):
    """The synchronous round contract was violated"""


class UnregisteredActorError(ProtocolError):
    """A message was addressed to an actor the channel does not know"""


class NoMessageError(ProtocolError):
    """No matching message is waiting in a mailbox"""


class IncompatibleParamsError(FLSimError):
    """Two parameter sets differ in names, order or shapes"""


class AggregationError(FLSimError):
    """Client models cannot be combined"""


class DataError(FLSimError):
    """Dataset cannot be built or parsed"""


class PartitionError(DataError):
    """A partition spec is infeasible for the dataset"""


_CONFIG_CLASS_ERRORS = (ConfigError, TemplateError, RegistryError)


class ErrorService:
    """
    Service for recording errors and mapping them to process exit codes
    """

    def __init__(self):
        """
        Initialize the error service
        """
        self.error_log: List[Dict[str, Any]] = []

    def log_error(self, error: Exception, context: str = "") -> Dict[str, Any]:
        """
        Log an error with context
        """
        error_info = {
            'timestamp': time.time(),
            'error_type': type(error).__name__,
            'error_message': str(error),
            'context': context,
            'exit_code': self.exit_code_for(error),
        }
        self.error_log.append(error_info)
        logger.error(f"{context or 'run'} failed with {error_info['error_type']}: {error_info['error_message']}")
        return error_info

    @staticmethod
    def exit_code_for(error: Exception) -> int:
        """
        Map an exception to the CLI exit code
        """
        if isinstance(error, _CONFIG_CLASS_ERRORS):
            return EXIT_CONFIG_ERROR
        return EXIT_RUNTIME_ERROR

    def get_error_summary(self) -> Dict[str, Any]:
        """
        Get a summary of recorded errors
        """
        error_types: Dict[str, int] = {}
        for error_info in self.error_log:
            error_type = error_info['error_type']
            error_types[error_type] = error_types.get(error_type, 0) + 1

        return {
            'total_errors': len(self.error_log),
            'error_types': error_types,
            'last_error': self.error_log[-1] if self.error_log else None,
        }
