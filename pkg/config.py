import os
from typing import Optional
from dataclasses import dataclass, field
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Config:
    """Runtime settings of the simulator (not the experiment documents)"""

    log_level: str = field(default_factory=lambda: os.getenv("FLSIM_LOG_LEVEL", "INFO"))
    log_file: Optional[str] = field(default_factory=lambda: os.getenv("FLSIM_LOG_FILE") or None)

    # Where `get config NAME` writes templates
    template_dir: str = field(default_factory=lambda: os.getenv("FLSIM_TEMPLATE_DIR", "config"))

    # Where dotted algorithm names are looked up when --plugins is not given
    plugins_dir: Optional[str] = field(default_factory=lambda: os.getenv("FLSIM_PLUGINS_DIR") or None)

    def validate(self) -> list[str]:
        """Validate configuration and return list of validation errors"""
        errors = []

        if self.log_level.upper() not in _LOG_LEVELS:
            errors.append(f"FLSIM_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}")

        if not self.template_dir:
            errors.append("FLSIM_TEMPLATE_DIR cannot be empty")

        if self.plugins_dir and not os.path.isdir(self.plugins_dir):
            errors.append(f"FLSIM_PLUGINS_DIR is not a directory: {self.plugins_dir}")

        return errors


def get_config() -> Config:
    """Get the runtime configuration"""
    config = Config()
    validation_errors = config.validate()

    if validation_errors:
        raise ValueError(f"Configuration validation failed: {'; '.join(validation_errors)}")

    return config
