import logging
import os
from importlib import resources
from typing import List

from services.error_service import TemplateError

logger = logging.getLogger(__name__)

TEMPLATE_PACKAGE = "templates"


class TemplateService:
    """
    Service for copying the bundled configuration templates to disk
    """

    def __init__(self, destination: str = "config"):
        """
        Initialize the template service with the directory templates go to
        """
        self.destination = destination

    @staticmethod
    def list_templates() -> List[str]:
        """
        Names of the bundled templates
        """
        return sorted(
            entry.name[:-len(".yaml")]
            for entry in resources.files(TEMPLATE_PACKAGE).iterdir()
            if entry.name.endswith(".yaml")
        )

    @staticmethod
    def read_template(name: str) -> str:
        if name not in TemplateService.list_templates():
            raise TemplateError(
                f"Unknown template '{name}'; available: {', '.join(TemplateService.list_templates())}"
            )
        return resources.files(TEMPLATE_PACKAGE).joinpath(f"{name}.yaml").read_text(encoding="utf-8")

    def get_template(self, name: str, force: bool = False) -> str:
        """
        Write template `name` to <destination>/<name>.yaml and return the path
        """
        text = self.read_template(name)
        path = os.path.join(self.destination, f"{name}.yaml")
        if os.path.exists(path) and not force:
            raise TemplateError(f"{path} already exists; pass --force to overwrite")

        os.makedirs(self.destination, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Template '{name}' written to {path}")
        return path
