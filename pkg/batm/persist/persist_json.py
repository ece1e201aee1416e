import json
from pathlib import Path
from typing import Generic, TypeVar

from pydantic import BaseModel

from .base import PersistStrategy

M = TypeVar("M", bound=BaseModel)


class SingleJsonFilePersistStrategy(PersistStrategy[M], Generic[M]):
    """Saves and loads one pydantic model as a pretty-printed JSON file.

    Used for the run reports: evaluation metrics, entropy and coherence reports,
    gradient-check summaries and seed summaries.
    """

    def __init__(self, model_type: type[M]):
        """Initializes the strategy for one model type."""
        self.model_type = model_type

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(model_type={self.model_type.__name__})"

    def save(self, data: M, path: Path):
        """Saves a model to a JSON file.

        Raises:
            ValueError: If path is a directory or parent directory issues.
            FileNotFoundError: If parent directory doesn't exist.
            RuntimeError: If saving fails due to other errors.
        """
        self.check_target(path)
        try:
            path.write_text(data.model_dump_json(indent=2, by_alias=True), encoding="utf-8")
        except Exception as e:
            raise RuntimeError(f"Error saving {self.model_type.__name__} to file {path}: {e}")

    def load(self, path: Path) -> M:
        """Loads a model from a JSON file.

        Raises:
            FileNotFoundError: If the file doesn't exist.
            ValueError: If path is a directory or not a regular file.
            json.JSONDecodeError: If file is not valid JSON.
            RuntimeError: If loading fails due to other errors.
        """
        self.check_source(path)
        try:
            json_str = path.read_text(encoding="utf-8")
            json.loads(json_str)
            return self.model_type.model_validate_json(json_str)
        except json.JSONDecodeError as e:
            raise json.JSONDecodeError(f"File {path} is not valid JSON: {e.msg}", e.doc, e.pos)
        except Exception as e:
            raise RuntimeError(f"Error loading {self.model_type.__name__} from {path}: {e}")
