from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

T = TypeVar("T")


class PersistStrategy(ABC, Generic[T]):
    """Abstract base class for persistence strategies.

    Defines the interface for saving and loading run artifacts to/from persistent
    storage. Implementations cover the binary model checkpoint and JSON reports.
    """

    @abstractmethod
    def __repr__(self) -> str:
        """Returns a string representation of the persist strategy.

        Returns:
            A compact summary of the strategy configuration.
        """
        return f"{self.__class__.__name__}()"

    @abstractmethod
    def save(self, data: T, path: Path):
        """Saves data to the specified path.

        Args:
            data: The object to save.
            path: The file path where data will be saved.
        """
        pass

    @abstractmethod
    def load(self, path: Path) -> T:
        """Loads data from the specified path.

        Args:
            path: The file path from which to load data.

        Returns:
            The loaded object.
        """
        pass

    @staticmethod
    def check_target(path: Path):
        """Validate a save target: not a directory, parent exists and is a directory.

        Raises:
            ValueError: If path is a directory or its parent is not a directory.
            FileNotFoundError: If the parent directory doesn't exist.
        """
        if path.exists() and path.is_dir():
            raise ValueError(f"Specified path is a directory, not a file: {path}")
        parent_dir = path.parent
        if not parent_dir.exists():
            raise FileNotFoundError(
                f"Parent directory does not exist: {parent_dir}. Please create the directory first."
            )
        if not parent_dir.is_dir():
            raise ValueError(f"Parent path is not a directory: {parent_dir}")

    @staticmethod
    def check_source(path: Path):
        """Validate a load source: an existing regular file.

        Raises:
            FileNotFoundError: If the file doesn't exist.
            ValueError: If path is a directory or not a regular file.
        """
        if not path.exists():
            raise FileNotFoundError(f"File does not exist: {path}")
        if path.is_dir():
            raise ValueError(f"Specified path is a directory, not a file: {path}")
        if not path.is_file():
            raise ValueError(f"Path exists but is not a regular file: {path}")
