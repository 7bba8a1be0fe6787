"""
Exceptions raised by the command-line pipeline.
"""

from pathlib import Path
from typing import Optional, Union

EMPTY = "empty"
HEADER = "header"
RAGGED = "ragged"
NON_NUMERIC = "non_numeric"


class DataFormatError(ValueError):
    """
    Raised when an input table cannot be read as a numeric data set.

    Attributes:
        path (str): The offending file.
        kind (str): One of 'empty', 'header', 'ragged', 'non_numeric'.
        row (Optional[int]): One-based data row (the header is row 0), if known.
        column (Optional[str]): Column name, if known.
    """

    def __init__(
        self,
        path: Union[str, Path],
        kind: str,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
    ):
        self.path = str(path)
        self.kind = kind
        self.row = row
        self.column = column
        location = ""
        if row is not None:
            location += f" row {row}"
        if column is not None:
            location += f" column '{column}'"
        super().__init__(f"{self.path}{location}: {message}")


class ConfigError(ValueError):
    """Raised for an unreadable run configuration or an unknown option value."""
