"""
Reading and writing of the plain-text tables the pipeline consumes.

Data files carry a header row of variable names followed by one observation
per row in chronological order. Matrix files (restriction Q/q, structural
variances) are bare comma-separated numbers, optionally with a header.
"""

import io
import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.svarmsh.model import InsufficientDataError, TimeSeriesData, minimum_observations
from src.svarmsh.pipeline.errors import EMPTY, HEADER, NON_NUMERIC, RAGGED, DataFormatError

FLOAT_FORMAT = "%.17g"


def _read_text(path: Union[str, Path]) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise RuntimeError(f"Failed to read {path}: {e}") from e


def _parse_frame(path: Union[str, Path], text: str, header: bool) -> pd.DataFrame:
    try:
        return pd.read_csv(
            io.StringIO(text),
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError as e:
        raise DataFormatError(path, EMPTY, "file holds no data.") from e
    except pd.errors.ParserError as e:
        # pandas counts file lines from one, header included
        found = re.search(r"Expected (\d+) fields in line (\d+), saw (\d+)", str(e))
        if found is None:
            raise DataFormatError(path, RAGGED, f"unreadable table: {e}") from e
        expected, line, seen = (int(g) for g in found.groups())
        raise DataFormatError(
            path,
            RAGGED,
            f"expected {expected} fields, found {seen}.",
            row=line - 1 if header else line,
        ) from e


def _read_numeric_table(
    path: Union[str, Path], header: bool
) -> Tuple[Optional[List[str]], np.ndarray]:
    """
    Parses a comma-separated table of finite numbers.

    Quoting follows the usual CSV rules, so a quoted cell may hold commas.

    Returns:
        (names, values): the header names (None without a header) and a
        rows x columns float matrix.

    Raises:
        DataFormatError: For an empty file, a bad header, rows of unequal
                         width or a cell that is not a finite number.
    """
    frame = _parse_frame(path, _read_text(path), header)
    if frame.empty:
        raise DataFormatError(path, EMPTY, "file holds no data.")
    frame = frame.apply(lambda column: column.str.strip())
    width = frame.shape[1]

    names = None
    if header:
        names = ["" if pd.isna(name) else str(name) for name in frame.iloc[0]]
        if any(not name for name in names):
            raise DataFormatError(path, HEADER, "header has an empty variable name.", row=0)
        if len(set(names)) != len(names):
            raise DataFormatError(path, HEADER, f"duplicate variable names in header {names}.", row=0)
        frame = frame.iloc[1:].reset_index(drop=True)
        if frame.empty:
            raise DataFormatError(path, EMPTY, "file has a header but no observations.")

    # rows shorter than the first come back padded at the end
    last = frame.iloc[:, -1]
    short = (last.isna() | (last == "")).to_numpy()
    if width > 1 and np.any(short):
        row = int(np.flatnonzero(short)[0])
        present = int(frame.iloc[row].replace("", np.nan).notna().sum())
        raise DataFormatError(path, RAGGED, f"expected {width} fields, found {present}.", row=row + 1)

    coerced = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(coerced)
    if np.any(bad):
        row, col = (int(i) for i in np.argwhere(bad)[0])
        column = names[col] if names else str(col + 1)
        cell = frame.iat[row, col]
        raise DataFormatError(
            path, NON_NUMERIC, f"value {cell!r} is not a finite number.", row=row + 1, column=column
        )
    # python float parsing is correctly rounded, so %.17g text reads back exactly
    values = np.array([[float(cell) for cell in record] for record in frame.to_numpy()], dtype=float)
    return names, values.reshape(len(frame), width)


def load_csv(path: Union[str, Path], lags: int = 1) -> TimeSeriesData:
    """
    Loads a data set with variables in columns and observations in rows.

    The first `lags` rows become the pre-sample that feeds the first lags.

    Raises:
        DataFormatError: For empty, ragged or non-numeric files.
        InsufficientDataError: If fewer than p + N(p + 1) + 1 rows remain.
    """
    if lags < 1:
        raise ValueError("lags must be at least 1.")
    names, values = _read_numeric_table(path, header=True)
    n_rows, n_variables = values.shape
    required = lags + minimum_observations(n_variables, lags)
    if n_rows < required:
        raise InsufficientDataError(
            n_rows - lags,
            required - lags - 1,
            f"{path}: {n_rows} rows are too few for N = {n_variables}, p = {lags}; "
            f"need at least {required}.",
        )
    return TimeSeriesData.from_observations(values.T, lags, names)


def write_csv(data: TimeSeriesData, path: Union[str, Path]) -> Path:
    """Writes pre-sample and sample rows with full double precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(data.full_sample().T, columns=list(data.variable_names))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def load_matrix(path: Union[str, Path], header: bool = False) -> np.ndarray:
    """Reads a bare numeric matrix; a single column or row comes back two-dimensional."""
    _, values = _read_numeric_table(path, header=header)
    return values


def load_named_matrix(path: Union[str, Path]) -> Tuple[List[str], np.ndarray]:
    """Reads a numeric matrix whose first row names the columns."""
    return _read_numeric_table(path, header=True)
