#
# tablefile - CSV tables and JSON configuration files for the harness.
#

import json
import logging
import sys
from dataclasses import asdict, is_dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.4e"
EXACT_FLOAT_FORMAT = "%.17g"
STDOUT = "-"


def data_from_json_file(filepath: str) -> dict:
    """
    Load a JSON object from a file.

    Args:
        filepath: Path to the JSON file

    Returns:
        dict: The parsed object

    Raises:
        OSError: If the file cannot be read
        ValueError: If the file is not a JSON object
    """
    try:
        with open(filepath, "r", encoding="utf-8") as jsonfile:
            anobj = json.load(jsonfile)
    except OSError as err:
        raise OSError(f"Failed reading config file {filepath}: {err}") from err
    except json.JSONDecodeError as err:
        raise ValueError(f"Config file {filepath} is not valid JSON: {err}") from err
    if not isinstance(anobj, dict):
        raise ValueError(f"Config file {filepath} must hold a JSON object, got {type(anobj).__name__}")
    return anobj


def _as_record(row) -> Mapping:
    if is_dataclass(row):
        return asdict(row)
    return dict(row)


def rows_to_frame(rows: Iterable, columns: Sequence[str], rename: Optional[Mapping[str, str]] = None) -> pd.DataFrame:
    """
    Collect dataclass or dict rows into a DataFrame with fixed column order.

    Args:
        rows: Row objects
        columns: Field names to keep, in output order
        rename: Optional field name to column header mapping
        float_format: printf-style float format, EXACT_FLOAT_FORMAT for values read back as data

    Returns:
        pd.DataFrame: One row per input row; header-only when rows is empty
    """
    records = [_as_record(row) for row in rows]
    frame = pd.DataFrame.from_records(records, columns=list(columns))
    if rename:
        frame = frame.rename(columns=dict(rename))
    return frame


def emit_csv(
    rows: Union[pd.DataFrame, Iterable],
    path: str = STDOUT,
    columns: Optional[Sequence[str]] = None,
    rename: Optional[Mapping[str, str]] = None,
    float_format: str = FLOAT_FORMAT,
) -> pd.DataFrame:
    """
    Write a table as CSV, floats with 5 significant digits unless float_format says otherwise.

    Args:
        rows: A DataFrame, or dataclass/dict rows collected with ``rows_to_frame``
        path: Output path, "-" for stdout
        columns: Field names in output order, required for rows
        rename: Optional field name to column header mapping
        float_format: printf-style float format, EXACT_FLOAT_FORMAT for values read back as data

    Returns:
        pd.DataFrame: The table as written

    Note:
        Missing values are written as empty fields and an empty table gives a
        header-only file.

    Raises:
        OSError: If the file cannot be written
    """
    if isinstance(rows, pd.DataFrame):
        frame = rows
    else:
        if columns is None:
            raise ValueError("columns are required when writing rows")
        frame = rows_to_frame(rows, columns, rename)
    kwargs = dict(index=False, float_format=float_format, na_rep="", lineterminator="\n")
    if path == STDOUT:
        frame.to_csv(sys.stdout, **kwargs)
        return frame
    try:
        frame.to_csv(path, **kwargs)
    except OSError as err:
        raise OSError(f"Failed writing table {path}: {err}") from err
    logger.info("wrote %d rows to %s", len(frame), path)
    return frame


def read_table_csv(path: str) -> pd.DataFrame:
    """
    Read a table written by ``emit_csv``.

    Raises:
        OSError: If the file cannot be read
    """
    try:
        return pd.read_csv(path)
    except OSError as err:
        raise OSError(f"Failed reading table {path}: {err}") from err


def parse_int_list(text: Union[str, List[int]]) -> List[int]:
    """Parse '32,64,128' into [32, 64, 128]."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError as err:
        raise ValueError(f"bad integer list {text!r}: {err}") from err
