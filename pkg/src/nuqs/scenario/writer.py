__all__ = ["write_records", "write_report", "write_result"]

import csv
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence, TextIO, Union

from nuqs.scenario.config import OutputFormat
from nuqs.scenario.runner import SweepRecord, ValidationReport
from nuqs.utils.exceptions import ConfigError

# config logger
logger = logging.getLogger(__name__)

FIELDNAMES: list[str] = list(SweepRecord.model_fields)
"""CSV columns, in output order"""


@contextmanager
def _atomic_open(path: Union[str, Path]) -> Iterator[TextIO]:
    """Writes to a temporary sibling of ``path`` and moves it into place on success"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w",
        dir=path.parent,
        prefix=f".{path.name}.",
        suffix=".tmp",
        newline="",
        encoding="utf-8",
        delete=False,
    ) as f:
        tmp = Path(f.name)
        try:
            yield f
            f.flush()
            os.fsync(f.fileno())
        except BaseException:
            f.close()
            tmp.unlink(missing_ok=True)
            raise
    os.replace(tmp, path)


def _row(record: SweepRecord) -> dict:
    # repr keeps every float exactly round-trippable
    return {
        key: repr(value) if isinstance(value, float) else value
        for key, value in record.model_dump().items()
    }


def write_records(
    records: Sequence[SweepRecord],
    path: Union[str, Path],
    output_format: Union[OutputFormat, str] = OutputFormat.CSV,
) -> Path:
    """Writes sweep records as CSV (one row per record) or a JSON list

    The file only appears once it is completely written.

    Args:
        records (Sequence[SweepRecord]): Records in output order
        path (Union[str, Path]): Destination, parent folders are created
        output_format (Union[OutputFormat, str], optional): ``csv`` or ``json``.
            Defaults to ``csv``.

    Returns:
        Path: ``path``
    """
    output_format = OutputFormat.from_name(output_format)
    path = Path(path)
    with _atomic_open(path) as f:
        if output_format is OutputFormat.CSV:
            writer = csv.DictWriter(f, fieldnames=FIELDNAMES)
            writer.writeheader()
            writer.writerows(_row(record) for record in records)
        else:
            json.dump([record.model_dump() for record in records], f, indent=2)
            f.write("\n")
    logger.info(f"Wrote {len(records)} records to '{path}'.")
    return path


def write_report(report: ValidationReport, path: Union[str, Path]) -> Path:
    """Writes the validation report as JSON"""
    path = Path(path)
    with _atomic_open(path) as f:
        f.write(report.model_dump_json(indent=2))
        f.write("\n")
    logger.info(f"Wrote validation report to '{path}'.")
    return path


def write_result(
    result: Union[Sequence[SweepRecord], ValidationReport],
    path: Union[str, Path],
    output_format: Union[OutputFormat, str] = OutputFormat.CSV,
) -> Path:
    """Dispatches to :func:`write_report` or :func:`write_records`

    Raises:
        ConfigError: If a validation report is requested as CSV
    """
    if isinstance(result, ValidationReport):
        if OutputFormat.from_name(output_format) is not OutputFormat.JSON:
            raise ConfigError("The validation report can only be written as JSON.")
        return write_report(result, path)
    return write_records(result, path, output_format)
