"""
Tabular output for zeta-boundary-terms.

Tables are pandas DataFrames. CSV files start with ``# key: value`` metadata
lines followed by the header row; floats are written with 17 significant
digits so numeric columns round-trip exactly. JSON files hold
``{"metadata": {...}, "rows": [...]}`` or, for summaries,
``{"metadata": {...}, "summary": {...}}``.
"""

import json
import logging
import math
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd

from .dirichlet import CoeffSeries
from .exceptions import ValidationError
from .metadata import RunMetadata

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def validate_format(fmt: str) -> str:
    """
    Validate an output format name.

    Raises:
        ValidationError: If the format is not csv or json
    """
    fmt = str(fmt).lower()
    if fmt not in FORMATS:
        raise ValidationError(f"Invalid format. Must be one of: {', '.join(FORMATS)}, got: {fmt}")
    return fmt


def _json_value(value: Any) -> Any:
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportWriter:
    """
    Writer for result tables and summaries that embeds run metadata.

    Args:
        metadata: Reproducibility header written into every file
        fmt: "csv" or "json"
    """

    def __init__(self, metadata: RunMetadata, fmt: str = "csv"):
        self.metadata = metadata
        self.fmt = validate_format(fmt)

    def render_table(self, df: pd.DataFrame) -> str:
        """Render a table as text in the writer's format."""
        if self.fmt == "csv":
            body = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            return "\n".join(self.metadata.header_lines()) + "\n" + body

        rows = [
            {column: _json_value(value) for column, value in row.items()}
            for row in df.to_dict(orient="records")
        ]
        return json.dumps({"metadata": self.metadata.to_dict(), "rows": rows}, indent=2) + "\n"

    def render_summary(self, summary: Dict[str, Any]) -> str:
        """Render a summary mapping; CSV output uses one key,value row per entry."""
        if self.fmt == "json":
            payload = {
                "metadata": self.metadata.to_dict(),
                "summary": {k: _json_value(v) for k, v in summary.items()},
            }
            return json.dumps(payload, indent=2) + "\n"

        df = pd.DataFrame(
            {"key": list(summary), "value": [json.dumps(_json_value(v)) for v in summary.values()]}
        )
        return self.render_table(df)

    def write_table(self, df: pd.DataFrame, path: PathLike) -> Path:
        return self.write_text(self.render_table(df), path, len(df))

    def write_summary(self, summary: Dict[str, Any], path: PathLike) -> Path:
        return self.write_text(self.render_summary(summary), path, len(summary))

    def write_text(self, text: str, path: PathLike, rows: int) -> Path:
        target = Path(path)
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {rows} rows ({self.fmt}) to {target}")
        return target


def _split_header(text: str) -> Tuple[Dict[str, str], str]:
    metadata: Dict[str, str] = {}
    lines = text.splitlines(keepends=True)
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("# "):
            body_start = i
            break
        key, _, value = line[2:].rstrip("\n").partition(": ")
        metadata[key] = value
    else:
        body_start = len(lines)
    return metadata, "".join(lines[body_start:])


def read_table(path: PathLike) -> Tuple[RunMetadata, pd.DataFrame]:
    """
    Read a table written by ReportWriter.

    Returns:
        (metadata, table)
    """
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows: List[Dict[str, Any]] = payload.get("rows", [])
        return RunMetadata.from_dict(payload.get("metadata", {})), pd.DataFrame(rows)

    header, body = _split_header(text)
    df = (
        pd.read_csv(StringIO(body), float_precision="round_trip")
        if body.strip()
        else pd.DataFrame()
    )
    return RunMetadata.from_dict(header), df


def coeff_frame(series: CoeffSeries) -> pd.DataFrame:
    """Nonzero coefficients of a series as columns index,value."""
    return series.to_frame()


def write_coeff_csv(
    series: CoeffSeries, path: PathLike, metadata: Optional[RunMetadata] = None
) -> Path:
    """Write the nonzero coefficients of a series as CSV (header ``index,value``)."""
    meta = metadata or RunMetadata("coeffs", "", "", extra={"label": series.label})
    return ReportWriter(meta, "csv").write_table(coeff_frame(series), path)


def read_coeff_csv(path: PathLike, limit: Optional[int] = None) -> CoeffSeries:
    """
    Rebuild a series from an ``index,value`` table.

    Args:
        path: CSV or JSON file
        limit: Series length; defaults to the largest index present
    """
    meta, df = read_table(path)
    if not {"index", "value"}.issubset(df.columns):
        raise ValidationError(f"Invalid coefficient table {path}. Needs columns index,value")
    indices = df["index"].astype(int).to_numpy()
    n = limit if limit is not None else int(indices.max()) if indices.size else 1
    values = [0.0] * n
    for index, value in zip(indices, df["value"].astype(float)):
        if 1 <= index <= n:
            values[index - 1] = float(value)
    return CoeffSeries(values, label=str(meta.extra.get("label", Path(path).stem)))


def create_report_writer(
    command: str, config: Dict[str, Any], fmt: str = "csv", seed: Optional[int] = None, **extra: Any
) -> ReportWriter:
    """
    Convenience function to create a ReportWriter for a resolved configuration.

    Args:
        command: Producing subcommand
        config: Resolved configuration
        fmt: Output format
        seed: Seed of the run
        **extra: Additional metadata fields

    Returns:
        Configured ReportWriter instance
    """
    from .metadata import create_run_metadata

    return ReportWriter(create_run_metadata(command, config, seed, **extra), fmt)
