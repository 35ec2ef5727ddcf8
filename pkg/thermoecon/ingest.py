"""Read external CSV tables into series and write results back out.

Year cells are either plain signed integers, taken as astronomical years
(0 is 1 BCE), or historical labels such as ``"500 BCE"``, ``"44 BC"``,
``"1 CE"`` or ``"-14,000 CE"``. Historical labels have no year 0, so
``n BCE`` and ``-n CE`` both become ``1 - n``.
"""
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .config import CsvTableSpec, NaPolicy, SupplementMapping, ValueColumn
from .exceptions import IngestError, SeriesError, ThermoEconException
from .series import AnnualSeries
from .units import EJ, PERSON, UnitTag, trillion_usd

_LOGGER = logging.getLogger(__name__)

OUTPUT_COLUMNS = ["year", "value", "unit", "label"]
_YEAR_PATTERN = re.compile(r"([+-]?\d[\d,]*)\s*(BCE|BC|CE|AD)?", re.IGNORECASE)


@dataclass(frozen=True)
class SupplementColumns:
    """The Lotka's Wheel supplement: Y, E, W and W/E by year."""

    y: AnnualSeries
    e: AnnualSeries
    w: AnnualSeries
    w_over_e: AnnualSeries
    population: Optional[AnnualSeries] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def by_label(self) -> Dict[str, AnnualSeries]:
        """Return the columns keyed by series label."""
        columns = [self.y, self.e, self.w, self.w_over_e, self.population]
        return {series.label: series for series in columns if series is not None}


def parse_year(text: str) -> int:
    """Return the astronomical year of a year cell."""
    match = _YEAR_PATTERN.fullmatch(text.strip())
    if match is None:
        raise ValueError(f"not a year: {text!r}")
    number = int(match.group(1).replace(",", ""))
    era = (match.group(2) or "").upper()
    if era in ("BCE", "BC"):
        if number <= 0:
            raise ValueError(f"BCE years count from 1: {text!r}")
        return 1 - number
    if era in ("CE", "AD"):
        if number == 0:
            raise ValueError(f"there is no year 0 CE: {text!r}")
        return number if number > 0 else number + 1
    return number


def _parse_value(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"value is not finite: {text!r}")
    return value


def _read_table(path: Path, delimiter: str = ",") -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            sep=delimiter,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except FileNotFoundError:
        raise IngestError("file not found", path=str(path)) from None
    except pd.errors.EmptyDataError:
        raise IngestError("file is empty", path=str(path)) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as ex:
        raise IngestError(f"malformed table: {ex}", path=str(path)) from ex


def _require_columns(frame: pd.DataFrame, names: Iterable[str], path: Path) -> None:
    for name in names:
        if name not in frame.columns:
            raise IngestError(f"missing column {name!r}", path=str(path), line=1)


def _column_series(
    frame: pd.DataFrame,
    years: Sequence[Tuple[int, int]],
    column: ValueColumn,
    spec: CsvTableSpec,
) -> AnnualSeries:
    path = str(spec.path)
    points: Dict[int, float] = {}
    for (line, year), cell in zip(years, frame[column.name]):
        if not cell.strip():
            if spec.na_policy == NaPolicy.Error:
                raise IngestError(f"empty {column.name!r} value", path=path, line=line)
            continue
        try:
            value = _parse_value(cell) * column.scale
        except ValueError as ex:
            raise IngestError(str(ex), path=path, line=line) from None
        if year in points:
            raise IngestError(f"duplicate year {year}", path=path, line=line)
        points[year] = value
    try:
        return AnnualSeries.from_mapping(column.series_label, column.unit_tag, points)
    except SeriesError as ex:
        raise IngestError(str(ex), path=path) from ex


def read_series(spec: CsvTableSpec) -> List[AnnualSeries]:
    """Read one unit-tagged series per declared value column."""
    _LOGGER.debug(f"Reading {len(spec.value_columns)} columns from {spec.path}")
    frame = _read_table(spec.path, spec.delimiter)
    _require_columns(
        frame, [spec.year_column] + [c.name for c in spec.value_columns], spec.path
    )
    years = []
    for index, cell in enumerate(frame[spec.year_column]):
        line = index + 2
        try:
            years.append((line, parse_year(cell)))
        except ValueError as ex:
            raise IngestError(str(ex), path=str(spec.path), line=line) from None
    return [_column_series(frame, years, column, spec) for column in spec.value_columns]


def read_supplement(
    path: Union[str, Path], mapping: SupplementMapping = SupplementMapping()
) -> SupplementColumns:
    """Read the supplement export and cross-check its W/E column.

    Rows where W/E disagrees with W divided by E by more than the mapping
    tolerance are reported as warnings, not errors.
    """
    path = Path(path)
    currency = trillion_usd(mapping.currency_base_year)
    columns = [
        ValueColumn(name=mapping.y, unit=currency.symbol, label="Y_LW"),
        ValueColumn(name=mapping.e, unit=EJ.symbol, label="E_LW"),
        ValueColumn(name=mapping.w, unit=currency.symbol, label="W_LW"),
        ValueColumn(
            name=mapping.w_over_e,
            unit=UnitTag.ratio(currency, EJ).symbol,
            label="W_over_E",
        ),
    ]
    header = _read_table(path).columns
    if mapping.population is not None and mapping.population in header:
        columns.append(
            ValueColumn(name=mapping.population, unit=PERSON.symbol, label="Pop_LW")
        )
    spec = CsvTableSpec(path=path, year_column=mapping.year, value_columns=columns)
    read = read_series(spec)
    y, e, w, w_over_e = read[:4]
    population = read[4] if len(read) > 4 else None
    warnings = _cross_check(w, e, w_over_e, mapping.cross_check_tolerance)
    return SupplementColumns(y, e, w, w_over_e, population, warnings)


def _cross_check(
    w: AnnualSeries, e: AnnualSeries, w_over_e: AnnualSeries, tolerance: float
) -> List[str]:
    warnings = []
    stated = dict(w_over_e.as_points())
    energy = dict(e.as_points())
    for year, total in w.as_points():
        if year not in stated or not energy.get(year):
            continue
        computed = total / energy[year]
        expected = stated[year]
        scale = abs(expected) if expected else abs(computed)
        if scale and abs(computed - expected) / scale > tolerance:
            message = (
                f"year {year}: W/E is {computed:.6g}, "
                f"W_over_E column says {expected:.6g}"
            )
            _LOGGER.warning(message)
            warnings.append(message)
    return warnings


def _report_dict(report: Any) -> Dict[str, Any]:
    if hasattr(report, "as_report"):
        return report.as_report()
    if isinstance(report, dict):
        return report
    raise IngestError(f"cannot export report of type {type(report).__name__}")


def _series_frame(series: AnnualSeries) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "year": series.years,
            "value": series.values,
            "unit": series.unit.symbol,
            "label": series.label,
        },
        columns=OUTPUT_COLUMNS,
    )


def _dump_json(document: Dict[str, Any]) -> str:
    try:
        return json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n"
    except ValueError as ex:
        raise IngestError(f"cannot serialize report: {ex}") from ex


def write_outputs(
    series: Sequence[AnnualSeries],
    reports: Sequence[Any] = (),
    fmt: str = "csv",
    path: Union[str, Path] = "out",
) -> List[Path]:
    """Write series and reports, returning the files written.

    ``csv`` writes one ``<label>.csv`` per series into the ``path`` directory
    (plus ``reports.json`` when there are reports); ``json`` writes a single
    document to the file ``path``.
    """
    path = Path(path)
    documents = [_report_dict(report) for report in reports]
    _LOGGER.debug(f"Writing {len(series)} series as {fmt} to {path}")
    written = []
    try:
        if fmt == "csv":
            path.mkdir(parents=True, exist_ok=True)
            for item in series:
                target = path / f"{item.label}.csv"
                _series_frame(item).to_csv(
                    target,
                    index=False,
                    float_format="%.17g",
                    lineterminator="\n",
                    encoding="utf-8",
                )
                written.append(target)
            if documents:
                target = path / "reports.json"
                target.write_text(_dump_json({"reports": documents}), encoding="utf-8")
                written.append(target)
        elif fmt == "json":
            path.parent.mkdir(parents=True, exist_ok=True)
            document = {
                "series": [
                    {
                        "label": item.label,
                        "unit": item.unit.symbol,
                        "flagged_through": item.flagged_through,
                        "points": [[year, value] for year, value in item.as_points()],
                    }
                    for item in series
                ],
                "reports": documents,
            }
            path.write_text(_dump_json(document), encoding="utf-8")
            written.append(path)
        else:
            raise IngestError(f"unknown output format {fmt!r}, expected csv or json")
    except OSError as ex:
        raise IngestError(f"cannot write outputs: {ex}", path=str(path)) from ex
    return written


def read_output_csv(path: Union[str, Path]) -> AnnualSeries:
    """Read a series file written by `write_outputs`."""
    path = Path(path)
    frame = _read_table(path)
    _require_columns(frame, OUTPUT_COLUMNS, path)
    if frame.empty:
        raise IngestError("series file has no rows", path=str(path))
    try:
        return AnnualSeries(
            frame["label"].iloc[0],
            UnitTag.parse(frame["unit"].iloc[0]),
            [int(year) for year in frame["year"]],
            [float(value) for value in frame["value"]],
        )
    except (ValueError, ThermoEconException) as ex:
        raise IngestError(str(ex), path=str(path)) from ex


def read_outputs_json(
    path: Union[str, Path]
) -> Tuple[List[AnnualSeries], List[Dict[str, Any]]]:
    """Read a document written by `write_outputs` in json format."""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IngestError("file not found", path=str(path)) from None
    except json.JSONDecodeError as ex:
        raise IngestError(
            f"malformed JSON: {ex.msg}", path=str(path), line=ex.lineno
        ) from None
    try:
        series = [
            AnnualSeries.from_points(
                entry["label"],
                UnitTag.parse(entry["unit"]),
                [(int(year), float(value)) for year, value in entry["points"]],
                flagged_through=entry.get("flagged_through"),
            )
            for entry in document["series"]
        ]
    except (KeyError, TypeError, ValueError, ThermoEconException) as ex:
        raise IngestError(f"malformed series entry: {ex}", path=str(path)) from ex
    return series, list(document.get("reports", []))
