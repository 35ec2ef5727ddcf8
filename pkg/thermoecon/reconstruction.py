"""Builders for the reconstructed historical datasets.

Every builder is a pure function of its inputs and a `ReconstructionConfig`.
Outputs carry these labels: Y_Rep, E_Rep, Y_RepMorris, E_RepMorris,
W_sum_LW, W_sum_RepMorris, W_LW_proj and Pop.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import CsvTableSpec, ExpParameters, ReconstructionConfig, ValueColumn
from .exceptions import ReconstructionError, SeriesError, UnitError
from .ingest import read_series
from .series import (
    AnnualSeries,
    YearRange,
    cumulative_sum,
    fill_exponential,
    fill_linear,
    fill_proportional,
    restrict,
    splice,
)
from .units import (
    EJ,
    KCAL_PER_CAPITA_DAY,
    PERSON,
    UnitTag,
    energy_to_gk_dollars,
    kcal_capture_to_ej_per_year,
    trillion_usd,
    twh_series_to_ej,
)

_LOGGER = logging.getLogger(__name__)

MORRIS_GROUPS = ("west", "east", "americas", "hunter_gatherer")
HUNTER_GATHERER = "hunter_gatherer"
KCAL_FLOOR = 4000.0
BUNDLED_MORRIS = Path(__file__).parent / "data" / "morris_kcal.csv"
# quoted figure for 150,000 years of 1M foragers, kept next to the computed one
STATED_DEEP_TIME_TRILLIONS = 9.2


class InterpolationMethod(str, Enum):
    """Interpolation of pre-1800 energy."""

    Exponential = "A"
    Population = "B"

    @classmethod
    def parse(cls, value: Union[str, "InterpolationMethod"]) -> "InterpolationMethod":
        """Return the method for "A" or "B"."""
        try:
            return cls(value)
        except ValueError:
            raise ReconstructionError(
                f"unknown interpolation method {value!r}, expected A or B"
            ) from None


@dataclass(frozen=True)
class MorrisTable:
    """Per-capita daily energy capture by civilization and its population shares.

    Shares are the 1 CE population split and are held constant over the
    whole extension.
    """

    kcal: Dict[str, AnnualSeries]
    shares: Dict[str, float]
    provenance: str = "transcription-required"

    def __post_init__(self) -> None:
        if set(self.kcal) != set(self.shares):
            raise ReconstructionError(
                "Morris table groups and population shares do not match"
            )
        if any(share < 0 for share in self.shares.values()):
            raise ReconstructionError("population shares must not be negative")
        total = math.fsum(self.shares.values())
        if abs(total - 1.0) > 1e-9:
            raise ReconstructionError(f"population shares sum to {total}, not 1")
        for group, rows in self.kcal.items():
            if np.any(rows.values < 0):
                year = int(rows.years[rows.values < 0][0])
                raise ReconstructionError(f"kcal for {group} is negative in {year}")
            if np.any(rows.values < KCAL_FLOOR):
                year = int(rows.years[rows.values < KCAL_FLOOR][0])
                _LOGGER.warning(
                    f"kcal for {group} in {year} is below the {KCAL_FLOOR:.0f} floor"
                )

    @classmethod
    def from_populations(
        cls,
        kcal: Dict[str, AnnualSeries],
        populations_1ce: Dict[str, float],
        total_1ce: float,
        provenance: str = "transcription-required",
    ) -> "MorrisTable":
        """Build a table whose hunter-gatherer share is the 1 CE remainder."""
        if total_1ce <= 0:
            raise ReconstructionError(f"1 CE population must be positive, got {total_1ce}")
        settled = math.fsum(populations_1ce.values())
        if settled > total_1ce:
            raise ReconstructionError(
                f"civilization populations {settled} exceed the total {total_1ce}"
            )
        shares = {group: pop / total_1ce for group, pop in populations_1ce.items()}
        shares[HUNTER_GATHERER] = (total_1ce - settled) / total_1ce
        return cls(kcal=kcal, shares=shares, provenance=provenance)

    @property
    def groups(self) -> List[str]:
        """Return the civilization names."""
        return list(self.kcal)


@dataclass(frozen=True)
class DeepTimeOffset:
    """W a forager prehistory would add before the extension starts."""

    years: int
    energy_ej: float
    trillions: float
    stated_trillions: float = STATED_DEEP_TIME_TRILLIONS

    def as_report(self) -> dict:
        """Return the offset as a JSON-ready mapping."""
        return {
            "kind": "deep-time-offset",
            "years": self.years,
            "energy_ej": self.energy_ej,
            "trillions": self.trillions,
            "stated_trillions": self.stated_trillions,
        }


@dataclass
class BuildNotes:
    """Non-fatal findings collected while building datasets."""

    warnings: List[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        """Log a warning and keep it."""
        _LOGGER.warning(message)
        self.warnings.append(message)


def _wrap(label: str, ex: SeriesError) -> ReconstructionError:
    return ReconstructionError(f"{label}: {ex}")


def sum_sources(
    sources: Sequence[AnnualSeries], label: str = "energy_total"
) -> AnnualSeries:
    """Add per-source series on the union of their years.

    A source missing in a year contributes nothing to that year.
    """
    if not sources:
        raise ReconstructionError("no sources to sum")
    unit = sources[0].unit
    for source in sources[1:]:
        if source.unit != unit:
            raise UnitError(
                f"cannot sum {source.label} [{source.unit}] with {sources[0].label} [{unit}]"
            )
    years = reduce(np.union1d, [source.years for source in sources])
    total = np.zeros(years.size, dtype=float)
    for source in sources:
        total[np.searchsorted(years, source.years)] += source.values
    return AnnualSeries(label, unit, years, total)


def composite_multipliers(
    anchors: AnnualSeries, shape: AnnualSeries, year_range: YearRange
) -> AnnualSeries:
    """Return anchor/shape at each anchor year, ramped linearly across the range."""
    inside = restrict(anchors, year_range)
    if year_range.start not in inside or year_range.end not in inside:
        raise ReconstructionError(
            f"{anchors.label} needs anchors at {year_range.start} and {year_range.end}"
        )
    grid = year_range.years
    covered = restrict(shape, year_range)
    if len(covered) != grid.size:
        missing = sorted(set(grid.tolist()) - set(covered.years.tolist()))
        raise ReconstructionError(
            f"{shape.label} does not cover {year_range}, missing {missing[0]}"
        )
    shape_at_anchors = covered.values[np.searchsorted(grid, inside.years)]
    if np.any(shape_at_anchors == 0):
        raise ReconstructionError(f"{shape.label} is zero at an anchor year")
    multipliers = inside.values / shape_at_anchors
    return AnnualSeries(
        f"{anchors.label}/{shape.label}",
        UnitTag.ratio(anchors.unit, shape.unit),
        grid,
        np.interp(grid, inside.years, multipliers),
    )


def composite_scale(
    anchors: AnnualSeries, shape: AnnualSeries, year_range: YearRange
) -> AnnualSeries:
    """Follow the yearly shape of one source at the level of another.

    The result is multiplier(y) * shape(y) in the anchor unit, and equals the
    anchor values at the anchor years.
    """
    multipliers = composite_multipliers(anchors, shape, year_range)
    grid = year_range.years
    dense = multipliers.values * restrict(shape, year_range).values
    inside = restrict(anchors, year_range)
    dense[np.searchsorted(grid, inside.years)] = inside.values
    return AnnualSeries(anchors.label, anchors.unit, grid, dense)


def build_y_rep(
    owid_gwp: AnnualSeries,
    fred_gwp: AnnualSeries,
    cfg: ReconstructionConfig = ReconstructionConfig(),
) -> AnnualSeries:
    """Build the composite GWP series Y_Rep.

    Anchors up to ``exponential_until`` are joined geometrically, anchors up
    to ``linear_until`` linearly, the following decades follow the FRED shape
    and the recent years are the OWID values themselves.
    """
    _LOGGER.debug(f"build_y_rep() called with {owid_gwp!r} and {fred_gwp!r}")
    if len(owid_gwp) == 0:
        raise ReconstructionError("OWID GWP series is empty")
    first = int(owid_gwp.years[0])
    last = int(owid_gwp.years[-1])
    if last < cfg.composite_until:
        raise ReconstructionError(
            f"OWID GWP ends in {last}, before {cfg.composite_until}"
        )
    try:
        y = fill_exponential(owid_gwp, YearRange(first, cfg.exponential_until))
        y = fill_linear(y, YearRange(cfg.exponential_until, cfg.linear_until))
        composite = composite_scale(
            y, fred_gwp, YearRange(cfg.linear_until, cfg.composite_until)
        )
        y = splice(splice(y, composite, cfg.linear_until - 1), y, cfg.composite_until)
        if not restrict(y, YearRange(cfg.composite_until, last)).is_consecutive():
            y = fill_linear(y, YearRange(cfg.composite_until, last))
    except SeriesError as ex:
        raise _wrap("Y_Rep", ex) from ex
    return y.relabel("Y_Rep")


def build_e_rep(
    owid_energy_twh: Union[AnnualSeries, Sequence[AnnualSeries]],
    population: AnnualSeries,
    cfg: ReconstructionConfig = ReconstructionConfig(),
    method: Union[str, InterpolationMethod] = InterpolationMethod.Population,
    notes: Optional[BuildNotes] = None,
) -> AnnualSeries:
    """Build the energy series E_Rep in EJ from 1 CE on.

    Per-source TWh series are summed and converted. Year 1 is anchored at
    ``cfg.year1_energy_ej``; the years up to ``energy_anchor_year`` are filled
    geometrically (method A) or along the population curve (method B).
    """
    method = InterpolationMethod.parse(method)
    notes = notes if notes is not None else BuildNotes()
    _LOGGER.debug(f"build_e_rep() called with method {method.value}")
    if isinstance(owid_energy_twh, AnnualSeries):
        total = owid_energy_twh
    else:
        total = sum_sources(owid_energy_twh)
    energy = twh_series_to_ej(total)
    anchor_year = cfg.energy_anchor_year
    recent = energy.as_points()
    recent = [(year, value) for year, value in recent if year >= anchor_year]
    if not recent or recent[0][0] != anchor_year:
        notes.warn(
            f"energy data has no {anchor_year} value, "
            f"using the configured {cfg.e_1800_ej} EJ"
        )
        recent.insert(0, (anchor_year, cfg.e_1800_ej))
    dropped = sum(1 for year, _ in energy.as_points() if year < anchor_year)
    if dropped:
        _LOGGER.debug(f"Ignoring {dropped} energy values before {anchor_year}")
    anchors = AnnualSeries.from_points(
        "E_Rep", EJ, [(1, cfg.year1_energy_ej)] + recent
    )
    last = int(anchors.years[-1])
    try:
        e = fill_linear(anchors, YearRange(anchor_year, last))
        early = YearRange(1, anchor_year)
        if method is InterpolationMethod.Exponential:
            e = fill_exponential(e, early)
        else:
            e = fill_proportional(e, population, early)
    except SeriesError as ex:
        raise _wrap("E_Rep", ex) from ex
    return e.relabel("E_Rep")


def load_morris_table(
    path: Optional[Path] = None, cfg: ReconstructionConfig = ReconstructionConfig()
) -> MorrisTable:
    """Read a wide Morris CSV (year plus one kcal column per civilization)."""
    path = Path(path) if path is not None else BUNDLED_MORRIS
    _LOGGER.debug(f"Loading Morris energy capture rows from {path}")
    spec = CsvTableSpec(
        path=path,
        value_columns=[
            ValueColumn(name=group, unit=KCAL_PER_CAPITA_DAY.symbol)
            for group in MORRIS_GROUPS
        ],
    )
    rows = {series.label: series for series in read_series(spec)}
    provenance = "transcription-required" if path == BUNDLED_MORRIS else str(path)
    return MorrisTable.from_populations(
        rows, cfg.morris_populations_1ce, cfg.morris_total_1ce, provenance=provenance
    )


def build_morris_extension(
    morris: MorrisTable,
    population: AnnualSeries,
    cfg: ReconstructionConfig = ReconstructionConfig(),
    notes: Optional[BuildNotes] = None,
) -> Tuple[AnnualSeries, AnnualSeries]:
    """Return E and Y from ``cfg.morris_start`` through 1 CE.

    Energy is the share-weighted Morris capture times population; Y values
    it at ``cfg.gk_ratio``. The 1 CE energy must agree with
    ``cfg.year1_energy_ej`` within ``cfg.morris_anchor_tolerance``.
    """
    notes = notes if notes is not None else BuildNotes()
    _LOGGER.debug(f"build_morris_extension() called from {cfg.morris_start}")
    span = YearRange(cfg.morris_start, 1)
    people = restrict(population, span)
    if len(people) != len(span):
        raise ReconstructionError(f"population does not cover every year of {span}")
    weighted = np.zeros(len(span), dtype=float)
    for group in morris.groups:
        try:
            rows = fill_linear(morris.kcal[group], span)
        except SeriesError as ex:
            raise _wrap(f"Morris {group}", ex) from ex
        weighted += morris.shares[group] * restrict(rows, span).values
    energy = kcal_capture_to_ej_per_year(weighted, people.values)
    e = AnnualSeries("E_RepMorris", EJ, span.years, energy)
    y = AnnualSeries(
        "Y_RepMorris",
        trillion_usd(cfg.currency_base_year),
        span.years,
        energy_to_gk_dollars(energy, cfg.gk_ratio),
    )
    at_year_1 = e.value_at(1)
    drift = abs(at_year_1 - cfg.year1_energy_ej) / cfg.year1_energy_ej
    if drift > cfg.morris_anchor_tolerance:
        raise ReconstructionError(
            f"Morris energy at 1 CE is {at_year_1:.6g} EJ, {drift:.3%} away from "
            f"the {cfg.year1_energy_ej} EJ anchor"
        )
    if drift > 0:
        notes.warn(f"Morris energy at 1 CE differs from the anchor by {drift:.4%}")
    return e, y


def extend_with_morris(
    morris_part: AnnualSeries, recent: AnnualSeries, label: Optional[str] = None
) -> AnnualSeries:
    """Join the Morris extension (through 1 CE) with a series from 2 CE on."""
    return splice(morris_part, recent, 1, label=label or morris_part.label)


def build_w(
    y: AnnualSeries,
    start: int,
    truncate: int = 0,
    initial: float = 0.0,
    label: str = "W",
) -> AnnualSeries:
    """Sum Y from ``start``, flagging (not removing) the first ``truncate`` years."""
    _LOGGER.debug(f"build_w() called for {y.label} from {start}, truncate {truncate}")
    if truncate < 0:
        raise ReconstructionError(f"truncation must not be negative, got {truncate}")
    try:
        w = cumulative_sum(y, start, label=label)
    except SeriesError as ex:
        raise _wrap(label, ex) from ex
    if initial:
        w = w.map(lambda values: values + initial)
    return w.with_flag(start + truncate - 1 if truncate else None)


def project_w_lw_backward(
    fit: Union[ExpParameters, Tuple[float, float]],
    year_range: YearRange,
    unit: UnitTag = trillion_usd(1990),
) -> AnnualSeries:
    """Evaluate amplitude * exp(rate * year) over a year range."""
    if isinstance(fit, ExpParameters):
        amplitude, rate = fit.amplitude, fit.rate
    else:
        amplitude, rate = fit
    if not amplitude > 0:
        raise ReconstructionError(f"fit amplitude must be positive, got {amplitude}")
    years = year_range.years
    return AnnualSeries(
        "W_LW_proj", unit, years, amplitude * np.exp(rate * years.astype(float))
    )


def build_population(
    sources: Sequence[AnnualSeries], priority: Optional[str] = None
) -> AnnualSeries:
    """Combine population sources into one yearly series.

    At each anchor year the priority source is used where it has a value,
    otherwise the mean of the sources that have one. Years between anchors
    are filled linearly.
    """
    if not sources:
        raise ReconstructionError("no population sources given")
    for source in sources:
        if source.unit != PERSON:
            raise UnitError(f"population source {source.label} is in {source.unit}")
    _LOGGER.debug(
        f"build_population() called with {', '.join(s.label for s in sources)}"
    )
    preferred = next((s for s in sources if s.label == priority), None)
    if priority is not None and preferred is None:
        _LOGGER.debug(f"Priority population source {priority} not present")
    years = reduce(np.union1d, [source.years for source in sources])
    totals = np.zeros(years.size, dtype=float)
    counts = np.zeros(years.size, dtype=int)
    for source in sources:
        idx = np.searchsorted(years, source.years)
        totals[idx] += source.values
        counts[idx] += 1
    values = totals / counts
    if preferred is not None:
        values[np.searchsorted(years, preferred.years)] = preferred.values
    anchors = AnnualSeries("Pop", PERSON, years, values)
    return fill_linear(anchors, anchors.span)


def deep_time_w_offset(
    years: int = 150000,
    kcal_per_cap_day: float = 4000.0,
    population: float = 1e6,
    gk_ratio: float = 0.03827,
) -> DeepTimeOffset:
    """Return the energy and dollars of a forager prehistory before the extension."""
    if years < 0:
        raise ReconstructionError(f"years must not be negative, got {years}")
    energy = kcal_capture_to_ej_per_year(kcal_per_cap_day, population) * years
    return DeepTimeOffset(
        years=years,
        energy_ej=float(energy),
        trillions=float(energy_to_gk_dollars(energy, gk_ratio)),
    )
