"""Immutable annual time series and the grid operations every dataset goes through.

Years are astronomical integers: year 0 exists and stands for 1 BCE, so the
grid has no holes across the calendar era boundary. Series are never smoothed;
sparse series must be resampled with one of the ``fill_*`` operations before
they are differenced or summed.
"""
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from .exceptions import SeriesError, UnitError
from .units import UnitTag


@dataclass(frozen=True)
class YearRange:
    """An inclusive range of calendar years."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise SeriesError(f"year range starts after it ends: {self.start}..{self.end}")

    @property
    def span(self) -> int:
        """Number of year steps between start and end."""
        return self.end - self.start

    @property
    def years(self) -> np.ndarray:
        """Every integer year in the range."""
        return np.arange(self.start, self.end + 1, dtype=np.int64)

    def __contains__(self, year: object) -> bool:
        return isinstance(year, (int, np.integer)) and self.start <= year <= self.end

    def __len__(self) -> int:
        return self.span + 1

    def __str__(self) -> str:
        return f"{self.start}..{self.end}"


class AnnualSeries:
    """Ordered (year, value) pairs with a label and a unit tag.

    Instances never change after construction; the year and value arrays are
    read-only. ``flagged_through`` optionally marks every year up to and
    including it as unreliable without removing those points.
    """

    def __init__(
        self,
        label: str,
        unit: UnitTag,
        years: Iterable[int],
        values: Iterable[float],
        flagged_through: Optional[int] = None,
    ) -> None:
        if not label:
            raise SeriesError("series label must not be empty")
        if not isinstance(unit, UnitTag):
            raise UnitError(f"series {label} has no unit tag")
        if not isinstance(years, np.ndarray):
            years = list(years)
        year_array = np.asarray(years)
        value_array = np.array(
            list(values) if not isinstance(values, np.ndarray) else values, dtype=float
        )
        if year_array.size == 0:
            year_array = year_array.astype(np.int64)
        if not np.issubdtype(year_array.dtype, np.integer):
            as_int = year_array.astype(np.int64)
            if not np.array_equal(as_int, year_array):
                raise SeriesError(f"series {label} has non-integer years")
            year_array = as_int
        year_array = year_array.astype(np.int64, copy=True)
        if year_array.shape != value_array.shape or year_array.ndim != 1:
            raise SeriesError(f"series {label} has mismatched years and values")
        steps = np.diff(year_array)
        if np.any(steps == 0):
            bad = int(year_array[1:][steps == 0][0])
            raise SeriesError(f"series {label} has a duplicate year {bad}")
        if np.any(steps < 0):
            bad = int(year_array[1:][steps < 0][0])
            raise SeriesError(f"series {label} years are not increasing at {bad}")
        if not np.all(np.isfinite(value_array)):
            bad = int(year_array[~np.isfinite(value_array)][0])
            raise SeriesError(f"series {label} has a non-finite value in {bad}")
        year_array.setflags(write=False)
        value_array.setflags(write=False)
        self._label = label
        self._unit = unit
        self._years = year_array
        self._values = value_array
        self._flagged_through = flagged_through

    @classmethod
    def from_points(
        cls,
        label: str,
        unit: UnitTag,
        points: Iterable[Tuple[int, float]],
        flagged_through: Optional[int] = None,
    ) -> "AnnualSeries":
        """Build a series from (year, value) pairs, sorting them by year."""
        ordered = sorted(points, key=lambda point: point[0])
        return cls(
            label,
            unit,
            [year for year, _ in ordered],
            [value for _, value in ordered],
            flagged_through=flagged_through,
        )

    @classmethod
    def from_mapping(
        cls, label: str, unit: UnitTag, mapping: Mapping[int, float]
    ) -> "AnnualSeries":
        """Build a series from a year -> value mapping."""
        return cls.from_points(label, unit, mapping.items())

    @property
    def label(self) -> str:
        """Return the series label."""
        return self._label

    @property
    def unit(self) -> UnitTag:
        """Return the unit tag."""
        return self._unit

    @property
    def years(self) -> np.ndarray:
        """Return the (read-only) year array."""
        return self._years

    @property
    def values(self) -> np.ndarray:
        """Return the (read-only) value array."""
        return self._values

    @property
    def flagged_through(self) -> Optional[int]:
        """Return the last year flagged as unreliable, if any."""
        return self._flagged_through

    @property
    def flagged_years(self) -> List[int]:
        """Return the years flagged as unreliable."""
        if self._flagged_through is None:
            return []
        return [int(y) for y in self._years if y <= self._flagged_through]

    @property
    def span(self) -> YearRange:
        """Return the first and last year covered."""
        if len(self) == 0:
            raise SeriesError(f"series {self._label} is empty")
        return YearRange(int(self._years[0]), int(self._years[-1]))

    def __len__(self) -> int:
        return int(self._years.size)

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        return iter(self.as_points())

    def __contains__(self, year: object) -> bool:
        if not isinstance(year, (int, np.integer)):
            return False
        pos = int(np.searchsorted(self._years, year))
        return pos < len(self) and self._years[pos] == year

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (
            self._label == other._label
            and self._unit == other._unit
            and self._flagged_through == other._flagged_through
            and np.array_equal(self._years, other._years)
            and np.array_equal(self._values, other._values)
        )

    def __hash__(self) -> int:
        return hash((self._label, self._unit, len(self)))

    def __repr__(self) -> str:
        if len(self) == 0:
            return f"<AnnualSeries {self._label} [{self._unit}] empty>"
        return f"<AnnualSeries {self._label} [{self._unit}] {self.span} ({len(self)} points)>"

    def as_points(self) -> List[Tuple[int, float]]:
        """Return the series as a list of (year, value) tuples."""
        return [(int(y), float(v)) for y, v in zip(self._years, self._values)]

    def value_at(self, year: int) -> float:
        """Return the value in a year, raising SeriesError if it is absent."""
        pos = int(np.searchsorted(self._years, year))
        if pos >= len(self) or self._years[pos] != year:
            raise SeriesError(f"series {self._label} has no value for year {year}")
        return float(self._values[pos])

    def is_consecutive(self) -> bool:
        """Return True if the series has no gaps in its year grid."""
        return bool(np.all(np.diff(self._years) == 1))

    def map(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        unit: Optional[UnitTag] = None,
        label: Optional[str] = None,
    ) -> "AnnualSeries":
        """Apply a vectorised function to the values."""
        return AnnualSeries(
            label or self._label,
            unit or self._unit,
            self._years,
            np.asarray(func(self._values), dtype=float),
            flagged_through=self._flagged_through,
        )

    def relabel(self, label: str) -> "AnnualSeries":
        """Return the same points under another label."""
        return AnnualSeries(
            label, self._unit, self._years, self._values, self._flagged_through
        )

    def with_flag(self, flagged_through: Optional[int]) -> "AnnualSeries":
        """Return the same points with another unreliable-years flag."""
        return AnnualSeries(
            self._label, self._unit, self._years, self._values, flagged_through
        )

    def without_flagged(self) -> "AnnualSeries":
        """Return only the points not flagged as unreliable."""
        if self._flagged_through is None:
            return self
        keep = self._years > self._flagged_through
        return AnnualSeries(
            self._label, self._unit, self._years[keep], self._values[keep]
        )


def _require_consecutive(series: AnnualSeries, operation: str) -> None:
    gaps = np.nonzero(np.diff(series.years) != 1)[0]
    if gaps.size:
        year = int(series.years[gaps[0]])
        raise SeriesError(
            f"{operation}: series {series.label} has a gap in its year grid after {year}"
        )


def _anchors(
    series: AnnualSeries, year_range: YearRange
) -> Tuple[np.ndarray, np.ndarray]:
    for year in (year_range.start, year_range.end):
        if year not in series:
            raise SeriesError(
                f"series {series.label} has no anchor at {year} for the range {year_range}"
            )
    inside = (series.years >= year_range.start) & (series.years <= year_range.end)
    return series.years[inside], series.values[inside]


def _merge(
    series: AnnualSeries, year_range: YearRange, dense: np.ndarray
) -> AnnualSeries:
    before = series.years < year_range.start
    after = series.years > year_range.end
    return AnnualSeries(
        series.label,
        series.unit,
        np.concatenate([series.years[before], year_range.years, series.years[after]]),
        np.concatenate([series.values[before], dense, series.values[after]]),
        flagged_through=series.flagged_through,
    )


def growth_factor(n0: float, ny: float, span: int) -> float:
    """Return the yearly factor a with n0 * a**span == ny."""
    if not (n0 > 0 and ny > 0):
        raise SeriesError(f"growth factor needs positive endpoints, got {n0} and {ny}")
    if span < 1:
        raise SeriesError(f"growth factor needs a span of at least one year, got {span}")
    return math.exp(math.log(ny / n0) / span)


def fill_exponential(series: AnnualSeries, year_range: YearRange) -> AnnualSeries:
    """Fill every year of the range geometrically between consecutive anchors.

    Each gap between two anchors gets N0 * a**x with a = growth_factor(N0, Ny, gap).
    Anchor values are kept unchanged.
    """
    xs, vs = _anchors(series, year_range)
    if np.any(vs <= 0):
        bad = int(xs[vs <= 0][0])
        raise SeriesError(
            f"exponential fill of {series.label} needs positive anchors, {bad} is not"
        )
    grid = year_range.years
    dense = np.empty(grid.size, dtype=float)
    for x0, x1, n0, ny in zip(xs[:-1], xs[1:], vs[:-1], vs[1:]):
        steps = np.arange(0, x1 - x0, dtype=float)
        a = growth_factor(float(n0), float(ny), int(x1 - x0))
        offset = int(x0 - year_range.start)
        dense[offset : offset + steps.size] = n0 * a**steps
    dense[np.searchsorted(grid, xs)] = vs
    return _merge(series, year_range, dense)


def fill_linear(series: AnnualSeries, year_range: YearRange) -> AnnualSeries:
    """Fill every year of the range linearly between the nearest enclosing anchors."""
    xs, vs = _anchors(series, year_range)
    grid = year_range.years
    dense = np.interp(grid, xs, vs)
    dense[np.searchsorted(grid, xs)] = vs
    return _merge(series, year_range, dense)


def fill_proportional(
    anchors: AnnualSeries, reference: AnnualSeries, year_range: YearRange
) -> AnnualSeries:
    """Fill the range so it follows the shape of a reference series.

    The start anchor is scaled by reference(y)/reference(start); a correction
    factor ramping linearly from 1 at the start to anchor(end)/raw(end) at the
    end makes both anchors match. Interior anchors inside the range are replaced.
    """
    start_value = anchors.value_at(year_range.start)
    end_value = anchors.value_at(year_range.end)
    grid = year_range.years
    inside = restrict(reference, year_range)
    if len(inside) != grid.size:
        missing = sorted(set(grid.tolist()) - set(inside.years.tolist()))
        raise SeriesError(
            f"reference {reference.label} has no value for year {missing[0]}"
        )
    if np.any(inside.values <= 0):
        bad = int(inside.years[inside.values <= 0][0])
        raise SeriesError(f"reference {reference.label} is not positive in {bad}")
    if year_range.span == 0:
        return anchors
    raw = start_value * inside.values / inside.values[0]
    correction = end_value / raw[-1]
    ramp = (grid - year_range.start) / year_range.span
    dense = raw * (1.0 + (correction - 1.0) * ramp)
    dense[0] = start_value
    dense[-1] = end_value
    return _merge(anchors, year_range, dense)


def cumulative_sum(
    series: AnnualSeries, start: int, label: Optional[str] = None
) -> AnnualSeries:
    """Return W(t) = sum of series(i) for i = start..t."""
    keep = series.years >= start
    tail = AnnualSeries(
        series.label, series.unit, series.years[keep], series.values[keep]
    )
    if len(tail) == 0 or tail.years[0] != start:
        raise SeriesError(f"series {series.label} has no value at summation start {start}")
    _require_consecutive(tail, "cumulative_sum")
    return AnnualSeries(
        label or series.label, series.unit, tail.years, np.cumsum(tail.values)
    )


def diff_yoy(series: AnnualSeries, label: Optional[str] = None) -> AnnualSeries:
    """Return the year-on-year difference series(t) - series(t-1)."""
    if len(series) < 2:
        raise SeriesError(f"series {series.label} needs two years to difference")
    _require_consecutive(series, "diff_yoy")
    return AnnualSeries(
        label or f"d{series.label}",
        series.unit,
        series.years[1:],
        np.diff(series.values),
    )


def ratio(
    numerator: AnnualSeries, denominator: AnnualSeries, label: Optional[str] = None
) -> AnnualSeries:
    """Divide two series on the years they share."""
    years, num_idx, den_idx = np.intersect1d(
        numerator.years, denominator.years, assume_unique=True, return_indices=True
    )
    if years.size == 0:
        raise SeriesError(
            f"{numerator.label} and {denominator.label} share no years"
        )
    den = denominator.values[den_idx]
    zero = den == 0
    if np.any(zero):
        raise SeriesError(
            f"{denominator.label} is zero in {int(years[zero][0])}, ratio undefined"
        )
    return AnnualSeries(
        label or f"{numerator.label}/{denominator.label}",
        UnitTag.ratio(numerator.unit, denominator.unit),
        years,
        numerator.values[num_idx] / den,
    )


def add(a: AnnualSeries, b: AnnualSeries, label: Optional[str] = None) -> AnnualSeries:
    """Add two series of the same unit on the years they share."""
    if a.unit != b.unit:
        raise UnitError(f"cannot add {a.label} [{a.unit}] and {b.label} [{b.unit}]")
    years, a_idx, b_idx = np.intersect1d(
        a.years, b.years, assume_unique=True, return_indices=True
    )
    return AnnualSeries(
        label or f"{a.label}+{b.label}",
        a.unit,
        years,
        a.values[a_idx] + b.values[b_idx],
    )


def splice(
    early: AnnualSeries, late: AnnualSeries, at: int, label: Optional[str] = None
) -> AnnualSeries:
    """Join early points (year <= at) with late points (year > at)."""
    if early.unit != late.unit:
        raise UnitError(
            f"cannot splice {early.label} [{early.unit}] onto {late.label} [{late.unit}]"
        )
    head = early.years <= at
    tail = late.years > at
    return AnnualSeries(
        label or early.label,
        early.unit,
        np.concatenate([early.years[head], late.years[tail]]),
        np.concatenate([early.values[head], late.values[tail]]),
    )


def restrict(series: AnnualSeries, year_range: YearRange) -> AnnualSeries:
    """Return the part of a series inside a year range."""
    keep = (series.years >= year_range.start) & (series.years <= year_range.end)
    return AnnualSeries(
        series.label,
        series.unit,
        series.years[keep],
        series.values[keep],
        flagged_through=series.flagged_through,
    )
