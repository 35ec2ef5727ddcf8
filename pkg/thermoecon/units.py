"""Unit tags and the fixed conversion constants used by the reconstruction."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

from .exceptions import UnitError

if TYPE_CHECKING:  # pragma: no cover
    from .series import AnnualSeries

_LOGGER = logging.getLogger(__name__)

EJ_PER_TWH = 0.0036
JOULES_PER_KCAL = 4184.0
DAYS_PER_YEAR = 365.25
JOULES_PER_EJ = 1e18

Number = Union[float, np.ndarray]


class UnitKind(Enum):
    """Unit kind enum. The value is the textual symbol used in files."""

    EJ = "EJ"
    TWh = "TWh"
    Joule = "J"
    KcalPerCapitaDay = "kcal_per_capita_day"
    TrillionUSD = "trillion_USD"
    GKDollar = "GK_dollar"
    USDPerEJ = "USD_per_EJ"
    Person = "person"
    Percent = "percent"
    Year = "yr"
    Dimensionless = "1"
    Ratio = "ratio"


_CURRENCY_KINDS = (UnitKind.TrillionUSD, UnitKind.GKDollar)


@dataclass(frozen=True)
class UnitTag:
    """Dimensional tag carried by every AnnualSeries."""

    kind: UnitKind
    base_year: Optional[int] = None
    numerator: Optional["UnitTag"] = None
    denominator: Optional["UnitTag"] = None

    def __post_init__(self) -> None:
        if self.kind == UnitKind.TrillionUSD and self.base_year is None:
            raise UnitError("trillion_USD needs an explicit currency base year")
        if self.base_year is not None and self.kind not in _CURRENCY_KINDS:
            raise UnitError(f"{self.kind.value} cannot carry a base year")
        if self.kind == UnitKind.Ratio:
            if self.numerator is None or self.denominator is None:
                raise UnitError("ratio units need a numerator and a denominator")
        elif self.numerator is not None or self.denominator is not None:
            raise UnitError(f"{self.kind.value} is not a ratio unit")

    @classmethod
    def of(cls, kind: UnitKind, base_year: Optional[int] = None) -> "UnitTag":
        """Build a simple (non-ratio) tag."""
        return cls(kind=kind, base_year=base_year)

    @classmethod
    def ratio(cls, numerator: "UnitTag", denominator: "UnitTag") -> "UnitTag":
        """Compose numerator-per-denominator, simplifying X/X and X/1."""
        if numerator == denominator:
            return DIMENSIONLESS
        if denominator == DIMENSIONLESS:
            return numerator
        return cls(kind=UnitKind.Ratio, numerator=numerator, denominator=denominator)

    @property
    def symbol(self) -> str:
        """Return the textual form, the inverse of `UnitTag.parse`."""
        if self.kind == UnitKind.Ratio:
            assert self.numerator is not None and self.denominator is not None
            return f"ratio({self.numerator.symbol},{self.denominator.symbol})"
        if self.base_year is not None:
            return f"{self.kind.value}@{self.base_year}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "UnitTag":
        """Parse a unit symbol such as ``EJ``, ``trillion_USD@1990`` or ``ratio(EJ,person)``."""
        text = text.strip()
        if not text:
            raise UnitError("unit tag is empty")
        if text.startswith("ratio(") and text.endswith(")"):
            inner = text[len("ratio(") : -1]
            depth = 0
            for pos, char in enumerate(inner):
                if char == "(":
                    depth += 1
                elif char == ")":
                    depth -= 1
                elif char == "," and depth == 0:
                    numerator, denominator = inner[:pos], inner[pos + 1 :]
                    return cls.ratio(cls.parse(numerator), cls.parse(denominator))
            raise UnitError(f"malformed ratio unit: {text!r}")
        name, _, year = text.partition("@")
        try:
            kind = UnitKind(name)
        except ValueError:
            raise UnitError(f"unknown unit: {text!r}") from None
        if kind == UnitKind.Ratio:
            raise UnitError(f"malformed ratio unit: {text!r}")
        try:
            base_year = int(year) if year else None
        except ValueError:
            raise UnitError(f"bad currency base year in {text!r}") from None
        return cls(kind=kind, base_year=base_year)

    def __str__(self) -> str:
        return self.symbol


DIMENSIONLESS = UnitTag(UnitKind.Dimensionless)
EJ = UnitTag(UnitKind.EJ)
TWH = UnitTag(UnitKind.TWh)
PERSON = UnitTag(UnitKind.Person)
PERCENT = UnitTag(UnitKind.Percent)
KCAL_PER_CAPITA_DAY = UnitTag(UnitKind.KcalPerCapitaDay)
YEAR = UnitTag(UnitKind.Year)


def trillion_usd(base_year: int) -> UnitTag:
    """Return the trillion-USD tag for a currency base year."""
    return UnitTag.of(UnitKind.TrillionUSD, base_year)


def per_year(unit: UnitTag) -> UnitTag:
    """Return the tag of a yearly rate of change of ``unit``."""
    return UnitTag.ratio(unit, YEAR)


def _non_negative(x: Number, name: str) -> None:
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise UnitError(f"{name} must be finite")
    if np.any(values < 0):
        raise UnitError(f"{name} must not be negative")


def _scalar_or_array(x: Number) -> Number:
    if np.ndim(x) == 0:
        return float(x)
    return np.asarray(x, dtype=float)


def twh_to_ej(x: Number) -> Number:
    """Convert terawatt hours to exajoules (0.0036 EJ per TWh)."""
    _non_negative(x, "energy")
    return _scalar_or_array(x) * EJ_PER_TWH


def ej_to_twh(x: Number) -> Number:
    """Convert exajoules to terawatt hours."""
    _non_negative(x, "energy")
    return _scalar_or_array(x) / EJ_PER_TWH


def kcal_capture_to_ej_per_year(kcal_per_cap_day: Number, population: Number) -> Number:
    """Return the yearly energy capture, in EJ, of a population at a daily kCal rate."""
    _non_negative(kcal_per_cap_day, "kcal per capita per day")
    _non_negative(population, "population")
    joules = (
        _scalar_or_array(kcal_per_cap_day)
        * JOULES_PER_KCAL
        * DAYS_PER_YEAR
        * _scalar_or_array(population)
    )
    return joules / JOULES_PER_EJ


def energy_to_gk_dollars(e: Number, ratio: float) -> Number:
    """Value energy (EJ) in Geary-Khamis style dollars at a fixed dollars-per-EJ ratio.

    The currency of the result is the currency of ``ratio``; use
    `energy_series_to_gk_dollars` to carry the tag along with the values.
    """
    if not ratio > 0:
        raise UnitError(f"dollars per EJ ratio must be positive, got {ratio}")
    return _scalar_or_array(e) * ratio


def twh_series_to_ej(series: "AnnualSeries") -> "AnnualSeries":
    """Convert a TWh series to an EJ series."""
    if series.unit != TWH:
        raise UnitError(f"{series.label} is in {series.unit}, expected TWh")
    return series.map(twh_to_ej, unit=EJ)


def energy_series_to_gk_dollars(
    series: "AnnualSeries", ratio: float, base_year: int, label: Optional[str] = None
) -> "AnnualSeries":
    """Value an EJ series at a constant trillion-dollars-per-EJ ratio."""
    if series.unit != EJ:
        raise UnitError(f"{series.label} is in {series.unit}, expected EJ")
    _LOGGER.debug(f"Valuing {series.label} at {ratio} trillion {base_year}$ per EJ")
    return series.map(
        lambda values: energy_to_gk_dollars(values, ratio),
        unit=trillion_usd(base_year),
        label=label,
    )
