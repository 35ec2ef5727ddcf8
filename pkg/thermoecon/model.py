"""The corrected thermodynamic system of equations.

Production efficiency is an aggregate, not a constant::

    Lambda(t) [J/$] = sum(lambda_i(t) * P_i / GWP)
    Y(t) [$]        = E_A(t) / Lambda(t)
    E_A(t) [J]      = alpha(t) * E_G(t)
    E_X(t) [J]      = eps(t) * E_A(t)

Two different alphas appear in the literature: the Cobb-Douglas earnings
share of capital (`EbcdInputs.share_alpha`) and the E_G -> E_A conversion
efficiency (`EnergyChainYear.alpha_t`). They are kept apart on purpose.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import ModelError, SeriesError
from .series import AnnualSeries, YearRange, ratio
from .units import DIMENSIONLESS, UnitTag

_LOGGER = logging.getLogger(__name__)

DEFAULT_SHARE_ALPHA = 2.0 / 3.0
GWP_COVERAGE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FirmProduction:
    """One firm: its conversion efficiency (J/$) and its production ($)."""

    lambda_i: float
    p_i: float

    def __post_init__(self) -> None:
        if not self.lambda_i > 0:
            raise ModelError(f"firm efficiency must be positive, got {self.lambda_i}")
        if not self.p_i >= 0:
            raise ModelError(f"firm production must not be negative, got {self.p_i}")


@dataclass(frozen=True)
class EbcdInputs:
    """Inputs of the Energy-Based Cobb-Douglas firm efficiency."""

    e_ak: float
    k: float
    e_al: float
    l: float  # noqa: E741
    share_alpha: float = DEFAULT_SHARE_ALPHA

    def __post_init__(self) -> None:
        for name in ("e_ak", "k", "e_al", "l"):
            value = getattr(self, name)
            if not value > 0:
                raise ModelError(f"EBCD input {name} must be positive, got {value}")
        if not 0.0 <= self.share_alpha <= 1.0:
            raise ModelError(
                f"capital earnings share must be in [0, 1], got {self.share_alpha}"
            )

    @property
    def share_beta(self) -> float:
        """Labour earnings share, 1 - alpha."""
        return 1.0 - self.share_alpha


@dataclass(frozen=True)
class EnergyChainYear:
    """One year of the E_G -> E_A -> E_X chain."""

    year: int
    e_g: float
    alpha_t: float
    e_a: float
    eps_t: float
    e_x: float


@dataclass(frozen=True)
class GrowthSpec:
    """Financial growth Y(t) = Y0 * g**t with g = 1 + i."""

    y0: float
    rate_i: float

    def __post_init__(self) -> None:
        if not self.g > 0:
            raise ModelError(f"growth factor g = 1 + i must be positive, got {self.g}")

    @property
    def g(self) -> float:
        """Return the yearly growth factor."""
        return 1.0 + self.rate_i


def lambda_aggregate(firms: Sequence[FirmProduction], gwp: float) -> float:
    """Return the production-weighted efficiency sum(lambda_i * P_i) / GWP.

    Firm lists rarely cover all of GWP; partial coverage gives a partial
    aggregate. Coverage above GWP (beyond a 1e-6 relative tolerance) is an error.
    """
    if not gwp > 0:
        raise ModelError(f"GWP must be positive, got {gwp}")
    if not firms:
        raise ModelError("cannot aggregate an empty firm list")
    lambdas = np.array([firm.lambda_i for firm in firms])
    production = np.array([firm.p_i for firm in firms])
    covered = float(production.sum())
    if covered > gwp * (1.0 + GWP_COVERAGE_TOLERANCE):
        raise ModelError(f"firm production {covered} exceeds GWP {gwp}")
    if covered < gwp:
        _LOGGER.debug(f"Firms cover {covered / gwp:.3%} of GWP, aggregate is partial")
    return float(np.dot(lambdas, production) / gwp)


def ebcd_lambda(inputs: EbcdInputs) -> float:
    """Return (E_AK/K)**alpha * (E_AL/L)**beta in J/$."""
    capital_intensity = inputs.e_ak / inputs.k
    labour_intensity = inputs.e_al / inputs.l
    return capital_intensity**inputs.share_alpha * labour_intensity**inputs.share_beta


def production_from_energy(e_a: float, lambda_agg: float) -> float:
    """Return Y = E_A / Lambda."""
    if not lambda_agg > 0:
        raise ModelError(f"production efficiency must be positive, got {lambda_agg}")
    return e_a / lambda_agg


def lambda_from_observables(e_a: float, y: float) -> float:
    """Return Lambda = E_A / Y."""
    if not y > 0:
        raise ModelError(f"production must be positive, got {y}")
    return e_a / y


def _require_positive(series: AnnualSeries) -> None:
    if np.any(series.values <= 0):
        bad = int(series.years[series.values <= 0][0])
        raise ModelError(f"{series.label} must be positive, it is not in {bad}")


def lambda_series(e_a: AnnualSeries, y: AnnualSeries) -> AnnualSeries:
    """Return Lambda(t) = E_A(t) / Y(t) on the years both series share."""
    _require_positive(y)
    return ratio(e_a, y, label=f"Lambda({e_a.label}/{y.label})")


def production_series(e_a: AnnualSeries, lambda_t: AnnualSeries) -> AnnualSeries:
    """Return Y(t) = E_A(t) / Lambda(t)."""
    _require_positive(lambda_t)
    return ratio(e_a, lambda_t, label=f"Y({e_a.label})")


def inverse_lambda_series(y: AnnualSeries, e_a: AnnualSeries) -> AnnualSeries:
    """Return Y(t)/E_A(t), which equals 1/Lambda(t)."""
    _require_positive(e_a)
    return ratio(y, e_a, label=f"{y.label}/{e_a.label}")


def _same_grid(*series: AnnualSeries) -> None:
    first = series[0]
    for other in series[1:]:
        if not np.array_equal(first.years, other.years):
            raise ModelError(
                f"{other.label} does not share the year grid of {first.label}"
            )


def _efficiency_in_unit_range(series: AnnualSeries) -> None:
    outside = (series.values < 0) | (series.values > 1)
    if np.any(outside):
        year = int(series.years[outside][0])
        raise ModelError(f"{series.label} must lie in [0, 1], it does not in {year}")


def energy_chain(
    e_g: AnnualSeries,
    alpha_t: AnnualSeries,
    eps_t: Optional[AnnualSeries] = None,
) -> List[EnergyChainYear]:
    """Run the E_G -> E_A -> E_X chain year by year.

    Without an eps(t) series the useful-work efficiency is taken as 1.
    """
    _LOGGER.debug(f"energy_chain() called for {e_g.label}")
    if eps_t is None:
        eps_t = alpha_t.map(np.ones_like, label="eps")
    _same_grid(e_g, alpha_t, eps_t)
    negative = e_g.values < 0
    if np.any(negative):
        year = int(e_g.years[negative][0])
        raise ModelError(f"{e_g.label} must not be negative, it is in {year}")
    _efficiency_in_unit_range(alpha_t)
    _efficiency_in_unit_range(eps_t)
    e_a = alpha_t.values * e_g.values
    e_x = eps_t.values * e_a
    return [
        EnergyChainYear(
            year=int(year),
            e_g=float(g),
            alpha_t=float(a),
            e_a=float(available),
            eps_t=float(eps),
            e_x=float(exergy),
        )
        for year, g, a, available, eps, exergy in zip(
            e_g.years, e_g.values, alpha_t.values, e_a, eps_t.values, e_x
        )
    ]


def growth_series(
    spec: GrowthSpec,
    year_range: YearRange,
    label: str = "Y_growth",
    unit: Optional[UnitTag] = None,
) -> AnnualSeries:
    """Return Y(t) = Y0 * g**(t - start) over a year range."""
    steps = (year_range.years - year_range.start).astype(float)
    values = spec.y0 * spec.g**steps
    if not np.all(np.isfinite(values)):
        raise SeriesError(f"growth series overflows over {year_range}")
    return AnnualSeries(label, unit or DIMENSIONLESS, year_range.years, values)


def w_ratio(w: float, e: float) -> float:
    """Return w = W/E. The ratio is not assumed to be constant."""
    if e == 0 or math.isnan(e):
        raise ModelError("energy must be nonzero to form W/E")
    return w / e
