"""Least-squares fits and the falsification tests run on the datasets.

The ``test_*`` functions here are statistical tests, not unit tests; they
are marked so that pytest does not collect them when imported.
"""
import logging
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.stats import linregress

from .exceptions import AnalysisError, ModelError, SeriesError
from .model import inverse_lambda_series, lambda_from_observables, lambda_series
from .series import AnnualSeries, YearRange, diff_yoy, ratio, restrict
from .units import UnitTag, per_year

_LOGGER = logging.getLogger(__name__)

MIN_FIT_POINTS = 3
MAX_LOG_AMPLITUDE = math.log(sys.float_info.max)


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass(frozen=True)
class LinearFit:
    """Ordinary least squares line through (year - x_origin, value)."""

    label: str
    slope: float
    intercept: float
    r2: float
    range: YearRange
    x_origin: int
    n: int
    stderr: float = 0.0
    pvalue: float = 0.0

    def predict(self, year: float) -> float:
        """Return the fitted value in a year."""
        return self.intercept + self.slope * (year - self.x_origin)

    def as_report(self) -> Dict[str, Any]:
        """Return the fit as a JSON-ready mapping."""
        return {
            "kind": "linear-fit",
            "label": self.label,
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "start": self.range.start,
            "end": self.range.end,
            "x_origin": self.x_origin,
            "n": self.n,
            "stderr": _finite(self.stderr),
            "pvalue": _finite(self.pvalue),
        }


@dataclass(frozen=True)
class ExpFit:
    """Log-linear fit value = amplitude * exp(rate * (year - x_origin))."""

    label: str
    amplitude: float
    rate: float
    r2: float
    range: YearRange
    x_origin: int
    n: int

    def __post_init__(self) -> None:
        if not self.amplitude > 0:
            raise AnalysisError(f"amplitude must be positive, got {self.amplitude}")

    def predict(self, year: float) -> float:
        """Return the fitted value in a year."""
        return self.amplitude * math.exp(self.rate * (year - self.x_origin))

    @property
    def doubling_time(self) -> float:
        """Years for the fitted curve to double (infinite if it does not grow)."""
        return math.log(2.0) / self.rate if self.rate > 0 else math.inf

    def as_report(self) -> Dict[str, Any]:
        """Return the fit as a JSON-ready mapping."""
        return {
            "kind": "exp-fit",
            "label": self.label,
            "amplitude": self.amplitude,
            "rate": self.rate,
            "r2": self.r2,
            "start": self.range.start,
            "end": self.range.end,
            "x_origin": self.x_origin,
            "n": self.n,
            "doubling_time": _finite(self.doubling_time),
        }


@dataclass(frozen=True)
class ConstancyVerdict:
    """Whether a ratio drifts by more than ``threshold`` of its mean over the window."""

    fit: LinearFit
    mean: float
    relative_slope: float
    threshold: float
    falsified: bool

    def as_report(self) -> Dict[str, Any]:
        """Return the verdict as a JSON-ready mapping."""
        return {
            "kind": "constancy",
            "label": self.fit.label,
            "mean": self.mean,
            "relative_slope": self.relative_slope,
            "threshold": self.threshold,
            "falsified": self.falsified,
            "fit": self.fit.as_report(),
        }


@dataclass(frozen=True)
class InflationReport:
    """Year-on-year energy change against CPI inflation."""

    de_dt: AnnualSeries
    cpi: AnnualSeries
    ratio: AnnualSeries
    zero_crossings: List[int]
    outliers: List[int]
    negative_years: List[int]
    lowest_year: int
    lowest_value: float
    outlier_cutoff: float
    verdict: bool

    def as_report(self) -> Dict[str, Any]:
        """Return the report as a JSON-ready mapping."""
        return {
            "kind": "inflation",
            "energy": self.de_dt.label,
            "cpi": self.cpi.label,
            "zero_crossings": self.zero_crossings,
            "outliers": self.outliers,
            "negative_years": self.negative_years,
            "lowest_year": self.lowest_year,
            "lowest_value": self.lowest_value,
            "outlier_cutoff": self.outlier_cutoff,
            "verdict": self.verdict,
            "ratio": [[year, value] for year, value in self.ratio.as_points()],
        }


@dataclass(frozen=True)
class ImpliedW:
    """Y divided by dE/dt, with the years where the division is undefined."""

    w: AnnualSeries
    zero_years: List[int]
    sign_changes: int

    def as_report(self) -> Dict[str, Any]:
        """Return the result as a JSON-ready mapping."""
        return {
            "kind": "implied-w",
            "label": self.w.label,
            "unit": self.w.unit.symbol,
            "n": len(self.w),
            "zero_years": self.zero_years,
            "sign_changes": self.sign_changes,
        }


@dataclass(frozen=True)
class EfficiencyReport:
    """Production efficiency Lambda = E/Y over a window, read off in one year."""

    lambda_t: AnnualSeries
    inverse: AnnualSeries
    year: int
    at_year: float

    @property
    def inverse_at_year(self) -> float:
        """Return Y/E in the reporting year."""
        return self.inverse.value_at(self.year)

    def as_report(self) -> Dict[str, Any]:
        """Return the report as a JSON-ready mapping."""
        values = self.lambda_t.values
        return {
            "kind": "lambda",
            "label": self.lambda_t.label,
            "unit": self.lambda_t.unit.symbol,
            "year": self.year,
            "lambda": self.at_year,
            "inverse": self.inverse_at_year,
            "min": float(np.min(values)),
            "max": float(np.max(values)),
            "mean": float(np.mean(values)),
            "start": self.lambda_t.span.start,
            "end": self.lambda_t.span.end,
        }


class RatioStats(NamedTuple):
    """Mean and population standard deviation of a(y)/b(y)."""

    mean: float
    sigma: float
    n: int

    def as_report(self) -> Dict[str, Any]:
        """Return the statistics as a JSON-ready mapping."""
        return {
            "kind": "mean-ratio",
            "mean": self.mean,
            "sigma": self.sigma,
            "n": self.n,
        }


def _window(series: AnnualSeries, year_range: YearRange, what: str) -> AnnualSeries:
    inside = restrict(series, year_range)
    if len(inside) < MIN_FIT_POINTS:
        raise AnalysisError(
            f"{what} needs at least {MIN_FIT_POINTS} points of {series.label} "
            f"in {year_range}, found {len(inside)}"
        )
    return inside


def _r_squared(observed: np.ndarray, fitted: np.ndarray) -> float:
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    # a spread too small to square is treated as no spread at all
    if ss_tot == 0 or not math.isfinite(ss_tot):
        return 0.0
    ss_res = float(np.sum((observed - fitted) ** 2))
    return float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))


def _ols(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float, float, float]:
    if np.ptp(x) == 0:
        raise AnalysisError("cannot fit a line when all x values are equal")
    result = linregress(x, y)
    slope = float(result.slope)
    intercept = float(result.intercept)
    r2 = _r_squared(y, intercept + slope * x)
    return slope, intercept, r2, float(result.stderr), float(result.pvalue)


def fit_linear(
    series: AnnualSeries, year_range: YearRange, x_origin: int = 0
) -> LinearFit:
    """Fit value = intercept + slope * (year - x_origin) by least squares."""
    _LOGGER.debug(f"fit_linear() called for {series.label} over {year_range}")
    inside = _window(series, year_range, "a linear fit")
    x = (inside.years - x_origin).astype(float)
    slope, intercept, r2, stderr, pvalue = _ols(x, inside.values)
    return LinearFit(
        label=series.label,
        slope=slope,
        intercept=intercept,
        r2=r2,
        range=inside.span,
        x_origin=x_origin,
        n=len(inside),
        stderr=stderr,
        pvalue=pvalue,
    )


def fit_exponential(
    series: AnnualSeries, year_range: YearRange, x_origin: int = 0
) -> ExpFit:
    """Fit value = amplitude * exp(rate * (year - x_origin)) in log space.

    R² is that of the log-space regression.
    """
    _LOGGER.debug(f"fit_exponential() called for {series.label} over {year_range}")
    inside = _window(series, year_range, "an exponential fit")
    if np.any(inside.values <= 0):
        year = int(inside.years[inside.values <= 0][0])
        raise AnalysisError(
            f"exponential fit needs positive values, {series.label} is not in {year}"
        )
    x = (inside.years - x_origin).astype(float)
    slope, intercept, r2, _, _ = _ols(x, np.log(inside.values))
    if intercept > MAX_LOG_AMPLITUDE:
        raise AnalysisError(
            f"amplitude of {series.label} over {inside.span} overflows at origin "
            f"{x_origin} (log amplitude {intercept:.6g}), pick an origin closer "
            f"to the window"
        )
    amplitude = math.exp(intercept)
    if amplitude == 0:
        raise AnalysisError(
            f"amplitude of {series.label} over {inside.span} underflows to zero at "
            f"origin {x_origin} (log amplitude {intercept:.6g}), pick an origin "
            f"closer to the window"
        )
    return ExpFit(
        label=series.label,
        amplitude=amplitude,
        rate=slope,
        r2=r2,
        range=inside.span,
        x_origin=x_origin,
        n=len(inside),
    )


def test_ratio_constancy(
    numerator: AnnualSeries,
    denominator: AnnualSeries,
    year_range: YearRange,
    threshold: float = 0.05,
    x_origin: Optional[int] = None,
) -> ConstancyVerdict:
    """Fit numerator/denominator over a window and judge its drift.

    The ratio counts as not constant when ``|slope| * span / mean`` exceeds
    ``threshold``, span being the years covered inside the window.
    """
    if not threshold > 0:
        raise AnalysisError(f"threshold must be positive, got {threshold}")
    try:
        quotient = ratio(
            restrict(numerator, year_range),
            restrict(denominator, year_range),
            label=f"{numerator.label}/{denominator.label}",
        )
    except SeriesError as ex:
        raise AnalysisError(str(ex)) from ex
    origin = year_range.start if x_origin is None else x_origin
    fit = fit_linear(quotient, year_range, origin)
    mean = float(np.mean(quotient.values))
    if mean == 0:
        raise AnalysisError(f"{quotient.label} averages zero over {year_range}")
    relative = fit.slope * fit.range.span / mean
    falsified = abs(relative) > threshold
    _LOGGER.debug(
        f"{quotient.label}: slope {fit.slope:.4g}, relative drift {relative:.4g}, "
        f"falsified {falsified}"
    )
    return ConstancyVerdict(
        fit=fit,
        mean=mean,
        relative_slope=relative,
        threshold=threshold,
        falsified=falsified,
    )


def test_w_over_e_constancy(
    w: AnnualSeries,
    e: AnnualSeries,
    year_range: YearRange,
    threshold: float = 0.05,
    x_origin: Optional[int] = None,
) -> ConstancyVerdict:
    """Test whether W/E stays constant over a window."""
    _LOGGER.debug(f"test_w_over_e_constancy() called for {w.label}/{e.label}")
    return test_ratio_constancy(w, e, year_range, threshold, x_origin)


def test_y_over_e_flatness(
    y: AnnualSeries,
    e: AnnualSeries,
    year_range: YearRange,
    threshold: float = 0.05,
    x_origin: Optional[int] = None,
) -> ConstancyVerdict:
    """Test whether Y/E, the inverse production efficiency, is flat over a window."""
    _LOGGER.debug(f"test_y_over_e_flatness() called for {y.label}/{e.label}")
    return test_ratio_constancy(y, e, year_range, threshold, x_origin)


def _sign_change_years(series: AnnualSeries) -> List[int]:
    signs = np.sign(series.values)
    nonzero = signs != 0
    years = series.years[nonzero]
    signs = signs[nonzero]
    changed = signs[1:] != signs[:-1]
    return [int(year) for year in years[1:][changed]]


def _yearly_change(e: AnnualSeries) -> AnnualSeries:
    """Return e(t) - e(t-1) tagged as a per-year rate."""
    try:
        change = diff_yoy(e)
    except SeriesError as ex:
        raise AnalysisError(str(ex)) from ex
    return AnnualSeries(
        f"d{e.label}/dt", per_year(e.unit), change.years, change.values
    )


def test_de_dt_inflation(
    e: AnnualSeries,
    cpi: AnnualSeries,
    outlier_cutoff: float = 10.0,
    year_range: Optional[YearRange] = None,
    divergence_window: int = 1,
    divergence_factor: float = 3.0,
    min_overlap: int = 10,
) -> InflationReport:
    """Compare yearly energy change with CPI inflation.

    The verdict is True only if CPI, within ``divergence_window`` years of a
    sign change of dE/dt, exceeds ``divergence_factor`` times the largest
    absolute CPI seen away from every sign change.
    """
    _LOGGER.debug(f"test_de_dt_inflation() called for {e.label} against {cpi.label}")
    if year_range is not None:
        e = restrict(e, YearRange(year_range.start - 1, year_range.end))
    de_dt = _yearly_change(e)
    shared = np.intersect1d(de_dt.years, cpi.years)
    if shared.size < min_overlap:
        raise AnalysisError(
            f"{de_dt.label} and {cpi.label} share {shared.size} years, "
            f"at least {min_overlap} are needed"
        )
    span = YearRange(int(shared[0]), int(shared[-1]))
    de_dt = restrict(de_dt, span)
    cpi = restrict(cpi, span)
    cpi_shared = cpi.values[np.isin(cpi.years, shared)]
    if np.any(cpi_shared == 0):
        year = int(shared[cpi_shared == 0][0])
        raise AnalysisError(f"CPI is zero in {year}, dE/dt over CPI is undefined")
    quotient = ratio(de_dt, cpi, label=f"{de_dt.label}/{cpi.label}")

    crossings = _sign_change_years(de_dt)
    outliers = [
        int(year)
        for year, value in zip(quotient.years, quotient.values)
        if abs(value) > outlier_cutoff
    ]
    negative = [int(year) for year in de_dt.years[de_dt.values < 0]]
    lowest = int(np.argmin(de_dt.values))

    near = np.zeros(cpi.years.size, dtype=bool)
    for year in crossings:
        near |= np.abs(cpi.years - year) <= divergence_window
    away = cpi.values[~near] if np.any(~near) else cpi.values
    baseline = float(np.max(np.abs(away)))
    verdict = bool(
        np.any(np.abs(cpi.values[near]) > divergence_factor * baseline)
    )
    return InflationReport(
        de_dt=de_dt,
        cpi=cpi,
        ratio=quotient,
        zero_crossings=crossings,
        outliers=outliers,
        negative_years=negative,
        lowest_year=int(de_dt.years[lowest]),
        lowest_value=float(de_dt.values[lowest]),
        outlier_cutoff=outlier_cutoff,
        verdict=verdict,
    )


def mean_ratio(a: AnnualSeries, b: AnnualSeries) -> RatioStats:
    """Return the mean and population standard deviation of a/b on shared years."""
    try:
        quotient = ratio(a, b)
    except SeriesError as ex:
        raise AnalysisError(str(ex)) from ex
    if len(quotient) < 2:
        raise AnalysisError(f"{a.label} and {b.label} share fewer than two years")
    return RatioStats(
        mean=float(np.mean(quotient.values)),
        sigma=float(np.std(quotient.values)),
        n=len(quotient),
    )


def find_local_minimum(series: AnnualSeries, year_range: YearRange) -> int:
    """Return the year of the smallest value inside a window."""
    inside = restrict(series, year_range)
    if len(inside) == 0:
        raise AnalysisError(f"{series.label} has no values in {year_range}")
    return int(inside.years[int(np.argmin(inside.values))])


def implied_w(y: AnnualSeries, e: AnnualSeries) -> ImpliedW:
    """Divide Y by dE/dt wherever dE/dt is not zero.

    If Y were proportional to dE/dt, every zero of dE/dt would force Y to
    zero; the zero years and the number of sign changes are reported so the
    data can be checked against that.
    """
    de_dt = _yearly_change(e)
    years, y_idx, d_idx = np.intersect1d(
        y.years, de_dt.years, assume_unique=True, return_indices=True
    )
    if years.size == 0:
        raise AnalysisError(f"{y.label} and {de_dt.label} share no years")
    change = de_dt.values[d_idx]
    nonzero = change != 0
    w = AnnualSeries(
        f"{y.label}/{de_dt.label}",
        UnitTag.ratio(y.unit, de_dt.unit),
        years[nonzero],
        y.values[y_idx][nonzero] / change[nonzero],
    )
    overlap = AnnualSeries(de_dt.label, de_dt.unit, years, change)
    return ImpliedW(
        w=w,
        zero_years=[int(year) for year in years[~nonzero]],
        sign_changes=len(_sign_change_years(overlap)),
    )


def production_efficiency(
    y: AnnualSeries,
    e: AnnualSeries,
    year_range: YearRange,
    year: Optional[int] = None,
) -> EfficiencyReport:
    """Return Lambda(t) = E/Y and Y/E over a window.

    The reporting year defaults to the last year both series share inside
    the window; Lambda there is recomputed from the two observations.
    """
    _LOGGER.debug(f"production_efficiency() called for {e.label}/{y.label}")
    inside_y = restrict(y, year_range)
    inside_e = restrict(e, year_range)
    try:
        lambda_t = lambda_series(inside_e, inside_y)
        inverse = inverse_lambda_series(inside_y, inside_e)
    except (ModelError, SeriesError) as ex:
        raise AnalysisError(str(ex)) from ex
    year = int(lambda_t.years[-1]) if year is None else year
    if year not in lambda_t:
        raise AnalysisError(f"{lambda_t.label} has no value in {year}")
    try:
        at_year = lambda_from_observables(e.value_at(year), y.value_at(year))
    except ModelError as ex:
        raise AnalysisError(str(ex)) from ex
    return EfficiencyReport(
        lambda_t=lambda_t, inverse=inverse, year=year, at_year=at_year
    )


for _statistical_test in (
    test_ratio_constancy,
    test_w_over_e_constancy,
    test_y_over_e_flatness,
    test_de_dt_inflation,
):
    _statistical_test.__test__ = False  # type: ignore[attr-defined]
