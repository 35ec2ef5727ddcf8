"""Reproduction checks: published numbers compared with what the pipeline computes."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from .analysis import (
    ConstancyVerdict,
    EfficiencyReport,
    ExpFit,
    ImpliedW,
    InflationReport,
    LinearFit,
    RatioStats,
)
from .config import ReconstructionConfig
from .reconstruction import DeepTimeOffset
from .series import AnnualSeries, YearRange, growth_factor, ratio, restrict
from .units import twh_to_ej

_LOGGER = logging.getLogger(__name__)

REFERENCE_GROWTH_FACTOR = 1.00073
REFERENCE_TWH = 12825.0
REFERENCE_EJ = 46.17
REFERENCE_COMPOSITE_MEAN = 1.44
REFERENCE_COMPOSITE_SIGMA = 0.06
REFERENCE_FLAT_SLOPE = 1.18e-3
REFERENCE_FLAT_INTERCEPT = 3.131
REFERENCE_EXP_R2 = 0.943
REFERENCE_EXP_RATES = (5.5e-4, 6.1e-4)
REFERENCE_NEGATIVE_YEARS = (1980, 1981, 1982, 2009)
REFERENCE_LOWEST_YEAR = 2011
REFERENCE_OUTLIERS = (2009, 2012, 2015)
REFERENCE_MIN_CROSSINGS = 4


@dataclass(frozen=True)
class Claim:
    """One published statement and whether the computed result agrees."""

    key: str
    description: str
    passed: bool
    detail: str

    def line(self) -> str:
        """Return the PASS/FAIL line printed by the command line tool."""
        return f"{'PASS' if self.passed else 'FAIL'} {self.key}: {self.detail}"

    def as_report(self) -> Dict[str, Any]:
        """Return the claim as a JSON-ready mapping."""
        return {
            "kind": "claim",
            "key": self.key,
            "description": self.description,
            "passed": self.passed,
            "detail": self.detail,
        }


def all_passed(claims: Sequence[Claim]) -> bool:
    """Return True if every claim passed."""
    return all(claim.passed for claim in claims)


def constant_claims() -> List[Claim]:
    """Check the interpolation constant and the TWh conversion."""
    factor = growth_factor(5.45875, 20.3508, 1799)
    energy = twh_to_ej(REFERENCE_TWH)
    return [
        Claim(
            "growth-factor",
            "yearly growth factor between the 1 CE and 1800 energy anchors",
            abs(factor - REFERENCE_GROWTH_FACTOR) <= 1e-5,
            f"a = {factor:.6f}, expected {REFERENCE_GROWTH_FACTOR}",
        ),
        Claim(
            "twh-conversion",
            "12,825 TWh expressed in EJ",
            abs(energy - REFERENCE_EJ) <= 0.01,
            f"{REFERENCE_TWH:.0f} TWh = {energy:.4f} EJ, expected {REFERENCE_EJ}",
        ),
    ]


def composite_claims(stats: RatioStats) -> List[Claim]:
    """Check the composite GWP against the Lotka's Wheel GWP."""
    return [
        Claim(
            "composite-gwp-ratio",
            "Y_Rep averages 1.44 times Y_LW with a 0.06 standard deviation",
            abs(stats.mean - REFERENCE_COMPOSITE_MEAN) <= 0.02
            and abs(stats.sigma - REFERENCE_COMPOSITE_SIGMA) <= 0.02,
            f"mean {stats.mean:.4f}, sigma {stats.sigma:.4f} over {stats.n} years",
        )
    ]


def flat_fit_claims(fit: LinearFit) -> List[Claim]:
    """Check the linear fit of the supplement W/E column."""
    slope_ok = abs(fit.slope - REFERENCE_FLAT_SLOPE) <= 0.2 * REFERENCE_FLAT_SLOPE
    intercept_ok = (
        abs(fit.intercept - REFERENCE_FLAT_INTERCEPT) <= 0.02 * REFERENCE_FLAT_INTERCEPT
    )
    return [
        Claim(
            "w-over-e-flat-fit",
            "W_LW/E_LW fits 1.18e-3 x + 3.131 from the 1970 origin",
            slope_ok and intercept_ok,
            f"slope {fit.slope:.4g}, intercept {fit.intercept:.4f}",
        )
    ]


def w_over_e_claims(rep: ConstancyVerdict, lw: ConstancyVerdict) -> List[Claim]:
    """Check that W/E is not constant and rises faster than the speculative curve."""
    return [
        Claim(
            "w-over-e-falsified",
            f"{rep.fit.label} drifts beyond the constancy threshold",
            rep.falsified,
            f"relative drift {rep.relative_slope:.4f}, threshold {rep.threshold}",
        ),
        Claim(
            "w-over-e-steeper",
            f"{rep.fit.label} rises faster than {lw.fit.label}",
            rep.fit.slope > lw.fit.slope,
            f"slope {rep.fit.slope:.4g} against {lw.fit.slope:.4g}",
        ),
        Claim(
            "w-over-e-lw-flat",
            f"{lw.fit.label} stays within the constancy threshold",
            not lw.falsified,
            f"relative drift {lw.relative_slope:.4f}, threshold {lw.threshold}",
        ),
    ]


def exp_fit_claims(fit: ExpFit) -> List[Claim]:
    """Check the exponential fit of the supplement W column."""
    low, high = REFERENCE_EXP_RATES
    return [
        Claim(
            "exp-fit-r2",
            "the exponential fit of W_LW has R² 0.943",
            abs(fit.r2 - REFERENCE_EXP_R2) <= 0.01,
            f"R² {fit.r2:.4f}",
        ),
        Claim(
            "exp-fit-rate",
            "the exponential rate lies between both published parameterizations",
            low <= fit.rate <= high,
            f"rate {fit.rate:.4e}, amplitude {fit.amplitude:.4g}",
        ),
    ]


def inflation_claims(report: InflationReport) -> List[Claim]:
    """Check each stated fact about dE/dt and CPI separately."""
    negative = set(report.negative_years)
    missing = [year for year in REFERENCE_NEGATIVE_YEARS if year not in negative]
    return [
        Claim(
            "inflation-negative-years",
            "dE/dt is negative in 1980-1982 and 2009",
            not missing,
            f"negative in {report.negative_years}"
            + (f", not in {missing}" if missing else ""),
        ),
        Claim(
            "inflation-lowest-year",
            "2011 has the lowest dE/dt",
            report.lowest_year == REFERENCE_LOWEST_YEAR,
            f"lowest {report.lowest_value:.4g} in {report.lowest_year}",
        ),
        Claim(
            "inflation-zero-crossings",
            "dE/dt passes through zero at least 4 times",
            len(report.zero_crossings) >= REFERENCE_MIN_CROSSINGS,
            f"{len(report.zero_crossings)} sign changes: {report.zero_crossings}",
        ),
        Claim(
            "inflation-outliers",
            "only 2009, 2012 and 2015 exceed the outlier cutoff",
            tuple(report.outliers) == REFERENCE_OUTLIERS,
            f"outliers {report.outliers} at cutoff {report.outlier_cutoff:g}",
        ),
        Claim(
            "inflation-verdict",
            "CPI shows no divergence where dE/dt crosses zero",
            not report.verdict,
            f"divergence detected: {report.verdict}",
        ),
    ]


def morris_claims(
    e_morris: AnnualSeries,
    y_morris: AnnualSeries,
    cfg: ReconstructionConfig = ReconstructionConfig(),
) -> List[Claim]:
    """Check the Morris extension against the 1 CE anchor and the GK ratio."""
    at_year_1 = e_morris.value_at(1)
    drift = abs(at_year_1 - cfg.year1_energy_ej) / cfg.year1_energy_ej
    early = YearRange(int(e_morris.years[0]), 1)
    quotient = ratio(restrict(y_morris, early), restrict(e_morris, early))
    worst = float(np.max(np.abs(quotient.values / cfg.gk_ratio - 1.0)))
    return [
        Claim(
            "morris-anchor",
            "Morris capture reproduces the 1 CE energy anchor within 0.1%",
            drift <= 1e-3,
            f"{at_year_1:.6g} EJ against {cfg.year1_energy_ej} EJ ({drift:.4%})",
        ),
        Claim(
            "gk-constancy",
            "Y/E equals the GK ratio for every year through 1 CE",
            worst <= 1e-12,
            f"largest relative deviation {worst:.3g}",
        ),
    ]


def deep_time_claims(offset: DeepTimeOffset) -> List[Claim]:
    """Report the forager prehistory offset next to the quoted figure.

    The two numbers disagree; the check records the computed value and
    only requires that it be finite and positive.
    """
    return [
        Claim(
            "deep-time-offset",
            "W a 150,000 year forager prehistory would add",
            offset.trillions > 0,
            f"{offset.energy_ej:.1f} EJ = {offset.trillions:.1f} trillion, "
            f"quoted {offset.stated_trillions} trillion",
        )
    ]


def efficiency_claims(report: EfficiencyReport) -> List[Claim]:
    """Check that 1/Lambda from the observations is the Y/E series value."""
    inverse = report.inverse_at_year
    reciprocal = 1.0 / report.at_year
    deviation = abs(reciprocal - inverse) / abs(inverse)
    return [
        Claim(
            "lambda-reciprocal",
            "1/Lambda in the last year equals the Y/E curve endpoint",
            deviation <= 1e-12,
            f"Lambda {report.at_year:.6g} {report.lambda_t.unit.symbol} in "
            f"{report.year}, 1/Lambda {reciprocal:.6g}, Y/E {inverse:.6g}",
        )
    ]


def implied_w_claims(result: ImpliedW) -> List[Claim]:
    """Check that Y/(dE/dt) cannot be a positive constant W.

    Y stays positive while dE/dt reaches zero or changes sign, so the
    quotient is undefined or flips sign somewhere in the window.
    """
    return [
        Claim(
            "implied-w-undefined",
            "Y = W dE/dt breaks down where dE/dt reaches or crosses zero",
            bool(result.zero_years) or result.sign_changes > 0,
            f"{result.sign_changes} sign changes, dE/dt zero in {result.zero_years}",
        )
    ]
