"""Randomized properties of the series operations, the model and the fits."""
import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from thermoecon import analysis
from thermoecon.analysis import fit_exponential, fit_linear
from thermoecon.exceptions import AnalysisError
from thermoecon.ingest import read_output_csv, write_outputs
from thermoecon.model import (
    EbcdInputs,
    GrowthSpec,
    ebcd_lambda,
    energy_chain,
    growth_series,
    lambda_from_observables,
    production_from_energy,
)
from thermoecon.series import (
    AnnualSeries,
    YearRange,
    cumulative_sum,
    diff_yoy,
    fill_exponential,
    growth_factor,
    ratio,
)
from thermoecon.units import DIMENSIONLESS, EJ, ej_to_twh, twh_to_ej

EXAMPLES = settings(max_examples=100, deadline=None)

positive = st.floats(min_value=1e-3, max_value=1e3)
unit_interval = st.floats(min_value=0.0, max_value=1.0)
first_year = st.integers(min_value=-14000, max_value=2000)
growth_rate = st.floats(min_value=-0.5, max_value=0.5)


@st.composite
def consecutive_values(draw, elements=st.floats(min_value=-1e6, max_value=1e6)):
    """A start year and the values of a consecutive series from it."""
    start = draw(first_year)
    values = draw(st.lists(elements, min_size=2, max_size=60))
    return start, values


@EXAMPLES
@given(consecutive_values())
def test_cumulative_sum_and_diff_telescope(drawn):
    """Differencing a cumulative sum gives back the summed values."""
    start, values = drawn
    series = AnnualSeries("Y", EJ, range(start, start + len(values)), values)
    back = diff_yoy(cumulative_sum(series, start))
    assert back.years.tolist() == series.years[1:].tolist()
    assert back.values == pytest.approx(values[1:], rel=1e-9, abs=1e-6)


@EXAMPLES
@given(positive, positive, st.integers(min_value=1, max_value=20000))
def test_growth_factor_round_trip(n0, ny, span):
    """n0 * a**span gives back ny."""
    a = growth_factor(n0, ny, span)
    assert n0 * a**span == pytest.approx(ny, rel=1e-9)


@EXAMPLES
@given(consecutive_values(st.floats(min_value=1e-300, max_value=1e300)))
def test_ratio_of_a_series_with_itself_is_one(drawn):
    """S/S is exactly 1 and dimensionless."""
    start, values = drawn
    series = AnnualSeries("E", EJ, range(start, start + len(values)), values)
    quotient = ratio(series, series)
    assert quotient.unit == DIMENSIONLESS
    assert np.all(quotient.values == 1.0)


@EXAMPLES
@given(
    first_year,
    positive,
    st.lists(
        st.tuples(
            st.integers(min_value=1, max_value=50),
            st.floats(min_value=1.001, max_value=10.0),
        ),
        min_size=1,
        max_size=10,
    ),
)
def test_fill_exponential_rises_between_rising_anchors(start, first, steps):
    """Rising anchors give a strictly rising fill that keeps every anchor."""
    points = {start: first}
    year, value = start, first
    for gap, factor in steps:
        year, value = year + gap, value * factor
        points[year] = value
    anchors = AnnualSeries.from_mapping("E", EJ, points)
    filled = fill_exponential(anchors, anchors.span)
    assert filled.is_consecutive()
    assert np.all(np.diff(filled.values) > 0)
    for year, value in points.items():
        assert filled.value_at(year) == value


@EXAMPLES
@given(positive, positive, unit_interval, unit_interval)
def test_twh_conversion_is_linear_and_invertible(x, y, a, b):
    """TWh to EJ is linear, and EJ to TWh undoes it."""
    assert twh_to_ej(a * x + b * y) == pytest.approx(
        a * twh_to_ej(x) + b * twh_to_ej(y), rel=1e-12, abs=1e-15
    )
    assert ej_to_twh(twh_to_ej(x)) == pytest.approx(x, rel=1e-12)


@EXAMPLES
@given(positive, positive, positive, positive, unit_interval, positive)
def test_ebcd_homogeneity(e_ak, k, e_al, l, alpha, c):  # noqa: E741
    """Lambda has energy degree +1 and currency degree -1."""
    base = ebcd_lambda(EbcdInputs(e_ak, k, e_al, l, alpha))
    more_energy = ebcd_lambda(EbcdInputs(c * e_ak, k, c * e_al, l, alpha))
    more_money = ebcd_lambda(EbcdInputs(e_ak, c * k, e_al, c * l, alpha))
    assert more_energy == pytest.approx(c * base, rel=1e-9)
    assert more_money == pytest.approx(base / c, rel=1e-9)


@EXAMPLES
@given(positive, positive)
def test_production_lambda_round_trip(e_a, lambda_agg):
    """Lambda recovered from E_A and Y = E_A / Lambda is Lambda."""
    y = production_from_energy(e_a, lambda_agg)
    assert lambda_from_observables(e_a, y) == pytest.approx(lambda_agg, rel=1e-12)


@EXAMPLES
@given(
    st.lists(
        st.tuples(positive, unit_interval, unit_interval), min_size=1, max_size=30
    )
)
def test_energy_chain_ordering(rows):
    """E_X <= E_A <= E_G in every year."""
    years = range(1900, 1900 + len(rows))
    e_g = AnnualSeries("E_G", EJ, years, [row[0] for row in rows])
    alpha = AnnualSeries("alpha", DIMENSIONLESS, years, [row[1] for row in rows])
    eps = AnnualSeries("eps", DIMENSIONLESS, years, [row[2] for row in rows])
    for year in energy_chain(e_g, alpha, eps):
        assert 0 <= year.e_x <= year.e_a <= year.e_g


@EXAMPLES
@given(
    positive,
    st.one_of(
        st.floats(min_value=1e-3, max_value=0.5),
        st.just(0.0),
        st.floats(min_value=-0.5, max_value=-1e-3),
    ),
    first_year,
    st.integers(min_value=1, max_value=200),
)
def test_growth_trichotomy(y0, rate, start, years):
    """Y grows, stays flat or decays with the sign of i."""
    series = growth_series(GrowthSpec(y0, rate), YearRange(start, start + years))
    steps = np.diff(series.values)
    assert series.values[0] == y0
    if rate > 0:
        assert np.all(steps > 0)
    elif rate == 0:
        assert np.all(steps == 0)
    else:
        assert np.all(steps < 0)


@EXAMPLES
@given(positive, growth_rate, first_year, st.integers(min_value=2, max_value=200))
def test_exponential_fit_recovers_growth_rate(y0, rate, start, years):
    """Fitting Y0 * (1 + i)**t gives rate ln(1 + i) and amplitude Y0."""
    span = YearRange(start, start + years)
    series = growth_series(GrowthSpec(y0, rate), span)
    fit = fit_exponential(series, span, x_origin=start)
    assert fit.rate == pytest.approx(np.log1p(rate), rel=1e-9, abs=1e-12)
    assert fit.amplitude == pytest.approx(y0, rel=1e-9)


@EXAMPLES
@given(positive, growth_rate, first_year, st.integers(min_value=2, max_value=200))
def test_exponential_fit_far_from_origin_fits_or_refuses(y0, rate, start, years):
    """An origin far from the window either fits or raises AnalysisError."""
    span = YearRange(start, start + years)
    series = growth_series(GrowthSpec(y0, rate), span)
    try:
        fit = fit_exponential(series, span, x_origin=0)
    except AnalysisError as ex:
        assert "at origin 0" in str(ex)
    else:
        assert 0 < fit.amplitude < float("inf")
        assert fit.rate == pytest.approx(np.log1p(rate), rel=1e-6, abs=1e-9)


@EXAMPLES
@given(
    st.floats(min_value=-10, max_value=10),
    st.floats(min_value=-1e3, max_value=1e3),
    first_year,
    st.integers(min_value=3, max_value=100),
)
def test_linear_fit_is_exact_without_noise(slope, intercept, start, n):
    """OLS recovers a noise-free line."""
    years = np.arange(start, start + n)
    values = intercept + slope * (years - start)
    series = AnnualSeries("y", DIMENSIONLESS, years, values)
    fit = fit_linear(series, YearRange(start, start + n - 1), x_origin=start)
    assert fit.slope == pytest.approx(slope, rel=1e-9, abs=1e-9)
    assert fit.intercept == pytest.approx(intercept, rel=1e-9, abs=1e-9)


@EXAMPLES
@given(
    consecutive_values(st.floats(min_value=-1e3, max_value=1e3)),
    st.one_of(
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=-1e3, max_value=-1e-3),
    ),
)
def test_linear_fit_scales_with_the_values(drawn, c):
    """Scaling the values by c scales slope and intercept by c and keeps R²."""
    start, values = drawn
    assume(len(values) >= 3 and np.ptp(values) > 1)
    years = range(start, start + len(values))
    window = YearRange(start, start + len(values) - 1)
    base = fit_linear(AnnualSeries("y", DIMENSIONLESS, years, values), window, start)
    scaled = fit_linear(
        AnnualSeries("y", DIMENSIONLESS, years, np.multiply(values, c)), window, start
    )
    tolerance = 1e-9 * abs(c) * (1.0 + float(np.max(np.abs(values))))
    assert scaled.slope == pytest.approx(c * base.slope, rel=1e-9, abs=tolerance)
    assert scaled.intercept == pytest.approx(
        c * base.intercept, rel=1e-9, abs=tolerance
    )
    assert scaled.r2 == pytest.approx(base.r2, abs=1e-9)


@EXAMPLES
@given(first_year, st.lists(st.tuples(positive, positive), min_size=3, max_size=60))
def test_ratio_then_fit_matches_fit_of_the_ratio(start, rows):
    """Testing W/E constancy fits the same line as fitting W/E directly."""
    years = range(start, start + len(rows))
    window = YearRange(start, start + len(rows) - 1)
    w = AnnualSeries("W", DIMENSIONLESS, years, [row[0] for row in rows])
    e = AnnualSeries("E", EJ, years, [row[1] for row in rows])
    precomputed = AnnualSeries("W/E", w.unit, years, [a / b for a, b in rows])
    verdict = analysis.test_w_over_e_constancy(w, e, window, threshold=1.0)
    direct = fit_linear(precomputed, window, x_origin=start)
    assert verdict.fit.slope == pytest.approx(direct.slope, rel=1e-12, abs=1e-15)
    assert verdict.fit.intercept == pytest.approx(direct.intercept, rel=1e-12)
    assert verdict.fit.r2 == pytest.approx(direct.r2, abs=1e-12)


@EXAMPLES
@given(
    positive,
    st.floats(min_value=-0.05, max_value=0.05),
    first_year,
    st.integers(min_value=3, max_value=100),
)
def test_exponential_fit_is_exact_without_noise(amplitude, rate, start, n):
    """The log-space fit recovers a noise-free exponential."""
    years = np.arange(start, start + n)
    values = amplitude * np.exp(rate * (years - start))
    series = AnnualSeries("w", DIMENSIONLESS, years, values)
    fit = fit_exponential(series, YearRange(start, start + n - 1), x_origin=start)
    assert fit.rate == pytest.approx(rate, rel=1e-9, abs=1e-12)
    assert fit.amplitude == pytest.approx(amplitude, rel=1e-9)


@settings(
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(
    st.dictionaries(
        st.integers(min_value=-14000, max_value=2100),
        st.floats(allow_nan=False, allow_infinity=False),
        min_size=1,
        max_size=50,
    )
)
def test_csv_output_reads_back_bit_exact(tmp_path, points):
    """Written series read back with identical years, values and unit."""
    series = AnnualSeries.from_mapping("E_Rep", EJ, points)
    (path,) = write_outputs([series], fmt="csv", path=tmp_path)
    back = read_output_csv(path)
    assert back.label == series.label
    assert back.unit == series.unit
    assert back.years.tolist() == series.years.tolist()
    assert back.values.tobytes() == series.values.tobytes()
