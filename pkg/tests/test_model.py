"""Tests for the thermodynamic model equations."""
import math

import numpy as np
import pytest

from thermoecon.exceptions import ModelError, SeriesError
from thermoecon.model import (
    EbcdInputs,
    FirmProduction,
    GrowthSpec,
    ebcd_lambda,
    energy_chain,
    growth_series,
    inverse_lambda_series,
    lambda_aggregate,
    lambda_from_observables,
    lambda_series,
    production_from_energy,
    production_series,
    w_ratio,
)
from thermoecon.series import AnnualSeries, YearRange
from thermoecon.units import DIMENSIONLESS, EJ, trillion_usd


def test_lambda_aggregate():
    """Production-weighted efficiency over firms."""
    firms = [FirmProduction(2.0, 30.0), FirmProduction(4.0, 70.0)]
    assert lambda_aggregate(firms, 100.0) == pytest.approx(3.4)
    # half of GWP covered
    assert lambda_aggregate(firms[:1], 60.0) == pytest.approx(1.0)
    with pytest.raises(ModelError):
        lambda_aggregate(firms, 50.0)
    with pytest.raises(ModelError):
        lambda_aggregate([], 100.0)
    with pytest.raises(ModelError):
        lambda_aggregate(firms, 0.0)


def test_firm_validation():
    """Firm efficiency must be positive and production non-negative."""
    with pytest.raises(ModelError):
        FirmProduction(0.0, 1.0)
    with pytest.raises(ModelError):
        FirmProduction(1.0, -1.0)


def test_ebcd_lambda():
    """EBCD efficiency with equal intensities reduces to that intensity."""
    assert ebcd_lambda(EbcdInputs(e_ak=8.0, k=2.0, e_al=8.0, l=2.0)) == pytest.approx(
        4.0
    )
    inputs = EbcdInputs(e_ak=27.0, k=1.0, e_al=1.0, l=1.0)
    assert inputs.share_beta == pytest.approx(1 / 3)
    assert ebcd_lambda(inputs) == pytest.approx(9.0)
    with pytest.raises(ModelError):
        EbcdInputs(e_ak=0.0, k=1.0, e_al=1.0, l=1.0)
    with pytest.raises(ModelError):
        EbcdInputs(e_ak=1.0, k=1.0, e_al=1.0, l=1.0, share_alpha=1.5)


def test_production_and_lambda():
    """Y = E_A / Lambda and Lambda = E_A / Y invert each other."""
    y = production_from_energy(500.0, 4.0)
    assert y == 125.0
    assert lambda_from_observables(500.0, y) == 4.0
    with pytest.raises(ModelError):
        production_from_energy(500.0, 0.0)
    with pytest.raises(ModelError):
        lambda_from_observables(500.0, -1.0)


def test_lambda_series_round_trip():
    """Lambda(t) from datasets reproduces Y(t)."""
    e_a = AnnualSeries("E_A", EJ, [2000, 2001, 2002], [400.0, 410.0, 420.0])
    y = AnnualSeries("Y", trillion_usd(1990), [2000, 2001, 2002], [40.0, 41.5, 44.0])
    lam = lambda_series(e_a, y)
    back = production_series(e_a, lam)
    assert back.values == pytest.approx(y.values)
    inverse = inverse_lambda_series(y, e_a)
    assert inverse.values == pytest.approx(1.0 / lam.values)
    with pytest.raises(ModelError):
        lambda_series(e_a, y.map(lambda values: values * 0.0))


def test_energy_chain():
    """E_X <= E_A <= E_G for efficiencies in [0, 1]."""
    years = [1990, 1991]
    e_g = AnnualSeries("E_G", EJ, years, [500.0, 520.0])
    alpha = AnnualSeries("alpha", DIMENSIONLESS, years, [0.8, 0.9])
    eps = AnnualSeries("eps", DIMENSIONLESS, years, [0.5, 0.25])
    chain = energy_chain(e_g, alpha, eps)
    assert [row.e_a for row in chain] == pytest.approx([400.0, 468.0])
    assert [row.e_x for row in chain] == pytest.approx([200.0, 117.0])
    default = energy_chain(e_g, alpha)
    assert [row.e_x for row in default] == [row.e_a for row in default]
    with pytest.raises(ModelError):
        energy_chain(e_g, alpha.map(lambda values: values + 1.0))
    with pytest.raises(ModelError):
        energy_chain(e_g, AnnualSeries("alpha", DIMENSIONLESS, [1990], [0.5]))


def test_energy_chain_rejects_negative_primary_energy():
    """A negative E_G would put E_A above it; the year is named."""
    years = [1990, 1991]
    e_g = AnnualSeries("E_G", EJ, years, [500.0, -1.0])
    alpha = AnnualSeries("alpha", DIMENSIONLESS, years, [0.8, 0.9])
    with pytest.raises(ModelError, match="E_G must not be negative, it is in 1991"):
        energy_chain(e_g, alpha)
    zero = AnnualSeries("E_G", EJ, years, [0.0, 0.0])
    assert [row.e_a for row in energy_chain(zero, alpha)] == [0.0, 0.0]


def test_growth_series():
    """Y(t) = Y0 * g**t grows, stays flat or decays with the sign of i."""
    span = YearRange(0, 10)
    assert np.all(np.diff(growth_series(GrowthSpec(1.0, 0.03), span).values) > 0)
    assert np.all(np.diff(growth_series(GrowthSpec(1.0, 0.0), span).values) == 0)
    assert np.all(np.diff(growth_series(GrowthSpec(1.0, -0.03), span).values) < 0)
    assert growth_series(GrowthSpec(2.0, 1.0), span).value_at(10) == 2048.0
    with pytest.raises(ModelError):
        GrowthSpec(1.0, -1.0)
    with pytest.raises(SeriesError):
        growth_series(GrowthSpec(1.0, 1e6), YearRange(0, 1000))


def test_w_ratio():
    """W/E is a plain ratio."""
    assert w_ratio(313.1, 100.0) == pytest.approx(3.131)
    with pytest.raises(ModelError):
        w_ratio(1.0, 0.0)
    with pytest.raises(ModelError):
        w_ratio(1.0, math.nan)
