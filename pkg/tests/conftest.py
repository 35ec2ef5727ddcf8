"""Shared fixtures: a synthetic data directory in the input file layout.

The OWID, FRED and supplement exports cannot be shipped with the tests, so
the tables below are synthetic. The supplement is generated from its own
reference GWP, a geometric interpolation of the anchor table, and never from
the reconstruction under test. Its GWP is that reference divided by a factor
averaging 1.44 with a 0.06 standard deviation, so a correct reconstruction
lands near that ratio while a broken one does not. Supplement W/E over
1970-2020 is 1.18e-3 x + 3.131, the log-space fit of supplement W over
1-1969 has rate 5.596e-4 and R² 0.943, and the 1970-2019 energy changes
follow the yearly pattern described for dE/dt against CPI.
"""
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pytest

from thermoecon.config import RunConfig
from thermoecon.pipeline import DatasetPipeline
from thermoecon.series import AnnualSeries
from thermoecon.units import PERSON, trillion_usd

# trillion 1990 dollars
GDP_ANCHORS: Dict[int, float] = {
    1: 0.1824,
    1000: 0.2120,
    1500: 0.2483,
    1600: 0.3314,
    1700: 0.3711,
    1820: 0.695,
    1850: 0.860,
    1870: 1.110,
    1890: 1.500,
    1900: 1.970,
    1913: 2.730,
    1929: 3.700,
    1940: 4.500,
    1950: 5.340,
    1960: 8.430,
    1970: 13.8,
    1980: 19.2,
    1990: 27.1,
    **{year: 27.1 * 1.038 ** (year - 1990) for year in range(1991, 2020)},
}

# billion 2010 dollars
FRED_GWP: Dict[int, float] = {
    year: 11000.0 * 1.04 ** (year - 1960) for year in range(1960, 1991)
}

ENERGY_ANCHORS_EJ: Dict[int, float] = {
    1800: 20.3508,
    1810: 22.0,
    1820: 24.0,
    1830: 26.0,
    1840: 29.0,
    1850: 32.0,
    1860: 36.0,
    1870: 41.0,
    1880: 47.0,
    1890: 55.0,
    1900: 64.0,
    1910: 75.0,
    1920: 82.0,
    1930: 92.0,
    1940: 105.0,
    1950: 115.0,
    1960: 130.0,
    1965: 160.0,
    1969: 200.0,
}

# year-on-year change of world energy, EJ, 1970 through 2019
DE_DT: List[float] = [
    8, 6, 7.5, 8.5, 1, 0.5, 9, 6.5, 7, 5.5,
    -2, -3, -1.5, 2.5, 9.5, 5, 4, 7, 8.5, 5.5,
    3.5, 2, 1, 3, 2.5, 6.5, 8, 3, 1.5, 5,
    8, 2.5, 6, 12, 18, 11, 10.5, 11.5, 5, -6,
    14, -8.1, 24, 9, 6, 1.5, 5.5, 9.5, 12, 6,
]  # fmt: skip

# percent, 1969 through 2019
CPI: List[float] = [
    5.5,
    5.7, 4.4, 3.2, 6.2, 11.0, 9.1, 5.8, 6.5, 7.6, 11.3,
    13.5, 10.3, 6.1, 3.2, 4.3, 3.5, 1.9, 3.7, 4.1, 4.8,
    5.4, 4.2, 3.0, 3.0, 2.6, 2.8, 3.0, 2.3, 1.6, 2.2,
    3.4, 2.8, 1.6, 2.3, 2.7, 3.4, 3.2, 2.9, 3.8, -0.4,
    1.6, 3.2, 2.0, 1.5, 1.6, 0.1, 1.3, 2.1, 2.4, 1.8,
]  # fmt: skip

SOURCE_SHARES: Dict[str, float] = {
    "coal": 0.30,
    "oil": 0.30,
    "gas": 0.20,
    "nuclear": 0.04,
    "hydro": 0.06,
    "biofuels": 0.08,
    "other": 0.02,
}

HYDE_POPULATION: Dict[int, float] = {
    -14000: 2e6,
    -10000: 4e6,
    -8000: 5e6,
    -6000: 7e6,
    -4000: 14e6,
    -3000: 20e6,
    -2000: 27e6,
    -1000: 50e6,
    1: 230e6,
    1000: 295e6,
    1500: 461e6,
    1600: 554e6,
    1700: 603e6,
    1800: 990e6,
    1820: 1041e6,
    1900: 1563e6,
    1950: 2525e6,
    2000: 6145e6,
    2019: 7713e6,
}

LW_POPULATION: Dict[int, float] = {
    1: 225.82e6,
    1000: 290e6,
    1500: 450e6,
    1800: 980e6,
    1900: 1600e6,
    1950: 2500e6,
    2000: 6100e6,
    2019: 7700e6,
}

UN_POPULATION: Dict[int, float] = {1950: 2536e6, 2000: 6143e6, 2019: 7713e6}

COMPOSITE_MEAN = 1.44
COMPOSITE_SWING = 0.0848528  # sqrt(2) * 0.06
EXP_AMPLITUDE = 244.064
EXP_RATE = 5.596e-4
EXP_R2 = 0.943
FLAT_SLOPE = 1.18e-3
FLAT_INTERCEPT = 3.131
SUPPLEMENT_E_YEAR_1 = 46.17


def energy_by_year() -> Dict[int, float]:
    """Return the fixture world energy in EJ by year."""
    energy = dict(ENERGY_ANCHORS_EJ)
    level = energy[1969]
    for year, change in zip(range(1970, 2020), DE_DT):
        level += change
        energy[year] = level
    return energy


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if cell is None else repr(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def owid_gdp_series() -> AnnualSeries:
    """Return the fixture OWID GWP anchors in trillion 1990 dollars."""
    return AnnualSeries.from_mapping("owid_gdp", trillion_usd(1990), GDP_ANCHORS)


def fred_gwp_series() -> AnnualSeries:
    """Return the fixture FRED GWP in trillion 2010 dollars."""
    return AnnualSeries.from_mapping(
        "fred_gwp",
        trillion_usd(2010),
        {year: value * 1e-3 for year, value in FRED_GWP.items()},
    )


def population_sources() -> List[AnnualSeries]:
    """Return the fixture population sources."""
    return [
        AnnualSeries.from_mapping("lw", PERSON, LW_POPULATION),
        AnnualSeries.from_mapping("hyde", PERSON, HYDE_POPULATION),
        AnnualSeries.from_mapping("un", PERSON, UN_POPULATION),
    ]


def reference_gwp(years: np.ndarray) -> np.ndarray:
    """Return GWP in trillion 1990 dollars, log-interpolated between anchors."""
    anchor_years = sorted(GDP_ANCHORS)
    logs = np.log([GDP_ANCHORS[year] for year in anchor_years])
    return np.exp(np.interp(years, anchor_years, logs))


def supplement_table() -> Dict[str, np.ndarray]:
    """Return supplement columns for 1-2020."""
    years = np.arange(1, 2021)
    factor = COMPOSITE_MEAN + COMPOSITE_SWING * np.sin(2 * np.pi * years / 50)
    y_lw = np.empty(years.size)
    y_lw[:2019] = reference_gwp(years[:2019]) / factor[:2019]
    y_lw[2019] = y_lw[2018] * 1.03

    x = years[:1969].astype(float)
    centered = x - x.mean()
    curvature = centered**2 - np.mean(centered**2)
    sxx = np.sum(centered**2)
    bend = EXP_RATE * np.sqrt(
        sxx * ((1 - EXP_R2) / EXP_R2) / np.sum(curvature**2)
    )
    w_early = np.exp(np.log(EXP_AMPLITUDE) + EXP_RATE * x + bend * curvature)
    w_late = w_early[-1] + np.cumsum(y_lw[1969:])
    w = np.concatenate([w_early, w_late])

    late_years = years[1969:]
    e_late = w_late / (FLAT_INTERCEPT + FLAT_SLOPE * (late_years - 1970))
    e_early = SUPPLEMENT_E_YEAR_1 * (e_late[0] / SUPPLEMENT_E_YEAR_1) ** (
        (x - 1) / 1969
    )
    e = np.concatenate([e_early, e_late])
    lw_years = sorted(LW_POPULATION)
    population = np.interp(years, lw_years, [LW_POPULATION[y] for y in lw_years])
    return {
        "year": years,
        "Y": y_lw,
        "E": e,
        "W": w,
        "W_over_E": w / e,
        "Pop": population,
    }


def write_data_dir(
    path: Path, gdp_anchors: Optional[Dict[int, float]] = None
) -> Path:
    """Write every input table the pipeline reads into a directory.

    ``gdp_anchors`` replaces the OWID GWP table only; the supplement stays
    on the reference GWP.
    """
    path.mkdir(parents=True, exist_ok=True)
    _write_csv(
        path / "owid_gdp.csv",
        ["year", "gdp"],
        [
            (year, value * 1e12)
            for year, value in sorted((gdp_anchors or GDP_ANCHORS).items())
        ],
    )
    _write_csv(path / "fred_gwp.csv", ["year", "gwp"], sorted(FRED_GWP.items()))
    sources = list(SOURCE_SHARES)
    _write_csv(
        path / "owid_energy.csv",
        ["year"] + sources,
        [
            [year] + [total * SOURCE_SHARES[name] / 0.0036 for name in sources]
            for year, total in sorted(energy_by_year().items())
        ],
    )
    _write_csv(
        path / "population.csv",
        ["year", "lw", "hyde", "un"],
        [
            (
                year,
                LW_POPULATION.get(year),
                HYDE_POPULATION.get(year),
                UN_POPULATION.get(year),
            )
            for year in sorted(set(LW_POPULATION) | set(HYDE_POPULATION))
        ],
    )
    _write_csv(path / "cpi.csv", ["year", "cpi"], list(zip(range(1969, 2020), CPI)))
    table = supplement_table()
    header = list(table)
    _write_csv(
        path / "supplement.csv",
        header,
        [
            [int(table["year"][i])] + [float(table[name][i]) for name in header[1:]]
            for i in range(table["year"].size)
        ],
    )
    return path


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    """Directory with the full synthetic input set."""
    return write_data_dir(tmp_path_factory.mktemp("data"))


@pytest.fixture
def run_config(data_dir, tmp_path) -> RunConfig:
    """Run configuration reading the synthetic inputs."""
    return RunConfig(data_dir=data_dir, out_dir=tmp_path / "out")


@pytest.fixture
def pipeline(run_config) -> DatasetPipeline:
    """Pipeline over the synthetic inputs."""
    return DatasetPipeline(run_config)
