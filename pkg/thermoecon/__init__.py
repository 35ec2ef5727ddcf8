"""Rebuild long-run world GWP and energy datasets and test the W/E claims.

Datasets are built through `DatasetPipeline` from a `RunConfig`::

    pipeline = DatasetPipeline(RunConfig(data_dir=Path("data")))
    e_rep, y_rep = await pipeline.build(["E_Rep", "Y_Rep"])

The builders, fits and tests are also usable directly on `AnnualSeries`.

Module-specific errors are raised as `ThermoEconException` subclasses and are
expected to be handled by the user of the library.
"""

from importlib_metadata import version  # type: ignore

from thermoecon.analysis import (
    ConstancyVerdict,
    ExpFit,
    InflationReport,
    LinearFit,
    fit_exponential,
    fit_linear,
    test_de_dt_inflation,
    test_w_over_e_constancy,
)
from thermoecon.config import AnalysisConfig, ReconstructionConfig, RunConfig
from thermoecon.exceptions import (
    AnalysisError,
    IngestError,
    ModelError,
    ReconstructionError,
    SeriesError,
    ThermoEconException,
    UnitError,
)
from thermoecon.ingest import read_series, read_supplement, write_outputs
from thermoecon.pipeline import DatasetPipeline
from thermoecon.reconstruction import (
    InterpolationMethod,
    MorrisTable,
    build_e_rep,
    build_morris_extension,
    build_population,
    build_w,
    build_y_rep,
)
from thermoecon.series import AnnualSeries, YearRange
from thermoecon.units import UnitKind, UnitTag

__version__ = version("python-thermoecon")


__all__ = [
    "AnnualSeries",
    "YearRange",
    "UnitKind",
    "UnitTag",
    "DatasetPipeline",
    "RunConfig",
    "ReconstructionConfig",
    "AnalysisConfig",
    "InterpolationMethod",
    "MorrisTable",
    "build_y_rep",
    "build_e_rep",
    "build_morris_extension",
    "build_population",
    "build_w",
    "fit_linear",
    "fit_exponential",
    "test_w_over_e_constancy",
    "test_de_dt_inflation",
    "LinearFit",
    "ExpFit",
    "ConstancyVerdict",
    "InflationReport",
    "read_series",
    "read_supplement",
    "write_outputs",
    "ThermoEconException",
    "SeriesError",
    "UnitError",
    "ModelError",
    "ReconstructionError",
    "AnalysisError",
    "IngestError",
]
