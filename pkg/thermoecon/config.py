"""Configuration models for reconstruction, analysis, ingest and whole runs."""
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import UnitError
from .series import YearRange
from .units import UnitTag

_LOGGER = logging.getLogger(__name__)

SERIES_LABELS = (
    "Y_Rep",
    "E_Rep",
    "Y_RepMorris",
    "E_RepMorris",
    "W_sum_LW",
    "W_sum_RepMorris",
    "W_LW_proj",
    "Pop",
)
SUPPLEMENT_LABELS = ("Y_LW", "E_LW", "W_LW", "W_over_E")

DATASET_CHOICES = {
    "y-rep": "Y_Rep",
    "e-rep": "E_Rep",
    "y-rep-morris": "Y_RepMorris",
    "e-rep-morris": "E_RepMorris",
    "w-sum-lw": "W_sum_LW",
    "w-sum-rep-morris": "W_sum_RepMorris",
    "w-lw-proj": "W_LW_proj",
    "pop": "Pop",
}
ANALYSIS_NAMES = (
    "w-over-e",
    "inflation",
    "y-over-e",
    "exp-fit",
    "flat-fit",
    "composite",
    "lambda",
    "implied-w",
)


class ExpParameters(BaseModel):
    """Amplitude and yearly rate of W(x) = amplitude * exp(rate * x)."""

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(gt=0)
    rate: float


W_LW_FIT_PRESETS = {
    "figure": ExpParameters(amplitude=244.064, rate=5.596e-4),
    "text": ExpParameters(amplitude=2.440, rate=5.965e-4),
}


class YearWindow(BaseModel):
    """Inclusive year window as it appears in configuration files."""

    model_config = ConfigDict(frozen=True)

    start: int
    end: int

    @model_validator(mode="after")
    def _ordered(self) -> "YearWindow":
        if self.start > self.end:
            raise ValueError(f"window starts after it ends: {self.start}..{self.end}")
        return self

    def as_range(self) -> YearRange:
        """Return the window as a YearRange."""
        return YearRange(self.start, self.end)


class ReconstructionConfig(BaseModel):
    """Constants and boundaries used to build the historical datasets."""

    model_config = ConfigDict(frozen=True)

    year1_energy_ej: float = Field(5.45875, gt=0)
    gk_ratio: float = Field(0.03827, gt=0)
    e_1800_ej: float = Field(20.3508, gt=0)
    w_lw_fit: ExpParameters = W_LW_FIT_PRESETS["figure"]
    truncate_w_years: int = Field(1000, ge=0)
    energy_method: Literal["A", "B"] = "B"
    exponential_until: int = 1820
    linear_until: int = 1960
    composite_until: int = 1990
    energy_anchor_year: int = 1800
    morris_populations_1ce: Dict[str, float] = Field(
        default_factory=lambda: {"west": 34e6, "east": 74e6, "americas": 6e6}
    )
    morris_total_1ce: float = Field(226e6, gt=0)
    morris_anchor_tolerance: float = Field(1e-3, gt=0)
    morris_start: int = -14000
    currency_base_year: int = 1990
    initial_w: float = Field(0.0, ge=0)

    @field_validator("w_lw_fit", mode="before")
    @classmethod
    def _preset(cls, value: Union[str, dict, ExpParameters]):
        if isinstance(value, str):
            try:
                return W_LW_FIT_PRESETS[value]
            except KeyError:
                raise ValueError(
                    f"unknown fit preset {value!r}, expected one of "
                    f"{', '.join(W_LW_FIT_PRESETS)}"
                ) from None
        return value

    @field_validator("morris_populations_1ce")
    @classmethod
    def _positive_groups(cls, value: Dict[str, float]) -> Dict[str, float]:
        for group, population in value.items():
            if population < 0:
                raise ValueError(f"population of {group} must not be negative")
        return value

    @model_validator(mode="after")
    def _boundaries(self) -> "ReconstructionConfig":
        if not self.exponential_until < self.linear_until < self.composite_until:
            raise ValueError(
                "composite boundaries must satisfy "
                "exponential_until < linear_until < composite_until"
            )
        if sum(self.morris_populations_1ce.values()) > self.morris_total_1ce:
            raise ValueError("civilization populations exceed the 1 CE total")
        if self.morris_start >= 1:
            raise ValueError("the Morris extension must start before 1 CE")
        return self


class AnalysisConfig(BaseModel):
    """Thresholds and windows of the falsification tests."""

    model_config = ConfigDict(frozen=True)

    threshold: float = Field(0.05, gt=0)
    window: YearWindow = YearWindow(start=1970, end=2019)
    x_origin: int = 1970
    flat_fit_window: YearWindow = YearWindow(start=1970, end=2020)
    exp_fit_window: YearWindow = YearWindow(start=1, end=1969)
    outlier_cutoff: float = Field(10.0, gt=0)
    divergence_window: int = Field(1, ge=0)
    divergence_factor: float = Field(3.0, gt=0)
    min_overlap: int = Field(10, ge=2)


class NaPolicy(str, Enum):
    """What to do with a row whose value cell is empty."""

    SkipRow = "skip_row"
    Error = "error"


class ValueColumn(BaseModel):
    """One value column of a CSV table and the series it becomes."""

    model_config = ConfigDict(frozen=True)

    name: str
    unit: str
    label: Optional[str] = None
    scale: float = Field(1.0, gt=0)

    @field_validator("unit")
    @classmethod
    def _known_unit(cls, value: str) -> str:
        try:
            UnitTag.parse(value)
        except UnitError as ex:
            raise ValueError(str(ex)) from None
        return value

    @property
    def unit_tag(self) -> UnitTag:
        """Return the parsed unit tag."""
        return UnitTag.parse(self.unit)

    @property
    def series_label(self) -> str:
        """Return the label of the resulting series."""
        return self.label or self.name


class CsvTableSpec(BaseModel):
    """Layout of a CSV table with a header row."""

    model_config = ConfigDict(frozen=True)

    path: Path
    delimiter: str = Field(",", min_length=1, max_length=1)
    year_column: str = "year"
    value_columns: List[ValueColumn] = Field(min_length=1)
    na_policy: NaPolicy = NaPolicy.SkipRow

    def with_path(self, path: Path) -> "CsvTableSpec":
        """Return the same layout for another file."""
        return self.model_copy(update={"path": path})


class SupplementMapping(BaseModel):
    """Column names of the Lotka's Wheel supplement export."""

    model_config = ConfigDict(frozen=True)

    year: str = "year"
    y: str = "Y"
    e: str = "E"
    w: str = "W"
    w_over_e: str = "W_over_E"
    population: Optional[str] = "Pop"
    currency_base_year: int = 1990
    cross_check_tolerance: float = Field(0.005, gt=0)


def _energy_sources() -> List[ValueColumn]:
    return [
        ValueColumn(name=name, unit="TWh")
        for name in ("coal", "oil", "gas", "nuclear", "hydro", "biofuels", "other")
    ]


class InputFiles(BaseModel):
    """File names, relative to the data directory, and their layouts."""

    model_config = ConfigDict(frozen=True)

    owid_gdp: CsvTableSpec = CsvTableSpec(
        path=Path("owid_gdp.csv"),
        value_columns=[
            ValueColumn(
                name="gdp", unit="trillion_USD@1990", label="owid_gdp", scale=1e-12
            )
        ],
    )
    fred_gwp: CsvTableSpec = CsvTableSpec(
        path=Path("fred_gwp.csv"),
        value_columns=[
            ValueColumn(
                name="gwp", unit="trillion_USD@2010", label="fred_gwp", scale=1e-3
            )
        ],
    )
    owid_energy: CsvTableSpec = CsvTableSpec(
        path=Path("owid_energy.csv"), value_columns=_energy_sources()
    )
    population: CsvTableSpec = CsvTableSpec(
        path=Path("population.csv"),
        value_columns=[
            ValueColumn(name="lw", unit="person"),
            ValueColumn(name="hyde", unit="person"),
            ValueColumn(name="un", unit="person"),
        ],
    )
    cpi: CsvTableSpec = CsvTableSpec(
        path=Path("cpi.csv"),
        value_columns=[ValueColumn(name="cpi", unit="percent", label="CPI")],
    )
    supplement: Path = Path("supplement.csv")
    supplement_columns: SupplementMapping = SupplementMapping()
    population_priority: Optional[str] = "lw"
    morris: Optional[Path] = None

    def resolve(self, data_dir: Path) -> "InputFiles":
        """Return a copy whose relative paths are anchored at data_dir."""

        def _anchor(path: Path) -> Path:
            return path if path.is_absolute() else data_dir / path

        return self.model_copy(
            update={
                "owid_gdp": self.owid_gdp.with_path(_anchor(self.owid_gdp.path)),
                "fred_gwp": self.fred_gwp.with_path(_anchor(self.fred_gwp.path)),
                "owid_energy": self.owid_energy.with_path(
                    _anchor(self.owid_energy.path)
                ),
                "population": self.population.with_path(_anchor(self.population.path)),
                "cpi": self.cpi.with_path(_anchor(self.cpi.path)),
                "supplement": _anchor(self.supplement),
                "morris": _anchor(self.morris) if self.morris is not None else None,
            }
        )


class RunConfig(BaseModel):
    """Everything a command-line run needs."""

    model_config = ConfigDict(frozen=True)

    data_dir: Path = Path("data")
    out_dir: Path = Path("out")
    datasets: List[str] = Field(default_factory=lambda: list(SERIES_LABELS))
    analyses: List[str] = Field(default_factory=lambda: list(ANALYSIS_NAMES))
    reconstruction: ReconstructionConfig = ReconstructionConfig()
    analysis: AnalysisConfig = AnalysisConfig()
    inputs: InputFiles = InputFiles()

    @field_validator("datasets")
    @classmethod
    def _known_datasets(cls, value: List[str]) -> List[str]:
        unknown = [label for label in value if label not in SERIES_LABELS]
        if unknown:
            raise ValueError(
                f"unknown dataset {unknown[0]!r}, valid labels: {', '.join(SERIES_LABELS)}"
            )
        return value

    @field_validator("analyses")
    @classmethod
    def _known_analyses(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in ANALYSIS_NAMES]
        if unknown:
            raise ValueError(
                f"unknown analysis {unknown[0]!r}, valid names: {', '.join(ANALYSIS_NAMES)}"
            )
        return value

    @classmethod
    def load(cls, path: Optional[Path]) -> "RunConfig":
        """Read a JSON configuration file, or return the defaults."""
        if path is None:
            return cls()
        _LOGGER.debug(f"Loading run configuration from {path}")
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def with_overrides(self, **changes) -> "RunConfig":
        """Return a validated copy with top-level fields replaced."""
        changes = {key: value for key, value in changes.items() if value is not None}
        if not changes:
            return self
        return self.model_validate({**self.model_dump(), **changes})

    @property
    def inputs_resolved(self) -> InputFiles:
        """Return the input table specs anchored at the data directory."""
        return self.inputs.resolve(self.data_dir)
