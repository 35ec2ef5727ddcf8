"""Run-level orchestration: read inputs, build datasets and run analyses."""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import anyio

from . import analysis
from .claims import (
    Claim,
    composite_claims,
    constant_claims,
    deep_time_claims,
    efficiency_claims,
    exp_fit_claims,
    flat_fit_claims,
    implied_w_claims,
    inflation_claims,
    morris_claims,
    w_over_e_claims,
)
from .config import SERIES_LABELS, SUPPLEMENT_LABELS, RunConfig
from .exceptions import ThermoEconException
from .ingest import SupplementColumns, read_series, read_supplement, write_outputs
from .reconstruction import (
    BuildNotes,
    InterpolationMethod,
    build_e_rep,
    build_morris_extension,
    build_population,
    build_w,
    build_y_rep,
    deep_time_w_offset,
    extend_with_morris,
    load_morris_table,
    project_w_lw_backward,
)
from .series import AnnualSeries, YearRange, restrict
from .units import trillion_usd

_LOGGER = logging.getLogger(__name__)

CPI_LABEL = "CPI"

# input files each label needs, directly or through the labels it is built from
REQUIREMENTS: Dict[str, Tuple[str, ...]] = {
    "Pop": ("population",),
    "Y_Rep": ("owid_gdp", "fred_gwp"),
    "E_Rep": ("owid_energy", "population"),
    "Y_RepMorris": ("morris", "population", "owid_gdp", "fred_gwp"),
    "E_RepMorris": ("morris", "population", "owid_energy"),
    "W_sum_LW": ("supplement",),
    "W_sum_RepMorris": ("morris", "population", "owid_gdp", "fred_gwp"),
    "W_LW_proj": (),
    CPI_LABEL: ("cpi",),
    **{label: ("supplement",) for label in SUPPLEMENT_LABELS},
}


class DatasetPipeline:
    """Build datasets on demand from the files a `RunConfig` names.

    Input files are read concurrently the first time a dataset needs them;
    built series are cached, so every label is computed once per pipeline.
    """

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.notes = BuildNotes()
        self._raw: Dict[str, Any] = {}
        self._built: Dict[str, AnnualSeries] = {}
        self._morris: Optional[Tuple[AnnualSeries, AnnualSeries]] = None

    @property
    def known_labels(self) -> List[str]:
        """Return every label `resolve` accepts."""
        return list(REQUIREMENTS)

    def _readers(self) -> Dict[str, Callable[[], Any]]:
        inputs = self.config.inputs_resolved
        reconstruction = self.config.reconstruction
        return {
            "owid_gdp": lambda: read_series(inputs.owid_gdp)[0],
            "fred_gwp": lambda: read_series(inputs.fred_gwp)[0],
            "owid_energy": lambda: read_series(inputs.owid_energy),
            "population": lambda: read_series(inputs.population),
            "cpi": lambda: read_series(inputs.cpi)[0].relabel(CPI_LABEL),
            "supplement": lambda: read_supplement(
                inputs.supplement, inputs.supplement_columns
            ),
            "morris": lambda: load_morris_table(inputs.morris, reconstruction),
        }

    async def load(self, names: Iterable[str]) -> None:
        """Read the named inputs that are not loaded yet, in parallel."""
        readers = self._readers()
        missing = sorted(set(names) - set(self._raw))
        if not missing:
            return
        _LOGGER.debug(f"Reading inputs: {', '.join(missing)}")
        errors: Dict[str, ThermoEconException] = {}

        async def _read(name: str) -> None:
            try:
                self._raw[name] = await anyio.to_thread.run_sync(readers[name])
            except ThermoEconException as ex:
                errors[name] = ex

        async with anyio.create_task_group() as tg:
            for name in missing:
                tg.start_soon(_read, name)
        for name in missing:
            if name in errors:
                raise errors[name]

    async def series(self, labels: Sequence[str]) -> Dict[str, AnnualSeries]:
        """Return the requested series, loading and building what they need."""
        needed = set()
        for label in labels:
            if label not in REQUIREMENTS:
                raise ThermoEconException(
                    f"unknown series {label!r}, valid labels: {', '.join(REQUIREMENTS)}"
                )
            needed.update(REQUIREMENTS[label])
        await self.load(needed)
        return {label: self.resolve(label) for label in labels}

    @property
    def supplement(self) -> SupplementColumns:
        """Return the loaded supplement columns."""
        return self._raw["supplement"]

    def resolve(self, label: str) -> AnnualSeries:
        """Return a series whose inputs are already loaded, building it once."""
        if label not in self._built:
            self._built[label] = self._build(label)
        return self._built[label]

    def _morris_part(self) -> Tuple[AnnualSeries, AnnualSeries]:
        if self._morris is None:
            self._morris = build_morris_extension(
                self._raw["morris"],
                self.resolve("Pop"),
                self.config.reconstruction,
                self.notes,
            )
        return self._morris

    def _build(self, label: str) -> AnnualSeries:
        cfg = self.config.reconstruction
        if label in SUPPLEMENT_LABELS:
            return self.supplement.by_label[label]
        if label == CPI_LABEL:
            return self._raw["cpi"]
        if label == "Pop":
            return build_population(
                self._raw["population"], self.config.inputs.population_priority
            )
        if label == "Y_Rep":
            return build_y_rep(self._raw["owid_gdp"], self._raw["fred_gwp"], cfg)
        if label == "E_Rep":
            return build_e_rep(
                self._raw["owid_energy"],
                self.resolve("Pop"),
                cfg,
                InterpolationMethod.parse(cfg.energy_method),
                self.notes,
            )
        if label == "E_RepMorris":
            return extend_with_morris(self._morris_part()[0], self.resolve("E_Rep"))
        if label == "Y_RepMorris":
            return extend_with_morris(self._morris_part()[1], self.resolve("Y_Rep"))
        if label == "W_sum_LW":
            return build_w(
                self.supplement.y, start=1, truncate=cfg.truncate_w_years, label=label
            )
        if label == "W_sum_RepMorris":
            return build_w(
                self.resolve("Y_RepMorris"),
                start=cfg.morris_start,
                initial=cfg.initial_w,
                label=label,
            )
        if label == "W_LW_proj":
            return project_w_lw_backward(
                cfg.w_lw_fit,
                YearRange(cfg.morris_start, 0),
                unit=trillion_usd(cfg.currency_base_year),
            )
        raise ThermoEconException(f"no builder for {label}")

    async def build(self, labels: Sequence[str] = SERIES_LABELS) -> List[AnnualSeries]:
        """Build datasets in the order given."""
        built = await self.series(labels)
        return [built[label] for label in labels]

    async def analyze_w_over_e(
        self,
        year_range: Optional[YearRange] = None,
        threshold: Optional[float] = None,
    ) -> Tuple[analysis.ConstancyVerdict, analysis.ConstancyVerdict, List[Claim]]:
        """Test W_sum_RepMorris/E_Rep and W_LW/E_LW for constancy."""
        acfg = self.config.analysis
        year_range = year_range or acfg.window.as_range()
        threshold = threshold if threshold is not None else acfg.threshold
        data = await self.series(["W_sum_RepMorris", "E_Rep", "W_LW", "E_LW"])
        rep = analysis.test_w_over_e_constancy(
            data["W_sum_RepMorris"], data["E_Rep"], year_range, threshold, acfg.x_origin
        )
        lw = analysis.test_w_over_e_constancy(
            data["W_LW"], data["E_LW"], year_range, threshold, acfg.x_origin
        )
        return rep, lw, w_over_e_claims(rep, lw)

    async def analyze_inflation(
        self, cutoff: Optional[float] = None
    ) -> Tuple[analysis.InflationReport, List[Claim]]:
        """Compare dE/dt of E_Rep with CPI over the analysis window."""
        acfg = self.config.analysis
        data = await self.series(["E_Rep", CPI_LABEL])
        report = analysis.test_de_dt_inflation(
            data["E_Rep"],
            data[CPI_LABEL],
            outlier_cutoff=cutoff if cutoff is not None else acfg.outlier_cutoff,
            year_range=acfg.window.as_range(),
            divergence_window=acfg.divergence_window,
            divergence_factor=acfg.divergence_factor,
            min_overlap=acfg.min_overlap,
        )
        return report, inflation_claims(report)

    async def analyze_y_over_e(self) -> List[analysis.ConstancyVerdict]:
        """Inspect Y/E before 1 CE (Morris) and over the analysis window (Rep)."""
        acfg = self.config.analysis
        cfg = self.config.reconstruction
        data = await self.series(["Y_RepMorris", "E_RepMorris", "Y_Rep", "E_Rep"])
        return [
            analysis.test_y_over_e_flatness(
                data["Y_RepMorris"],
                data["E_RepMorris"],
                YearRange(cfg.morris_start, 1),
                acfg.threshold,
            ),
            analysis.test_y_over_e_flatness(
                data["Y_Rep"], data["E_Rep"], acfg.window.as_range(), acfg.threshold
            ),
        ]

    async def fit_exponential(
        self, label: str, year_range: Optional[YearRange] = None, x_origin: int = 0
    ) -> Tuple[analysis.ExpFit, List[Claim]]:
        """Fit a series exponentially; W_LW also gets its reproduction checks."""
        year_range = year_range or self.config.analysis.exp_fit_window.as_range()
        series = (await self.series([label]))[label]
        fit = analysis.fit_exponential(series, year_range, x_origin)
        return fit, exp_fit_claims(fit) if label == "W_LW" else []

    async def fit_linear(
        self, label: str, year_range: Optional[YearRange] = None, x_origin: int = 1970
    ) -> Tuple[analysis.LinearFit, List[Claim]]:
        """Fit a series linearly; W_over_E also gets its reproduction checks."""
        year_range = year_range or self.config.analysis.flat_fit_window.as_range()
        series = (await self.series([label]))[label]
        fit = analysis.fit_linear(series, year_range, x_origin)
        return fit, flat_fit_claims(fit) if label == "W_over_E" else []

    async def composite_check(self) -> Tuple[analysis.RatioStats, List[Claim]]:
        """Compare Y_Rep with Y_LW."""
        data = await self.series(["Y_Rep", "Y_LW"])
        stats = analysis.mean_ratio(data["Y_Rep"], data["Y_LW"])
        return stats, composite_claims(stats)

    async def analyze_lambda(
        self, year: Optional[int] = None
    ) -> Tuple[analysis.EfficiencyReport, List[Claim]]:
        """Return Lambda = E_Rep/Y_Rep over the analysis window."""
        data = await self.series(["Y_Rep", "E_Rep"])
        report = analysis.production_efficiency(
            data["Y_Rep"], data["E_Rep"], self.config.analysis.window.as_range(), year
        )
        return report, efficiency_claims(report)

    async def analyze_implied_w(self) -> Tuple[analysis.ImpliedW, List[Claim]]:
        """Divide Y_Rep by dE_Rep/dt over the analysis window."""
        window = self.config.analysis.window.as_range()
        data = await self.series(["Y_Rep", "E_Rep"])
        result = analysis.implied_w(
            restrict(data["Y_Rep"], window),
            restrict(data["E_Rep"], YearRange(window.start - 1, window.end)),
        )
        return result, implied_w_claims(result)

    async def morris_check(self) -> List[Claim]:
        """Check the Morris extension and report the deep-time offset."""
        await self.series(["Pop"])
        await self.load(["morris"])
        e_morris, y_morris = self._morris_part()
        cfg = self.config.reconstruction
        offset = deep_time_w_offset(gk_ratio=cfg.gk_ratio)
        return morris_claims(e_morris, y_morris, cfg) + deep_time_claims(offset)

    async def run_analyses(self) -> Tuple[List[Any], List[Claim]]:
        """Run every analysis the configuration selects."""
        reports: List[Any] = []
        claims: List[Claim] = list(constant_claims())
        selected = self.config.analyses
        if "w-over-e" in selected:
            rep, lw, found = await self.analyze_w_over_e()
            reports += [rep, lw]
            claims += found
        if "inflation" in selected:
            report, found = await self.analyze_inflation()
            reports.append(report)
            claims += found
        if "y-over-e" in selected:
            reports += await self.analyze_y_over_e()
        if "exp-fit" in selected:
            fit, found = await self.fit_exponential("W_LW", x_origin=0)
            reports.append(fit)
            claims += found
        if "flat-fit" in selected:
            fit, found = await self.fit_linear(
                "W_over_E", x_origin=self.config.analysis.x_origin
            )
            reports.append(fit)
            claims += found
        if "composite" in selected:
            stats, found = await self.composite_check()
            reports.append(stats)
            claims += found
        if "lambda" in selected:
            report, found = await self.analyze_lambda()
            reports.append(report)
            claims += found
        if "implied-w" in selected:
            result, found = await self.analyze_implied_w()
            reports.append(result)
            claims += found
        return reports, claims

    def output_path(self, fmt: str) -> Path:
        """Return where outputs of a format go."""
        out_dir = self.config.out_dir
        return out_dir if fmt == "csv" else out_dir / "thermoecon.json"

    def write(
        self, series: Sequence[AnnualSeries], reports: Sequence[Any], fmt: str
    ) -> List[Path]:
        """Write series and reports under the output directory."""
        return write_outputs(series, reports, fmt, self.output_path(fmt))
