"""python-thermoecon cli tool."""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, Sequence

import asyncclick as click
from pydantic import ValidationError

from .claims import Claim, all_passed
from .config import DATASET_CHOICES, SERIES_LABELS, RunConfig
from .exceptions import ThermoEconException
from .pipeline import REQUIREMENTS, DatasetPipeline
from .series import YearRange

FORMATS = ["csv", "json"]


@contextmanager
def _exit_on_error(ctx: click.Context) -> Iterator[None]:
    """Turn input and configuration errors into exit status 2."""
    try:
        yield
    except ThermoEconException as ex:
        click.echo(click.style(f"Error: {ex}", fg="red"), err=True)
        ctx.exit(2)
    except ValidationError as ex:
        click.echo(click.style(f"Invalid configuration: {ex}", fg="red"), err=True)
        ctx.exit(2)


def _echo_claims(ctx: click.Context, claims: Sequence[Claim]) -> None:
    """Print one PASS/FAIL line per claim and exit 1 if any failed."""
    for claim in claims:
        click.echo(click.style(claim.line(), fg="green" if claim.passed else "red"))
    if not all_passed(claims):
        ctx.exit(1)


def _echo_warnings(pipeline: DatasetPipeline) -> None:
    for message in pipeline.notes.warnings:
        click.echo(click.style(f"warning: {message}", fg="yellow"), err=True)


def _year_range(
    start: Optional[int], end: Optional[int], default: YearRange
) -> YearRange:
    return YearRange(
        start if start is not None else default.start,
        end if end is not None else default.end,
    )


@click.group()
@click.option(
    "--data-dir",
    envvar="THERMOECON_DATA_DIR",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory holding the input CSV tables.",
)
@click.option(
    "--out-dir",
    envvar="THERMOECON_OUT_DIR",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory outputs are written to.",
)
@click.option(
    "--config",
    envvar="THERMOECON_CONFIG",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="JSON run configuration; flags override its values.",
)
@click.option("-d", "--debug", envvar="THERMOECON_DEBUG", default=False, is_flag=True)
@click.version_option(package_name="python-thermoecon")
@click.pass_context
async def cli(ctx, data_dir, out_dir, config, debug):
    """Rebuild historical GWP and energy datasets and test W/E constancy."""
    if debug:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)

    with _exit_on_error(ctx):
        try:
            run_config = RunConfig.load(config)
        except OSError as ex:
            raise ThermoEconException(f"{config}: cannot read configuration: {ex}")
        ctx.obj = DatasetPipeline(
            run_config.with_overrides(data_dir=data_dir, out_dir=out_dir)
        )


@cli.command()
@click.option(
    "--dataset",
    "datasets",
    multiple=True,
    type=click.Choice(list(DATASET_CHOICES) + ["all"], case_sensitive=False),
    help="Dataset to build; repeat for several. Defaults to the configured set.",
)
@click.option("--method", type=click.Choice(["A", "B"]), default=None)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv")
@click.pass_context
async def build(ctx, datasets, method, fmt):
    """Build datasets and write them to the output directory."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        if method is not None:
            reconstruction = pipeline.config.reconstruction.model_copy(
                update={"energy_method": method}
            )
            pipeline = DatasetPipeline(
                pipeline.config.with_overrides(reconstruction=reconstruction)
            )
        labels: List[str] = list(pipeline.config.datasets)
        if datasets:
            chosen = [name.lower() for name in datasets]
            if "all" in chosen:
                labels = list(SERIES_LABELS)
            else:
                labels = list(dict.fromkeys(DATASET_CHOICES[name] for name in chosen))
        series = await pipeline.build(labels)
        written = pipeline.write(series, [], fmt)
    _echo_warnings(pipeline)
    click.echo(click.style(f"== Built {len(series)} datasets ==", bold=True))
    for path in written:
        click.echo(f"\t{path}")


@cli.group()
def analyze():
    """Run the constancy and inflation analyses."""


@analyze.command(name="w-over-e")
@click.option("--from", "start", type=int, default=None)
@click.option("--to", "end", type=int, default=None)
@click.option("--threshold", type=float, default=None)
@click.pass_context
async def w_over_e(ctx, start, end, threshold):
    """Test whether W/E stays constant over a window."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        window = _year_range(start, end, pipeline.config.analysis.window.as_range())
        rep, lw, claims = await pipeline.analyze_w_over_e(window, threshold)
    _echo_warnings(pipeline)
    for verdict in (rep, lw):
        click.echo(click.style(f"== {verdict.fit.label} {window} ==", bold=True))
        click.echo(f"\tmean: {verdict.mean:.6g}")
        click.echo(
            f"\tslope: {verdict.fit.slope:.6g} per year (R² {verdict.fit.r2:.4f})"
        )
        click.echo(f"\trelative drift: {verdict.relative_slope:.4f}")
        click.echo(
            click.style(
                f"\tfalsified: {verdict.falsified}",
                fg="red" if verdict.falsified else "green",
            )
        )
    _echo_claims(ctx, claims)


@analyze.command()
@click.option("--cutoff", type=float, default=None)
@click.pass_context
async def inflation(ctx, cutoff):
    """Compare year-on-year energy change with CPI inflation."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        report, claims = await pipeline.analyze_inflation(cutoff)
    click.echo(click.style("== dE/dt against CPI ==", bold=True))
    click.echo(f"\tnegative years: {report.negative_years}")
    click.echo(f"\tzero crossings: {report.zero_crossings}")
    click.echo(f"\tlowest: {report.lowest_value:.4g} in {report.lowest_year}")
    click.echo(f"\toutliers above {report.outlier_cutoff:g}: {report.outliers}")
    click.echo(f"\tdivergence at crossings: {report.verdict}")
    _echo_claims(ctx, claims)


@analyze.command(name="y-over-e")
@click.pass_context
async def y_over_e(ctx):
    """Inspect Y/E before 1 CE and over the recent window."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        verdicts = await pipeline.analyze_y_over_e()
    _echo_warnings(pipeline)
    for verdict in verdicts:
        title = f"== {verdict.fit.label} {verdict.fit.range} =="
        click.echo(click.style(title, bold=True))
        click.echo(f"\tmean: {verdict.mean:.6g}")
        click.echo(f"\trelative drift: {verdict.relative_slope:.4g}")
        click.echo(f"\tflat: {not verdict.falsified}")


@analyze.command()
@click.pass_context
async def composite(ctx):
    """Compare the composite GWP with the supplement GWP."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        stats, claims = await pipeline.composite_check()
    click.echo(click.style("== Y_Rep / Y_LW ==", bold=True))
    click.echo(f"\tmean: {stats.mean:.4f}")
    click.echo(f"\tsigma: {stats.sigma:.4f}")
    click.echo(f"\tyears: {stats.n}")
    _echo_claims(ctx, claims)


@analyze.command(name="lambda")
@click.option("--year", type=int, default=None, help="Reporting year.")
@click.pass_context
async def lambda_(ctx, year):
    """Show the production efficiency E_Rep/Y_Rep."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        report, claims = await pipeline.analyze_lambda(year)
    _echo_warnings(pipeline)
    click.echo(click.style(f"== {report.lambda_t.label} ==", bold=True))
    click.echo(f"\tunit: {report.lambda_t.unit}")
    click.echo(f"\tin {report.year}: {report.at_year:.6g}")
    click.echo(f"\tY/E in {report.year}: {report.inverse_at_year:.6g}")
    click.echo(f"\tmean over {report.lambda_t.span}: {report.as_report()['mean']:.6g}")
    _echo_claims(ctx, claims)


@analyze.command(name="implied-w")
@click.pass_context
async def implied_w(ctx):
    """Divide Y_Rep by dE_Rep/dt and list where that breaks down."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        result, claims = await pipeline.analyze_implied_w()
    _echo_warnings(pipeline)
    click.echo(click.style(f"== {result.w.label} ==", bold=True))
    click.echo(f"\tdefined in {len(result.w)} years")
    click.echo(f"\tdE/dt zero in: {result.zero_years}")
    click.echo(f"\tsign changes: {result.sign_changes}")
    _echo_claims(ctx, claims)


@cli.group()
def fit():
    """Fit a series over a year window."""


def _fit_options(func):
    func = click.option("--origin", type=int, default=None)(func)
    func = click.option("--to", "end", type=int, default=None)(func)
    func = click.option("--from", "start", type=int, default=None)(func)
    return click.option(
        "--series", "label", required=True, type=click.Choice(list(REQUIREMENTS))
    )(func)


@fit.command(name="exp")
@_fit_options
@click.pass_context
async def fit_exp(ctx, label, start, end, origin):
    """Fit A·exp(r·(t - origin))."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        window = _year_range(
            start, end, pipeline.config.analysis.exp_fit_window.as_range()
        )
        result, claims = await pipeline.fit_exponential(label, window, origin or 0)
    click.echo(click.style(f"== {result.label} {window} ==", bold=True))
    click.echo(f"\tamplitude: {result.amplitude:.6g}")
    click.echo(f"\trate: {result.rate:.6g}")
    click.echo(f"\tR²: {result.r2:.4f}")
    _echo_claims(ctx, claims)


@fit.command(name="linear")
@_fit_options
@click.pass_context
async def fit_linear(ctx, label, start, end, origin):
    """Fit m·(t - origin) + b."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        window = _year_range(
            start, end, pipeline.config.analysis.flat_fit_window.as_range()
        )
        x_origin = origin if origin is not None else pipeline.config.analysis.x_origin
        result, claims = await pipeline.fit_linear(label, window, x_origin)
    click.echo(click.style(f"== {result.label} {window} ==", bold=True))
    click.echo(f"\tslope: {result.slope:.6g}")
    click.echo(f"\tintercept: {result.intercept:.6g}")
    click.echo(f"\tR²: {result.r2:.4f}")
    _echo_claims(ctx, claims)


@cli.command()
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json")
@click.pass_context
async def export(ctx, fmt):
    """Write the configured datasets with every analysis report."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        series = await pipeline.build(pipeline.config.datasets)
        reports, claims = await pipeline.run_analyses()
        written = pipeline.write(series, reports + claims, fmt)
    _echo_warnings(pipeline)
    for path in written:
        click.echo(f"Wrote {path}")
    _echo_claims(ctx, claims)


@cli.command(name="morris-check")
@click.pass_context
async def morris_check(ctx):
    """Check the Morris extension against the 1 CE anchor."""
    pipeline: DatasetPipeline = ctx.obj
    with _exit_on_error(ctx):
        claims = await pipeline.morris_check()
    _echo_warnings(pipeline)
    _echo_claims(ctx, claims)


if __name__ == "__main__":
    cli()
