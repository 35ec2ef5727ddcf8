"""This downloads the raw CSV exports the datasets are built from.

The files are saved as served; their column names usually need a matching
``inputs`` section in the run configuration.
"""
import logging
from pathlib import Path

import asyncclick as click
from aiohttp import ClientSession, ClientTimeout, client_exceptions

FRED_GRAPH_CSV = "https://fred.stlouisfed.org/graph/fredgraph.csv?id={series_id}"

_LOGGER = logging.getLogger(__name__)


def _parse_source(value: str):
    name, sep, url = value.partition("=")
    if not sep or not name or not url:
        raise click.BadParameter(f"expected NAME=URL, got {value!r}")
    return name, url


@click.command()
@click.option(
    "--data-dir",
    envvar="THERMOECON_DATA_DIR",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("data"),
)
@click.option(
    "-s",
    "--source",
    "sources",
    multiple=True,
    help="NAME=URL; the file is saved as NAME.csv.",
)
@click.option(
    "--fred",
    "fred_series",
    multiple=True,
    help="NAME=SERIES_ID of a FRED series; saved as NAME.csv.",
)
@click.option("-d", "--debug", is_flag=True)
async def cli(data_dir, sources, fred_series, debug):
    """Download source tables into the data directory."""
    if debug:
        logging.basicConfig(level=logging.DEBUG)

    targets = [_parse_source(value) for value in sources]
    for value in fred_series:
        name, series_id = _parse_source(value)
        targets.append((name, FRED_GRAPH_CSV.format(series_id=series_id)))
    if not targets:
        click.echo("Nothing to fetch, give --source or --fred")
        return

    data_dir.mkdir(parents=True, exist_ok=True)
    failed = 0
    async with ClientSession(timeout=ClientTimeout(total=120)) as session:
        for name, url in targets:
            _LOGGER.debug(f"Fetching {url}")
            try:
                async with session.get(url) as response:
                    response.raise_for_status()
                    body = await response.read()
            except (client_exceptions.ClientError, TimeoutError) as ex:
                click.echo(click.style(f"Error: {name}: {ex}", fg="red"), err=True)
                failed += 1
                continue
            target = data_dir / f"{name}.csv"
            target.write_bytes(body)
            click.echo(f"Saved {url} to {target} ({len(body)} bytes)")
    if failed:
        raise click.exceptions.Exit(1)


if __name__ == "__main__":
    cli()
