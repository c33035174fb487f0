#!/usr/bin/env python3
"""
Command-line surface of the toolkit.

Usage:
    python -m phlo.cli.main verify --config configs/default.yaml --report report.json
    python -m phlo.cli.main sample --config configs/default.yaml --grid 33,33,33 --xi 0 --out tube.csv
    python -m phlo.cli.main energy --config configs/default.yaml
    python -m phlo.cli.main star-table

Exit codes: 0 when every check passes, 1 on a failed check, 2 on usage or
configuration errors.
"""

import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from ..core.config import settings
from ..core.errors import ConfigError, CoverageError
from ..core.logging import get_logger, setup_logging
from ..forms.exterior import star_table
from ..models.schemas import RunConfig
from ..services.energy_service import EnergyService
from ..services.sampling_service import SamplingService, parse_grid
from ..services.verification_service import VerificationService

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _load(config_path: Path) -> Tuple[RunConfig, str]:
    try:
        return RunConfig.from_yaml(config_path)
    except ConfigError as e:
        logger.error("Invalid configuration", config=str(config_path), error=str(e))
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)


def _write(path: Optional[Path], text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error("Cannot write output", path=str(path), error=str(e))
        click.echo(f"error: cannot write {path}: {e}", err=True)
        sys.exit(EXIT_USAGE)


def _grid(ctx: click.Context, param: click.Parameter, value: str) -> Tuple[int, int, int]:
    try:
        return parse_grid(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


@click.group()
def cli() -> None:
    """Exterior-calculus checks and integrals for helical null-field solutions."""
    setup_logging()


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path), help="YAML run config")
@click.option("--report", "report_path", type=click.Path(path_type=Path), default=None, help="Where to write the JSON report")
@click.option("--seed", type=int, default=None, help="Override the sweep seed")
def verify(config_path: Path, report_path: Optional[Path], seed: Optional[int]) -> None:
    """Run the verification suites and write a JSON report."""
    run, sha256 = _load(config_path)
    try:
        service = VerificationService(run, seed=seed, config_sha256=sha256)
        report = service.run_suites()
    except ConfigError as e:
        logger.error("Verification aborted", error=str(e))
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)

    _write(report_path or run.output.report, report.to_json(settings.REPORT_INDENT))
    logger.info("Verification finished", passed=report.passed, sections=len(report.sections))
    sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path), help="YAML run config")
@click.option("--grid", "counts", required=True, callback=_grid, help="Sample counts as nx,ny,nz")
@click.option("--xi", type=float, default=0.0, show_default=True, help="Slice xi = c t")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None, help="CSV destination")
def sample(config_path: Path, counts: Tuple[int, int, int], xi: float, out_path: Optional[Path]) -> None:
    """Sample the solution field on an nx*ny*nz grid of one xi slice."""
    run, _ = _load(config_path)
    try:
        service = SamplingService(run.phlo)
    except ConfigError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)

    out_path = out_path or run.output.sample
    if out_path is None:
        service.write_csv(sys.stdout, counts, xi)
        sys.exit(EXIT_OK)
    try:
        service.write_file(out_path, counts, xi)
    except OSError as e:
        logger.error("Cannot write samples", path=str(out_path), error=str(e))
        click.echo(f"error: cannot write {out_path}: {e}", err=True)
        sys.exit(EXIT_USAGE)
    sys.exit(EXIT_OK)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path), help="YAML run config")
def energy(config_path: Path) -> None:
    """Print E, T, the one-period action and action / (E T)."""
    run, _ = _load(config_path)
    try:
        report = EnergyService(run.phlo).compute()
    except ConfigError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except CoverageError as e:
        logger.error("Grid does not cover the support", error=str(e))
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_FAILED)

    click.echo(report.to_text(), nl=False)
    sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


@cli.command("star-table")
def star_table_command() -> None:
    """Print the Hodge star on all 16 basis monomials."""
    for line in star_table().lines():
        click.echo(line)


def main() -> None:
    """Main CLI entry point."""
    cli()


if __name__ == "__main__":
    main()
