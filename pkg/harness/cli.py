#!/usr/bin/env python3
"""
eigensense command line.

    eigensense cdf       --config configs/med_cdf.yaml
    eigensense threshold --config configs/cnd_threshold.yaml --out thresholds.csv
    eigensense detect    --config configs/cnd_detection.yaml --workers 4
    eigensense sweep     --config configs/sweep_cnd_n.yaml --format json
    eigensense --cache-dir .tables tables --K 2 --K 3 --case real

Results go to --out, or to standard output when no path is given. Logs
and progress go to standard error. Exit codes: 0 success, 2 invalid
configuration, 1 runtime failure.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click
from rich.console import Console
from rich.logging import RichHandler

from core.errors import ConfigError, EigenSenseError
from core.types import ValueCase
from rmt.laws import configure_cache
from .config import ExperimentSpec, build_spec, load_spec_data
from .emit import emit, serialize
from .experiments import prebuild_tables, run_experiment

logger = logging.getLogger(__name__)

EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def setup_logging(verbose: bool):
    handler = RichHandler(console=Console(stderr=True), show_path=False, show_time=False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True,
    )
    logging.getLogger("harness").setLevel(logging.DEBUG if verbose else logging.INFO)


SUMMARY_KEYS = ("ks_fixedk", "ks_largek", "max_abs_error_fixedk", "max_abs_error_largek")


def log_summary(metadata: Dict[str, Any]):
    """KS distances and worst P_d errors as one log line."""
    summary = [f"{key}={metadata[key]:.6g}" for key in SUMMARY_KEYS
               if metadata.get(key) is not None]
    if summary:
        logger.info(" ".join(summary))


def _fail(message: str, code: int):
    click.echo(message, err=True)
    sys.exit(code)


# -------------------------
# SHARED OPTIONS
# -------------------------

def experiment_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="YAML experiment file."),
        click.option("--seed", type=int, help="Master seed (unsigned 64-bit)."),
        click.option("--workers", type=int, help="Worker processes for Monte Carlo runs."),
        click.option("--out", "out_path", type=click.Path(dir_okay=False),
                     help="Output file; standard output when omitted."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     help="Output format."),
        click.option("--K", "K", type=int, help="Number of antennas."),
        click.option("--N", "N", type=int, help="Samples per antenna."),
        click.option("--case", type=click.Choice(["real", "complex"], case_sensitive=False)),
        click.option("--detector", type=click.Choice(["MED", "CND"], case_sensitive=False)),
        click.option("--snr-db", "snr_db", type=float, help="Target SNR in dB (S1)."),
        click.option("--pfa", type=float, multiple=True,
                     help="Target false-alarm probability; repeat for a grid."),
        click.option("--runs", type=int, help="Monte Carlo runs."),
        click.option("--timing", is_flag=True, help="Include wall time in the output."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_spec(experiment: str, config_path: Optional[str],
                 flags: Dict[str, Any]) -> ExperimentSpec:
    """defaults < config file < command-line flags."""
    data: Dict[str, Any] = {}
    if experiment in ("detection", "sweep"):
        data["scenario"] = "S1"
    if config_path:
        file_data = load_spec_data(Path(config_path))
        declared = file_data.get("experiment")
        if declared is not None and declared != experiment:
            logger.warning(
                f"Config declares experiment '{declared}'; running '{experiment}' as requested"
            )
        data.update(file_data)
    data["experiment"] = experiment
    data.update({k: v for k, v in flags.items() if v is not None})
    return build_spec(data)


def _run(ctx: click.Context, experiment: str, config_path, seed, workers, out_path, fmt,
         K, N, case, detector, snr_db, pfa, runs, timing, **extra):
    flags = {
        "seed": seed,
        "workers": workers,
        "output_path": out_path,
        "emit": fmt,
        "K": K,
        "N": N,
        "case": case,
        "detector": detector,
        "snr_db": snr_db,
        "pfa_grid": list(pfa) if pfa else None,
        "n_runs": runs,
        **extra,
    }
    try:
        spec = resolve_spec(experiment, config_path, flags)
        logger.info(f"Seed {spec.seed}")
        result = run_experiment(spec, show_progress=sys.stderr.isatty())
        if spec.output_path:
            path = emit(result, Path(spec.output_path), format=spec.emit, timing=timing)
            logger.info(f"Results written to {path}")
        else:
            click.echo(serialize(result, spec.emit, timing=timing), nl=False)
            if spec.emit == "csv":
                log_summary(result.metadata)
    except ConfigError as e:
        _fail(f"Configuration error: {e}", EXIT_CONFIG)
    except (EigenSenseError, OSError) as e:
        _fail(f"{experiment} failed: {e}", EXIT_RUNTIME)


# -------------------------
# COMMANDS
# -------------------------

@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on standard error.")
@click.option("--cache-dir", type=click.Path(file_okay=False),
              help="Directory for cached distribution tables.")
@click.pass_context
def main(ctx: click.Context, verbose: bool, cache_dir: Optional[str]):
    """Eigenvalue-based spectrum sensing experiments."""
    setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["cache_dir"] = cache_dir
    if cache_dir:
        configure_cache(Path(cache_dir))


@main.command()
@experiment_options
@click.pass_context
def cdf(ctx, **kwargs):
    """Simulated vs. theoretical CDF of the regulated statistic."""
    _run(ctx, "cdf", **kwargs)


@main.command()
@experiment_options
@click.pass_context
def threshold(ctx, **kwargs):
    """Thresholds under S0: fixed-K, large-(K, N) and simulated."""
    _run(ctx, "threshold", **kwargs)


@main.command()
@experiment_options
@click.option("--calibration", type=click.Choice(["simulation", "theory"]),
              help="Where detection thresholds come from.")
@click.pass_context
def detect(ctx, **kwargs):
    """Detection probability under S1 at calibrated thresholds."""
    _run(ctx, "detection", **kwargs)


@main.command()
@experiment_options
@click.option("--axis", "sweep_axis", type=click.Choice(["snr_db", "N"]),
              help="Quantity to sweep.")
@click.option("--value", "sweep_values", type=float, multiple=True,
              help="Sweep value; repeat for each point.")
@click.pass_context
def sweep(ctx, sweep_values, **kwargs):
    """Detection probability along an SNR or N axis."""
    _run(ctx, "sweep", sweep_values=list(sweep_values) if sweep_values else None, **kwargs)


@main.command()
@click.option("--K", "Ks", type=int, multiple=True, required=True, help="Antenna count; repeatable.")
@click.option("--case", "cases", type=click.Choice(["real", "complex"], case_sensitive=False),
              multiple=True, help="Value case; repeatable (default: both).")
@click.option("--leading", type=click.Choice(["general", "printed"]), default="general")
@click.pass_context
def tables(ctx, Ks, cases, leading):
    """Pre-build distribution tables into the cache."""
    if not ctx.obj.get("cache_dir"):
        _fail("Configuration error: tables needs --cache-dir", EXIT_CONFIG)
    if any(K < 1 for K in Ks):
        _fail(f"Configuration error: K must be >= 1, got {list(Ks)}", EXIT_CONFIG)
    selected = [ValueCase.parse(c) for c in cases] or [ValueCase.REAL, ValueCase.COMPLEX]
    try:
        for description in prebuild_tables(list(Ks), selected, leading=leading):
            click.echo(description)
    except (EigenSenseError, OSError) as e:
        _fail(f"tables failed: {e}", EXIT_RUNTIME)


if __name__ == "__main__":
    main()
