#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Command line interface.

Exit codes: 0 success, 1 invalid input or configuration, 2 fit failure
or failed oracle check, 3 numerical failure.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import click
from loguru import logger
from omegaconf import OmegaConf

from feshrf import __version__
from feshrf.config import ENV_CONFIG, load_config
from feshrf.errors import DataError, FeshRFError, FitError, NumericalError
from feshrf.io import (
    FitReport,
    read_points_csv,
    read_spectrum_file,
    write_binding_curve_csv,
    write_spectrum_csv,
)
from feshrf.logging import setup_logger
from feshrf.main import AssociationModel
from feshrf.quantities import from_si, to_si
from feshrf.spectrum import perturbative_parameter
from feshrf.tools.func import parse_range

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FIT = 2
EXIT_NUMERICAL = 3

META_MODEL = "feshrf.model"
META_INPUTS = "feshrf.inputs"
META_DIAGNOSTICS = "feshrf.diagnostics"


class FeshGroup(click.Group):
    """Click group whose usage errors exit with 1 and commands return codes."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs["standalone_mode"] = False
        try:
            code = super().main(*args, **kwargs)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_INPUT)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_INPUT)
        sys.exit(code if isinstance(code, int) else EXIT_OK)


opt_config = click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(dir_okay=False),
    envvar=ENV_CONFIG,
    default=None,
    help="YAML or JSON configuration (defaults to the shipped 40K-87Rb file).",
)
opt_out = click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False, allow_dash=True),
    default="-",
    show_default=True,
    help="Output file, '-' for stdout.",
)
opt_threads = click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=None,
    help="Worker threads, all cores by default.",
)
opt_seed = click.option("--seed", type=int, default=None, help="Random seed.")


def _stream(out: str):
    return click.get_text_stream("stdout") if out == "-" else out


def _model(
    config_path: Optional[str], inputs: Sequence[str] = (), **overrides: Any
) -> AssociationModel:
    """Build the model and remember it, so a failed fit can still report it."""
    cfg = load_config(config_path)
    updates = {k: v for k, v in overrides.items() if v is not None}
    model = AssociationModel(OmegaConf.merge(cfg, updates) if updates else cfg)
    meta = click.get_current_context().meta
    meta[META_MODEL] = model
    meta[META_INPUTS] = list(inputs)
    return model


def _report(
    out: str,
    command: str,
    model: Optional[AssociationModel],
    results: Dict[str, Any],
    diagnostics: Optional[Dict[str, Any]] = None,
    inputs: Sequence[str] = (),
) -> None:
    FitReport(
        command=command,
        config=model.echo() if model is not None else {},
        results=results,
        diagnostics=diagnostics or {},
        inputs=list(inputs),
    ).dump(_stream(out))


def exit_codes(command: str) -> Callable:
    """Translate feshrf exceptions of a command into exit codes.

    A failed fit still writes its report (with converged = false) when
    the exception carries a result. The report carries the config echo,
    inputs and diagnostics of the model the command built.
    """

    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> int:
            try:
                return func(*args, **kwargs)
            except FitError as exc:
                click.echo(f"Error: {exc}", err=True)
                result = getattr(exc, "result", None)
                if result is not None and hasattr(result, "to_dict"):
                    payload = result.to_dict()
                    payload["converged"] = False
                    meta = click.get_current_context().meta
                    _report(
                        kwargs.get("out", "-"),
                        command,
                        meta.get(META_MODEL),
                        payload,
                        meta.get(META_DIAGNOSTICS),
                        meta.get(META_INPUTS, ()),
                    )
                return EXIT_FIT
            except NumericalError as exc:
                click.echo(f"Error: {exc}", err=True)
                return EXIT_NUMERICAL
            except FeshRFError as exc:
                click.echo(f"Error: {exc}", err=True)
                return EXIT_INPUT

        return wrapper

    return decorator


@click.group(cls=FeshGroup)
@click.version_option(__version__, prog_name="feshrf")
@click.option(
    "--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG."
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False),
    default=None,
    help="DEBUG log file.",
)
def cli(verbose: int, log_file: Optional[str]) -> None:
    """RF association spectra of heteronuclear Feshbach molecules."""
    level = {0: "WARNING", 1: "INFO"}.get(verbose, "DEBUG")
    setup_logger(level=level, logfile=log_file)


@cli.command()
@opt_config
@click.option(
    "--grid", required=True, help="Frequencies in Hz as start:stop:step."
)
@opt_out
@opt_threads
@exit_codes("spectrum")
def spectrum(
    config_path: Optional[str], grid: str, out: str, threads: Optional[int]
) -> int:
    """Model spectrum, CSV rf_frequency_hz,molecule_number."""
    frequencies = parse_range(grid, "--grid")
    model = _model(config_path, threads=threads)
    perturbative_parameter(model.model_config())
    write_spectrum_csv(model.spectrum(frequencies), _stream(out))
    return EXIT_OK


@cli.command("fit-spectrum")
@click.argument("data", type=click.Path(dir_okay=False))
@opt_config
@opt_out
@opt_threads
@exit_codes("fit-spectrum")
def fit_spectrum(
    data: str, config_path: Optional[str], out: str, threads: Optional[int]
) -> int:
    """Fit binding energy and scale factor of a measured spectrum."""
    measured, field_gauss = read_spectrum_file(data)
    model = _model(
        config_path, [data], threads=threads, field_gauss=field_gauss
    )
    notes = model.diagnostics()
    click.get_current_context().meta[META_DIAGNOSTICS] = notes
    result = model.fit_spectrum(measured)
    _report(out, "fit-spectrum", model, result.to_dict(), notes, [data])
    click.echo(
        f"E_b/h = {result.E_b_khz:.4f} ± {result.E_b_err_khz:.4f} kHz, "
        f"lambda = {result.scale:.4g} ± {result.scale_err:.2g}"
    )
    return EXIT_OK


@cli.command("fit-resonance")
@click.argument("points", type=click.Path(dir_okay=False))
@opt_config
@opt_out
@exit_codes("fit-resonance")
def fit_resonance(points: str, config_path: Optional[str], out: str) -> int:
    """Fit B0 and DeltaB to binding energies at several fields."""
    model = _model(config_path, [points])
    result = model.fit_resonance(read_points_csv(points))
    _report(out, "fit-resonance", model, result.to_dict(), inputs=[points])
    return EXIT_OK


@cli.command()
@opt_config
@click.option(
    "--samples",
    "-n",
    type=click.IntRange(min=1),
    default=1_000_000,
    show_default=True,
)
@opt_seed
@click.option(
    "--bins", type=click.IntRange(min=2), default=50, show_default=True
)
@click.option("--rel-tol", type=float, default=1e-8, show_default=True)
@click.option(
    "--grid-points", type=click.IntRange(min=1), default=50, show_default=True
)
@click.option("--corrupt-temperature", type=float, default=1.0, hidden=True)
@opt_out
@opt_threads
@exit_codes("oracle")
def oracle(
    config_path: Optional[str],
    samples: int,
    seed: Optional[int],
    bins: int,
    rel_tol: float,
    grid_points: int,
    corrupt_temperature: float,
    out: str,
    threads: Optional[int],
) -> int:
    """Run the independent checks; exit 2 if any of them fails."""
    model = _model(config_path, threads=threads, seed=seed)
    report = model.validate(
        n=samples,
        corrupt_temperature=corrupt_temperature,
        bins=bins,
        rel_tol=rel_tol,
        grid_points=grid_points,
    )
    results = report.to_dict()
    _report(out, "oracle", model, results["checks"], results["diagnostics"])
    if not report.all_passed:
        failed = [c.name for c in report.checks if not c.passed]
        click.echo(f"Failed checks: {', '.join(failed)}", err=True)
        return EXIT_FIT
    return EXIT_OK


@cli.command("binding-curve")
@opt_config
@click.option(
    "--field-range", required=True, help="Fields in G as start:stop:step."
)
@opt_out
@exit_codes("binding-curve")
def binding_curve(
    config_path: Optional[str], field_range: str, out: str
) -> int:
    """Binding energy and chi along a field range."""
    fields = [to_si(B, "G") for B in parse_range(field_range, "--field-range")]
    model = _model(config_path)
    states = model.binding_curve(fields)
    write_binding_curve_csv(fields, states, _stream(out))
    return EXIT_OK


@cli.command("tail-temperature")
@click.argument("data", type=click.Path(dir_okay=False))
@opt_config
@click.option(
    "--window", nargs=2, type=float, default=(2.0, 5.0), show_default=True
)
@opt_out
@exit_codes("tail-temperature")
def tail_temperature(
    data: str, config_path: Optional[str], window: tuple, out: str
) -> int:
    """Temperature from the high-frequency tail of a spectrum."""
    measured, field_gauss = read_spectrum_file(data)
    model = _model(config_path, [data], field_gauss=field_gauss)
    result = model.tail_temperature(measured, tuple(window))
    results = {
        "temperature_nk": from_si(result.temperature, "nK"),
        "temperature_err_nk": from_si(result.temperature_err, "nK"),
        "n_points": result.n_points,
        "window_kT": list(result.window),
    }
    _report(out, "tail-temperature", model, results, inputs=[data])
    return EXIT_OK


@cli.command()
@click.argument(
    "spectra", nargs=-1, required=True, type=click.Path(dir_okay=False)
)
@opt_config
@opt_out
@opt_threads
@exit_codes("iterate")
def iterate(
    spectra: Sequence[str],
    config_path: Optional[str],
    out: str,
    threads: Optional[int],
) -> int:
    """Self-consistent chi iteration over spectra at several fields.

    Every file needs a '# b_field_gauss=<value>' comment line.
    """
    datasets = []
    for path in spectra:
        measured, field_gauss = read_spectrum_file(path)
        if field_gauss is None:
            raise DataError(
                f"{Path(path).name} has no '# b_field_gauss=' line."
            )
        datasets.append((to_si(field_gauss, "G"), measured))
    model = _model(config_path, list(spectra), threads=threads)
    result = model.iterate(datasets)
    _report(out, "iterate", model, result.to_dict(), inputs=list(spectra))
    logger.info(f"Iteration converged after {result.rounds} rounds.")
    return EXIT_OK


main = cli

if __name__ == "__main__":
    cli()
