"""Command-line mission runner.

Exit codes: 0 success, 1 configuration error, 2 divergence, 3 mission timeout.
"""
from __future__ import annotations

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from ..errors import ConfigError, EmptyWindowError, IntegrationDiverged, MissionTimeout, SingularityError
from ..seastate import SpectrumParams, elevation, realize, spectral_moment
from ..integrator import write_csv
from .config import SensingCfg, default_scenario, load_scenario
from .runner import run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_TIMEOUT = 0, 1, 2, 3


def _execute(sc, out_dir=None) -> int:
    try:
        result = run_scenario(sc, write=True, out_dir=out_dir)
    except (ConfigError, EmptyWindowError) as err:
        click.echo(f"config error: {err}", err=True)
        return EXIT_CONFIG
    except (IntegrationDiverged, SingularityError) as err:
        click.echo(f"diverged: {err}", err=True)
        return EXIT_DIVERGED
    except MissionTimeout as err:
        click.echo(f"timeout: {err}", err=True)
        return EXIT_TIMEOUT
    m = result.metrics
    click.echo(
        f"mission complete in {result.column('t')[-1]:.2f} s: "
        f"position RMSE {m.position_rmse:.4f} m, yaw RMSE {m.yaw_rmse_deg:.3f} deg, "
        f"velocity RMSE {m.velocity_rmse:.4f} m/s"
    )
    return EXIT_OK


def _load(path, seed):
    sc = load_scenario(path)
    if seed is not None:
        sc.seed = seed
    return sc


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def cli(verbose):
    """Marine vessel DP simulator."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@cli.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def run(scenario, seed, out_dir):
    """Run a scenario file."""
    try:
        sc = _load(scenario, seed)
    except ConfigError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(_execute(sc, out_dir))


@cli.command("four-corner")
@click.option("--box", type=float, default=1.0, show_default=True, help="Box side [m].")
@click.option("--yaw", type=float, default=45.0, show_default=True, help="Yaw step [deg].")
@click.option("--noise", is_flag=True, help="Feed back noisy motion-capture poses.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def four_corner(box, yaw, noise, seed, out_dir):
    """Run the 4-corner stationkeeping benchmark with default settings."""
    sc = default_scenario()
    sc.mission.box = box
    sc.mission.yaw_deg = yaw
    sc.seed = seed
    if noise:
        sc.sensing = SensingCfg()
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    sys.exit(_execute(sc, out_dir))


@cli.command()
@click.option("--hs", type=float, default=0.05, show_default=True, help="Significant wave height [m].")
@click.option("--tp", type=float, default=1.5, show_default=True, help="Peak period [s].")
@click.option("--gamma", type=float, default=3.3, show_default=True, help="Peak enhancement (1 = PM).")
@click.option("--n", "n_comp", type=int, default=200, show_default=True)
@click.option("--duration", type=float, default=1800.0, show_default=True)
@click.option("--dt", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Elevation CSV (t, eta_w).")
def spectrum(hs, tp, gamma, n_comp, duration, dt, seed, out):
    """Realise a sea state and write a wave-probe style elevation log."""
    try:
        params = SpectrumParams(hs, tp, gamma, n_comp)
    except ValueError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    real = realize(params, seed=seed)
    t = np.arange(int(round(duration / dt)) + 1) * dt
    eta = elevation(real, t)
    write_csv(out, ["t", "eta_w"], np.column_stack([t, eta]))
    m0 = spectral_moment(params)
    click.echo(f"Hs(4 sqrt m0) = {4 * np.sqrt(m0):.4f} m, sample Hs = {4 * np.std(eta):.4f} m")


@cli.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
def validate(scenario):
    """Check a scenario file against the schema."""
    from .config import load_vessel
    from .runner import build_controller, build_setpoints
    from ..dynamics import build_matrices

    try:
        sc = load_scenario(scenario)
        params, layout = load_vessel(sc)
        mats = build_matrices(params)
        from ..allocation import config_matrix

        config_matrix(layout)
        build_controller(sc, mats, layout, np.zeros(3))
        build_setpoints(sc)
    except ConfigError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo("ok")


def _batch_one(args):
    path, seed, out_dir = args
    try:
        sc = _load(path, seed)
    except ConfigError as err:
        return path, EXIT_CONFIG, str(err)
    return path, _execute(sc, out_dir), ""


@cli.command()
@click.argument("scenarios", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--out-root", type=click.Path(file_okay=False), default="batch_out", show_default=True)
@click.option("--workers", type=int, default=2, show_default=True)
def batch(scenarios, seed, out_root, workers):
    """Run several scenarios concurrently, each in its own output directory."""
    jobs = []
    for i, p in enumerate(scenarios):
        out = Path(out_root) / f"{i:03d}_{Path(p).stem}"
        out.mkdir(parents=True, exist_ok=True)
        jobs.append((p, seed, str(out)))
    worst = EXIT_OK
    with ProcessPoolExecutor(max_workers=max(1, workers)) as ex:
        for path, code, msg in ex.map(_batch_one, jobs):
            click.echo(f"{path}: exit {code} {msg}".rstrip())
            worst = max(worst, code)
    sys.exit(worst)


def main():
    cli()


if __name__ == "__main__":
    main()
