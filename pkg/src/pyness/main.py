# pyNESS
#
# Copyright (C) 2026 pyNESS developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import json
import logging
import os
import platform
import sys
from typing import Any, Callable, NoReturn

import click
from click_option_group import OptionGroup, RequiredMutuallyExclusiveOptionGroup

from . import __version__
from .app_info import AppInfo
from .constants import (
    CONDITION_LIMIT, DEFAULT_GAMMA_IN, DEFAULT_GAMMA_OUT, DEFAULT_HOPPING, DEFAULT_MEMORY_BUDGET, DEFAULT_SIGMA,
    EIG_TOL, STABILITY_TOL, SWEEP_PRESETS, WORKERS_ENVVAR, geometric_sizes)
from .correlations import CorrelationMatrix
from .dynamics import StepControl, integrate
from .errors import CustomException, InvalidGridError, NotBoundaryDriven
from .model import ChainParameters, NetworkModel, check_model, validate_model
from .observables import occupations, transport_report
from .readers.model_file import load_model
from .readers.sweep_table import load_sweep_table
from .scaling import ScalingFit, fit_sweep, make_grid, sweep
from .steady_state import SolverOptions, solve
from .writer import write_json, write_profile, write_trajectory


LOG_LEVELS = [
    'WARNING',
    'INFO',
    'DEBUG'
]

HELP_MODEL = "Network model file (JSON)"
HELP_CHAIN = "Inline long-range chain, e.g. N=64,v=1,alpha=1.5,sigma=1000,gin=1,gout=1"
HELP_OUTPUT = "Final output to this filename prefix"
HELP_WORKERS = f"Worker threads (0 to detect, default from {WORKERS_ENVVAR})"
HELP_MEMORY = "Memory budget in bytes for the restricted superoperator"

CHAIN_KEYS: dict[str, str] = {
    'v': 'v',
    'alpha': 'alpha',
    'sigma': 'sigma',
    'gin': 'gamma_in',
    'gout': 'gamma_out'
}


existing_file_path = click.Path(
    exists=True,
    file_okay=True,
    dir_okay=False,
    readable=True,
    resolve_path=True)

output_path = click.Path(exists=False, file_okay=True, resolve_path=True)


class PlatformError(Exception):
    pass


class ChainSpec(click.ParamType):
    name = 'chain'

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> tuple[int, ChainParameters]:
        if isinstance(value, tuple):
            return value
        fields: dict[str, float] = {}
        n_sites: int | None = None
        for item in str(value).split(','):
            k, sep, x = item.partition('=')
            k = k.strip()
            if not sep:
                self.fail(f"expected key=value, got '{item}'", param, ctx)
            try:
                if k == 'N':
                    n_sites = int(x)
                elif k in CHAIN_KEYS:
                    fields[CHAIN_KEYS[k]] = float(x)
                else:
                    self.fail(f"unknown chain parameter '{k}'", param, ctx)
            except ValueError:
                self.fail(f"invalid value for '{k}': '{x}'", param, ctx)
        if n_sites is None:
            self.fail("the number of sites N is required", param, ctx)
        return n_sites, ChainParameters(**fields)  # type: ignore[return-value]


def abort(ex: CustomException) -> NoReturn:
    logging.error(ex.message)
    click.echo(json.dumps(ex.to_dict()))
    sys.exit(ex.exit_code)


def get_cpus(cpus: int) -> int:
    if cpus > 0:
        return cpus
    if platform.system() == 'Darwin':
        logging.error("Process affinity detection not available on macOS: please set the worker count!")
        raise PlatformError
    return len(os.sched_getaffinity(0))  # type: ignore[attr]


def setup_fs(output: str) -> None:
    outfolder = os.path.dirname(os.path.abspath(output))
    if not os.path.exists(outfolder):
        os.makedirs(outfolder, exist_ok=True)


def get_app_info() -> AppInfo:
    return AppInfo(
        __version__,
        ' '.join([os.path.basename(sys.argv[0]), *sys.argv[1:]]))


def get_model(model_fp: str | None, chain: tuple[int, ChainParameters] | None) -> NetworkModel:
    if model_fp is not None:
        return load_model(model_fp)
    assert chain is not None
    n_sites, params = chain
    return params.build(n_sites)


def get_workers(workers: int) -> int:
    try:
        return get_cpus(workers)
    except PlatformError:
        sys.exit(1)


def model_source(f: Callable) -> Callable:
    group = RequiredMutuallyExclusiveOptionGroup("\nModel source", help="Exactly one network description")
    f = group.option('--chain', type=ChainSpec(), default=None, help=HELP_CHAIN)(f)
    f = group.option('-m', '--model', 'model_fp', type=existing_file_path, default=None, help=HELP_MODEL)(f)
    return f


def solver_options(f: Callable) -> Callable:
    perf_opts = OptionGroup("\nPerformance", help="Options to tune the performance")
    tol_opts = OptionGroup("\nTolerances", help="Solver tolerance overrides")
    f = tol_opts.option('--zero-tol', type=click.FloatRange(min=0.0), default=0.0, show_default=True, help="Dephasing entries up to this magnitude count as zero")(f)
    f = tol_opts.option('--condition-limit', type=click.FloatRange(min=1.0), default=CONDITION_LIMIT, show_default=True, help="Largest accepted condition number of the restricted system")(f)
    f = tol_opts.option('--eig-tol', type=click.FloatRange(min=0.0), default=EIG_TOL, show_default=True, help="Relative eigendecomposition residual tolerance")(f)
    f = tol_opts.option('--stability-tol', type=click.FloatRange(min=0.0), default=STABILITY_TOL, show_default=True, help="Relative tolerance on decay rate denominators")(f)
    f = perf_opts.option('--memory-budget', type=click.IntRange(min=1), default=DEFAULT_MEMORY_BUDGET, show_default=True, help=HELP_MEMORY)(f)
    f = perf_opts.option('-c', '--workers', type=click.IntRange(min=0), default=1, envvar=WORKERS_ENVVAR, show_default=True, help=HELP_WORKERS)(f)
    return f


def build_solver_options(
    workers: int,
    memory_budget: int,
    stability_tol: float,
    eig_tol: float,
    condition_limit: float,
    zero_tol: float
) -> SolverOptions:
    return SolverOptions(
        stability_tol=stability_tol,
        eig_tol=eig_tol,
        condition_limit=condition_limit,
        zero_tol=zero_tol,
        workers=workers,
        memory_budget=memory_budget)


@click.group()
@click.option(
    '--loglevel',
    default='INFO',
    show_default=True,
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    help="Set logging verbosity"
)
@click.version_option(__version__)
def main(loglevel: str) -> None:
    """
    Non-equilibrium steady states of quadratic fermionic networks
    with Markovian relaxation and dephasing.
    """

    # Setup logger
    logging.basicConfig(
        level=logging._nameToLevel[loglevel.upper()],
        format="%(levelname)s: %(message)s")


@main.command('validate')
@model_source
def validate_command(model_fp: str | None, chain: tuple[int, ChainParameters] | None) -> None:
    """
    Check the matrix classes of a network model.
    """

    try:
        model = get_model(model_fp, chain)
    except CustomException as ex:
        abort(ex)

    violations = validate_model(model)
    click.echo(json.dumps({
        'n_modes': model.n_modes,
        'violations': [v.to_dict() for v in violations]
    }))
    if violations:
        for v in violations:
            logging.error(str(v))
        sys.exit(2)
    logging.info("Model is valid")


@main.command('solve')
@model_source
@click.option('-o', '--output', required=True, type=output_path, help=HELP_OUTPUT)
@solver_options
def solve_command(
    model_fp: str | None,
    chain: tuple[int, ChainParameters] | None,
    output: str,
    workers: int,
    memory_budget: int,
    stability_tol: float,
    eig_tol: float,
    condition_limit: float,
    zero_tol: float
) -> None:
    """
    Solve for the stationary state and write the transport report.
    """

    options = build_solver_options(get_workers(workers), memory_budget, stability_tol, eig_tol, condition_limit, zero_tol)
    setup_fs(output)
    app_info = get_app_info()

    try:
        model = get_model(model_fp, chain)
        solution = solve(model, options)
    except CustomException as ex:
        abort(ex)

    doc: dict[str, Any] = {
        **app_info.to_dict(),
        'n_modes': model.n_modes,
        'solver': solution.metadata()
    }
    if chain is not None:
        doc['chain'] = {'n_sites': chain[0], **chain[1].to_dict()}

    try:
        report = transport_report(solution.correlations, model)
        doc['transport'] = {
            'J_in': report.terminal_in,
            'J_out': report.terminal_out,
            'R_SS': report.resistance,
            'cut_deviation': report.cut_deviation()
        }
        occ = report.occupations
    except NotBoundaryDriven as ex:
        logging.warning(f"Terminal currents skipped: {ex.message}")
        occ = occupations(solution.correlations)

    write_json(f"{output}.report.json", doc)
    write_profile(f"{output}.profile.csv", app_info, occ)


def _resolve_grid(
    preset: str | None,
    alphas: tuple[float, ...],
    sizes: tuple[int, ...],
    n_range: tuple[int, int, float] | None
) -> list[tuple[float, int]]:
    a: list[float] = list(alphas)
    n: list[int] = list(sizes)
    if preset is not None:
        p = SWEEP_PRESETS[preset]
        if p['long_running']:
            logging.warning(f"Preset '{preset}' is a long-running benchmark")
        a = a or p['alphas']
        n = n or p['sizes']
    if n_range is not None:
        n = geometric_sizes(*n_range)
    if not a or not n:
        raise InvalidGridError("Grid needs at least one alpha and one size (use a preset or --alpha/--size)")
    return make_grid(a, n)


@main.command('sweep')
@click.option('-o', '--output', required=True, type=output_path, help="Sweep table (CSV)")
@click.option('--preset', type=click.Choice(sorted(SWEEP_PRESETS)), default=None, help="Named (alpha, N) grid")
@click.option('--alpha', 'alphas', type=click.FloatRange(min=0.0, min_open=True), multiple=True, help="Long-range exponent (repeatable)")
@click.option('--size', 'sizes', type=click.IntRange(min=2), multiple=True, help="Number of sites (repeatable)")
@click.option('--size-range', 'n_range', type=(int, int, float), default=None, help="Geometric sizes: N_MIN N_MAX RATIO")
@click.option('--v', type=click.FloatRange(min=0.0), default=DEFAULT_HOPPING, show_default=True, help="Hopping strength")
@click.option('--sigma', type=click.FloatRange(min=0.0), default=DEFAULT_SIGMA, show_default=True, help="Onsite dephasing rate")
@click.option('--gamma-in', type=click.FloatRange(min=0.0), default=DEFAULT_GAMMA_IN, show_default=True, help="Injection rate")
@click.option('--gamma-out', type=click.FloatRange(min=0.0), default=DEFAULT_GAMMA_OUT, show_default=True, help="Depletion rate")
@click.option('--point-workers', type=click.IntRange(min=1), default=1, show_default=True, help="Grid points solved concurrently")
@click.option('--resume', is_flag=True, default=False, help="Skip grid points already solved in the output table")
@solver_options
def sweep_command(
    output: str,
    preset: str | None,
    alphas: tuple[float, ...],
    sizes: tuple[int, ...],
    n_range: tuple[int, int, float] | None,
    v: float,
    sigma: float,
    gamma_in: float,
    gamma_out: float,
    point_workers: int,
    resume: bool,
    workers: int,
    memory_budget: int,
    stability_tol: float,
    eig_tol: float,
    condition_limit: float,
    zero_tol: float
) -> None:
    """
    Sweep the long-range chain over (alpha, N) and tabulate the stationary current.
    """

    options = build_solver_options(get_workers(workers), memory_budget, stability_tol, eig_tol, condition_limit, zero_tol)
    params = ChainParameters(v=v, gamma_in=gamma_in, gamma_out=gamma_out, sigma=sigma)
    setup_fs(output)

    try:
        grid = _resolve_grid(preset, alphas, sizes, n_range)
    except (CustomException, ValueError) as ex:
        abort(ex if isinstance(ex, CustomException) else InvalidGridError(str(ex)))

    try:
        table = sweep(
            grid, params, options=options, fp=output, app_info=get_app_info(), workers=point_workers, resume=resume)
    except CustomException as ex:
        abort(ex)

    n_ok: int = sum(1 for row in table if row.is_ok)
    logging.info(f"Sweep complete: {n_ok}/{len(table)} points succeeded")
    if table and n_ok == 0:
        sys.exit(1)


@main.command('fit')
@click.argument('table', required=True, type=existing_file_path)
@click.option('-o', '--output', required=True, type=output_path, help="Fit report (JSON)")
@click.option('--n-min', type=click.IntRange(min=2), default=None, help="Smallest size in the fit window")
@click.option('--n-max', type=click.IntRange(min=2), default=None, help="Largest size in the fit window")
@click.option('--alpha-max-fit', type=float, default=1.5, show_default=True, help="Critical point fit uses alpha below this value")
def fit_command(table: str, output: str, n_min: int | None, n_max: int | None, alpha_max_fit: float) -> None:
    """
    Fit R_SS ~ N^nu per alpha and the critical point of nu(alpha).

    TABLE: sweep table (CSV)
    """

    setup_fs(output)
    try:
        rows = load_sweep_table(table)
    except CustomException as ex:
        abort(ex)

    window: tuple[int, int] | None = None
    if n_min is not None or n_max is not None:
        window = (n_min or 2, n_max or sys.maxsize)

    fits, critical = fit_sweep(rows, size_window=window, alpha_max_fit=alpha_max_fit)
    write_json(output, {
        **get_app_info().to_dict(),
        'fits': [
            {'alpha': a, **(f.to_dict() if isinstance(f, ScalingFit) else {'error': f})}
            for a, f in fits.items()
        ],
        'critical_point': critical if isinstance(critical, str) else critical.to_dict()
    })


@main.command('dynamics')
@model_source
@click.option('-o', '--output', required=True, type=output_path, help="Trajectory (CSV)")
@click.option('--t-final', type=click.FloatRange(min=0.0, min_open=True), required=True, help="Final time")
@click.option('--step', type=click.FloatRange(min=0.0, min_open=True), default=None, help="Integration step (default: 0.1 over the largest rate)")
@click.option('--record-every', type=click.IntRange(min=1), default=1, show_default=True, help="Record one snapshot every this many steps")
def dynamics_command(
    model_fp: str | None,
    chain: tuple[int, ChainParameters] | None,
    output: str,
    t_final: float,
    step: float | None,
    record_every: int
) -> None:
    """
    Integrate the correlation matrix from the empty state and write occupations over time.
    """

    setup_fs(output)
    try:
        model = get_model(model_fp, chain)
        check_model(model)
        trajectory = integrate(model, CorrelationMatrix.zeros(model.n_modes), t_final, StepControl(step, record_every))
    except CustomException as ex:
        abort(ex)

    write_trajectory(
        output,
        get_app_info(),
        trajectory.times,
        [occupations(c) for c in trajectory.states],
        trajectory.residuals)
