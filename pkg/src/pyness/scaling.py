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

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
import logging
import math
import os
from time import time

import numpy as np

from . import __version__
from .app_info import AppInfo
from .constants import ALPHA_MAX_FIT, LONG_RUNNING_SIZE
from .errors import CustomException, InsufficientPoints, InvalidGridError, NonpositiveResistance
from .model import ChainParameters
from .observables import transport_report
from .readers.sweep_table import STATUS_OK, SWEEP_FIELDS, SweepRow, grid_key, load_sweep_table
from .steady_state import SolverOptions, solve
from .writer import atomic_output, open_output, write_full_header, write_row


@dataclass(slots=True, frozen=True)
class ScalingFit:
    nu: float
    intercept: float
    residual_rms: float
    q: int
    window: tuple[int, int]
    nu_err: float = 0.0

    def to_dict(self) -> dict:
        return {
            'nu': self.nu,
            'nu_err': self.nu_err,
            'intercept': self.intercept,
            's': self.residual_rms,
            'q': self.q,
            'window': list(self.window)
        }


@dataclass(slots=True, frozen=True)
class CriticalPointEstimate:
    """
    Line nu = kappa alpha - 2 through the super-diffusive window; alpha_c is
    its crossing with nu = 1. The free-intercept line is reported alongside.
    """

    kappa: float
    kappa_err: float
    residual_rms: float
    alpha_c: float
    alpha_window: tuple[float, float]
    q: int
    free_kappa: float
    free_kappa_err: float
    free_intercept: float
    free_alpha_c: float

    def to_dict(self) -> dict:
        return {
            'kappa': self.kappa,
            'kappa_err': self.kappa_err,
            's': self.residual_rms,
            'alpha_c': self.alpha_c,
            'alpha_window': list(self.alpha_window),
            'q': self.q,
            'free_intercept': {
                'kappa': self.free_kappa,
                'kappa_err': self.free_kappa_err,
                'intercept': self.free_intercept,
                'alpha_c': self.free_alpha_c
            }
        }


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """
    Least-squares line: slope, intercept, residual scatter s (q - 2 degrees
    of freedom) and the standard error of the slope
    """

    slope, intercept = np.polyfit(x, y, 1)
    q: int = x.shape[0]
    eps = y - (slope * x + intercept)
    s: float = float(np.sqrt(np.sum(eps ** 2) / (q - 2))) if q > 2 else 0.0
    sxx: float = float(np.sum((x - x.mean()) ** 2))
    return float(slope), float(intercept), s, s / math.sqrt(sxx) if sxx > 0.0 else math.inf


def fit_power_law(sizes: list[int], resistances: list[float]) -> ScalingFit:
    """
    Least squares of log R against log N; s uses q - 2 degrees of freedom
    """

    q: int = len(sizes)
    if q != len(resistances):
        raise ValueError("Sizes and resistances differ in length!")
    if q < 3:
        raise InsufficientPoints(f"A power-law fit needs at least 3 points (got {q})")
    r = np.asarray(resistances, dtype=np.float64)
    if np.any(~(r > 0.0)):
        raise NonpositiveResistance("Resistances must be positive for a log-log fit!")

    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(r)
    slope, intercept, s, slope_err = _line_fit(x, y)
    return ScalingFit(
        slope,
        intercept,
        s,
        q,
        (int(min(sizes)), int(max(sizes))),
        nu_err=slope_err)


def fit_nu_of_alpha(alphas: list[float], nus: list[float], alpha_max_fit: float = ALPHA_MAX_FIT) -> CriticalPointEstimate:
    a_all = np.asarray(alphas, dtype=np.float64)
    nu_all = np.asarray(nus, dtype=np.float64)
    mask = (a_all < alpha_max_fit) & np.isfinite(nu_all)
    a, nu = a_all[mask], nu_all[mask]
    q: int = int(a.shape[0])
    if q < 3:
        raise InsufficientPoints(f"Critical point fit needs at least 3 points below alpha={alpha_max_fit} (got {q})")

    # Intercept pinned at -2
    sxx: float = float(np.sum(a ** 2))
    kappa: float = float(np.sum(a * (nu + 2.0)) / sxx)
    eps = nu - (kappa * a - 2.0)
    s: float = float(np.sqrt(np.sum(eps ** 2) / (q - 1)))
    kappa_err: float = s / math.sqrt(sxx)

    free_kappa, free_intercept, _, free_kappa_err = _line_fit(a, nu)

    return CriticalPointEstimate(
        kappa,
        kappa_err,
        s,
        3.0 / kappa if kappa != 0.0 else math.inf,
        (float(a.min()), float(a.max())),
        q,
        free_kappa,
        free_kappa_err,
        free_intercept,
        (1.0 - free_intercept) / free_kappa if free_kappa != 0.0 else math.inf)


def monotonicity_violations(alphas: list[float], fits: list[ScalingFit]) -> list[float]:
    """
    Values of alpha where nu drops below its predecessor by more than both error bars
    """

    flagged: list[float] = []
    for (a0, f0), (a1, f1) in zip(zip(alphas, fits), zip(alphas[1:], fits[1:])):
        if f1.nu < f0.nu - (f0.nu_err + f1.nu_err):
            flagged.append(a1)
    return flagged


def make_grid(alphas: list[float], sizes: list[int]) -> list[tuple[float, int]]:
    for n in sizes:
        if n < 2:
            raise InvalidGridError(f"Invalid lattice size: {n}")
    for a in alphas:
        if not a > 0.0:
            raise InvalidGridError(f"Invalid long-range exponent: {a}")
    return sorted({grid_key(a, n) for a in alphas for n in sizes})


def run_point(alpha: float, n_sites: int, params: ChainParameters, options: SolverOptions) -> SweepRow:
    start = time()
    try:
        model = params.build(n_sites, alpha=alpha)
        report = transport_report(solve(model, options).correlations, model)
        if report.resistance is None:
            return SweepRow(alpha, n_sites, report.current, math.nan, time() - start, 'ZeroCurrent')
        return SweepRow(alpha, n_sites, report.current, report.resistance, time() - start, STATUS_OK)
    except CustomException as ex:
        logging.error(f"alpha={alpha}, N={n_sites}: {ex.message}")
        return SweepRow(alpha, n_sites, math.nan, math.nan, time() - start, type(ex).__name__)
    except np.linalg.LinAlgError as ex:
        logging.error(f"alpha={alpha}, N={n_sites}: {ex}")
        return SweepRow(alpha, n_sites, math.nan, math.nan, time() - start, type(ex).__name__)


def _write_table(fp: str, app_info: AppInfo, rows: list[SweepRow]) -> None:
    with atomic_output(fp) as fh:
        write_full_header(fh, app_info, SWEEP_FIELDS)
        for row in rows:
            write_row(fh, row.values())


def sweep(
    grid: list[tuple[float, int]],
    params: ChainParameters,
    options: SolverOptions | None = None,
    fp: str | None = None,
    app_info: AppInfo | None = None,
    workers: int = 1,
    resume: bool = False
) -> list[SweepRow]:
    """
    Solve the boundary-driven chain at every (alpha, N) grid point

    Rows are appended to fp as they complete, then the table is rewritten
    in (alpha, N) order. With resume, points already solved in fp are skipped.
    """

    opts: SolverOptions = options or SolverOptions()
    done: dict[tuple[float, int], SweepRow] = {}
    if resume and fp is not None:
        done = {r.key: r for r in load_sweep_table(fp) if r.is_ok}

    keys: list[tuple[float, int]] = sorted({grid_key(a, n) for a, n in grid})
    todo: list[tuple[float, int]] = [k for k in keys if k not in done]
    logging.info(f"Sweep: {len(keys)} grid points, {len(todo)} to solve")
    if any(n >= LONG_RUNNING_SIZE for _, n in todo):
        logging.warning(f"Grid includes sizes of {LONG_RUNNING_SIZE} sites or more: expect a long run")

    if fp is not None and app_info is None:
        app_info = AppInfo(__version__, 'pyness sweep')

    rows: dict[tuple[float, int], SweepRow] = dict(done)
    if fp is not None and app_info is not None and todo:
        if not resume or not os.path.exists(fp):
            _write_table(fp, app_info, sorted(rows.values(), key=lambda r: r.key))

    def record(row: SweepRow) -> None:
        rows[row.key] = row
        logging.info(
            f"alpha={row.alpha}, N={row.n_sites}: {row.status} "
            f"(J={row.current:.6g}, {row.wall_seconds:.2f}s) [{len(rows)}/{len(keys)}]")
        if fp is not None:
            with open_output(fp, append=True) as fh:
                write_row(fh, row.values())

    if workers <= 1:
        for a, n in todo:
            record(run_point(a, n, params, opts))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_point, a, n, params, opts) for a, n in todo]
            for future in as_completed(futures):
                record(future.result())

    table: list[SweepRow] = [rows[k] for k in sorted(rows)]
    if fp is not None and app_info is not None:
        _write_table(fp, app_info, table)
    return table


def fit_sweep(
    rows: list[SweepRow],
    size_window: tuple[int, int] | None = None,
    alpha_max_fit: float = ALPHA_MAX_FIT
) -> tuple[dict[float, ScalingFit | str], CriticalPointEstimate | str]:
    """
    Power-law fit per alpha over the successful rows, then the critical
    point fit; failures are reported as messages in place of the fits
    """

    by_alpha: dict[float, list[SweepRow]] = {}
    for row in rows:
        if not row.is_ok:
            continue
        if size_window is not None and not size_window[0] <= row.n_sites <= size_window[1]:
            continue
        by_alpha.setdefault(row.key[0], []).append(row)

    fits: dict[float, ScalingFit | str] = {}
    for alpha in sorted(by_alpha):
        points = sorted(by_alpha[alpha], key=lambda r: r.n_sites)
        try:
            fits[alpha] = fit_power_law([r.n_sites for r in points], [r.resistance for r in points])
        except (InsufficientPoints, NonpositiveResistance) as ex:
            logging.warning(f"alpha={alpha}: {ex.message}")
            fits[alpha] = ex.message

    good = [(a, f) for a, f in fits.items() if isinstance(f, ScalingFit)]
    flagged = monotonicity_violations([a for a, _ in good], [f for _, f in good])
    for a in flagged:
        logging.warning(f"Fitted exponent decreases at alpha={a} beyond its error bars")

    critical: CriticalPointEstimate | str
    try:
        critical = fit_nu_of_alpha([a for a, _ in good], [f.nu for _, f in good], alpha_max_fit=alpha_max_fit)
    except InsufficientPoints as ex:
        logging.warning(ex.message)
        critical = ex.message

    return fits, critical
