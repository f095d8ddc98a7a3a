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

from contextlib import contextmanager
import json
import logging
import os
from typing import Any, Iterable, TextIO

import numpy as np

from .app_info import AppInfo


FLOAT_FORMAT: str = '%.17g'


def _get_header_line(k: str, v: str) -> str:
    return f"##{k}: {v}\n"


def _get_fields_line(fields: list[str]) -> str:
    return '#' + ','.join(fields) + '\n'


def write_full_header(fh: TextIO, app_info: AppInfo, fields: list[str]) -> None:
    fh.write(_get_header_line('Command', app_info.command))
    fh.write(_get_header_line('Version', app_info.version))
    fh.write(_get_header_line('Convention', app_info.convention))
    fh.write(_get_fields_line(fields))


def format_value(x: Any) -> str:
    if x is None:
        return ''
    if isinstance(x, (float, np.floating)):
        return FLOAT_FORMAT % x
    return str(x)


def write_row(fh: TextIO, values: Iterable[Any]) -> None:
    fh.write(','.join(map(format_value, values)) + '\n')


@contextmanager
def open_output(fp: str, append: bool = False):
    with open(fp, 'a' if append else 'w', newline='') as fh:
        yield fh


@contextmanager
def atomic_output(fp: str):
    """Write to a sibling temporary file, then move it over the target"""
    tmp: str = f"{fp}.tmp"
    with open(tmp, 'w', newline='') as fh:
        yield fh
    os.replace(tmp, fp)


def _json_default(x: Any) -> Any:
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"Not serialisable: {type(x).__name__}")


def write_json(fp: str, doc: dict[str, Any]) -> None:
    logging.info(f"Writing JSON report: {fp}")
    with open(fp, 'w') as fh:
        json.dump(doc, fh, indent=2, default=_json_default)


def write_profile(fp: str, app_info: AppInfo, occupations: np.ndarray) -> None:
    logging.info(f"Writing density profile: {fp}")
    with open_output(fp) as fh:
        write_full_header(fh, app_info, ['site', 'occupation'])
        for i, n in enumerate(occupations, start=1):
            write_row(fh, (i, float(n)))


def write_trajectory(fp: str, app_info: AppInfo, times: list[float], occupations: list[np.ndarray], residuals: list[float]) -> None:
    logging.info(f"Writing trajectory: {fp}")
    n: int = occupations[0].shape[0] if occupations else 0
    with open_output(fp) as fh:
        write_full_header(fh, app_info, ['t', *[f"n_{i}" for i in range(1, n + 1)], 'residual'])
        for t, occ, res in zip(times, occupations, residuals):
            write_row(fh, (float(t), *map(float, occ), float(res)))
