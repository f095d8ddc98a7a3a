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

import csv
from dataclasses import dataclass
import logging
import math
import os
from typing import Final, TextIO

from ..errors import InvalidGridError


SWEEP_FIELDS: Final[list[str]] = [
    'alpha',
    'n_sites',
    'current',
    'resistance',
    'wall_seconds',
    'status'
]

STATUS_OK: Final[str] = 'ok'


def grid_key(alpha: float, n_sites: int) -> tuple[float, int]:
    return round(alpha, 10), int(n_sites)


@dataclass(slots=True)
class SweepRow:
    alpha: float
    n_sites: int
    current: float
    resistance: float
    wall_seconds: float
    status: str

    @property
    def key(self) -> tuple[float, int]:
        return grid_key(self.alpha, self.n_sites)

    @property
    def is_ok(self) -> bool:
        return self.status == STATUS_OK

    def values(self) -> tuple:
        return (self.alpha, self.n_sites, self.current, self.resistance, self.wall_seconds, self.status)


def read_table(fh: TextIO) -> tuple[list[str], list[dict[str, str]]]:
    """
    Parse a table with '##' metadata lines and a '#'-prefixed field line
    """

    fields: list[str] = []
    rows: list[dict[str, str]] = []
    for line in fh:
        line = line.rstrip('\n')
        if not line or line.startswith('##'):
            continue
        if line.startswith('#'):
            fields = line[1:].split(',')
            continue
        if not fields:
            raise InvalidGridError("Table data found before the field header!")
        values = next(csv.reader([line]))
        rows.append(dict(zip(fields, values)))
    return fields, rows


def _to_float(s: str) -> float:
    return float(s) if s else math.nan


def parse_sweep_rows(fh: TextIO) -> list[SweepRow]:
    fields, rows = read_table(fh)
    if rows and fields != SWEEP_FIELDS:
        raise InvalidGridError(f"Unexpected sweep table fields: {','.join(fields)}")
    try:
        return [
            SweepRow(
                float(r['alpha']),
                int(r['n_sites']),
                _to_float(r['current']),
                _to_float(r['resistance']),
                _to_float(r['wall_seconds']),
                r['status'])
            for r in rows
        ]
    except (KeyError, ValueError) as ex:
        raise InvalidGridError(f"Malformed sweep table: {ex}")


def load_sweep_table(fp: str) -> list[SweepRow]:
    if not os.path.exists(fp):
        return []
    with open(fp) as fh:
        rows = parse_sweep_rows(fh)
    logging.info(f"Loaded {len(rows)} sweep rows from: {fp}")
    return rows
