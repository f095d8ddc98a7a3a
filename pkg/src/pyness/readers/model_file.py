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

"""
Structured (JSON) network description

Matrix entries are numbers or [re, im] pairs; indices are zero-based.

    {
        "n_modes": 3,
        "hopping": [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
                   | {"type": "long_range_chain", "v": 1, "alpha": 1.5},
        "gamma_plus": dense | {"type": "sparse", "entries": [[0, 0, 1.0]]},
        "gamma_minus": dense | sparse,
        "sigma": dense | sparse | {"type": "onsite", "value": 1.0, "sites": [0, 1, 2]}
    }
"""

import json
import logging
from typing import Any

import numpy as np

from ..errors import InvalidModelFileError
from ..model import NetworkModel, long_range_hopping


REQUIRED_KEYS: list[str] = ['n_modes', 'hopping', 'gamma_plus', 'gamma_minus', 'sigma']


def _parse_scalar(x: Any, where: str) -> complex:
    if isinstance(x, bool):
        raise InvalidModelFileError(f"{where}: boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(y, (int, float)) and not isinstance(y, bool) for y in x):
        return complex(x[0], x[1])
    raise InvalidModelFileError(f"{where}: expected a number or an [re, im] pair, got {x!r}")


def _parse_dense(rows: list, n: int, key: str) -> np.ndarray:
    if len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InvalidModelFileError(f"'{key}': dense matrix must be {n}x{n}")
    return np.array([
        [_parse_scalar(x, f"'{key}'[{i}][{j}]") for j, x in enumerate(r)]
        for i, r in enumerate(rows)
    ], dtype=np.complex128)


def _parse_sparse(entries: list, n: int, key: str) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.complex128)
    for k, e in enumerate(entries):
        if not isinstance(e, list) or len(e) != 3:
            raise InvalidModelFileError(f"'{key}' entry {k}: expected [i, j, value]")
        i, j, x = e
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < n and 0 <= j < n):
            raise InvalidModelFileError(f"'{key}' entry {k}: index out of range")
        m[i, j] = _parse_scalar(x, f"'{key}' entry {k}")
    return m


def _get_number(d: dict, k: str, key: str) -> float:
    x = d.get(k)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidModelFileError(f"'{key}': missing or invalid '{k}'")
    return float(x)


def _parse_matrix(value: Any, n: int, key: str) -> np.ndarray:
    if isinstance(value, list):
        return _parse_dense(value, n, key)
    if not isinstance(value, dict) or 'type' not in value:
        raise InvalidModelFileError(f"'{key}': expected a dense matrix or a typed object")

    match value['type']:
        case 'sparse':
            return _parse_sparse(value.get('entries', []), n, key)
        case 'long_range_chain' if key == 'hopping':
            if n < 2:
                raise InvalidModelFileError("'hopping': a chain requires at least 2 modes")
            return long_range_hopping(n, _get_number(value, 'v', key), _get_number(value, 'alpha', key)).astype(np.complex128)
        case 'onsite' if key == 'sigma':
            sites = value.get('sites', list(range(n)))
            if any(not isinstance(i, int) or not 0 <= i < n for i in sites):
                raise InvalidModelFileError("'sigma': onsite sites out of range")
            diag = np.zeros(n)
            diag[sites] = _get_number(value, 'value', key)
            return np.diag(diag).astype(np.complex128)
        case t:
            raise InvalidModelFileError(f"'{key}': unsupported matrix type '{t}'")


def parse_model(doc: dict[str, Any]) -> NetworkModel:
    if not isinstance(doc, dict):
        raise InvalidModelFileError("Model description must be an object")
    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        raise InvalidModelFileError(f"Missing model keys: {', '.join(missing)}")
    n = doc['n_modes']
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidModelFileError(f"'n_modes' must be a positive integer (got {n!r})")

    sigma = _parse_matrix(doc['sigma'], n, 'sigma')
    return NetworkModel(
        n,
        _parse_matrix(doc['hopping'], n, 'hopping'),
        _parse_matrix(doc['gamma_plus'], n, 'gamma_plus'),
        _parse_matrix(doc['gamma_minus'], n, 'gamma_minus'),
        sigma if np.any(sigma.imag) else sigma.real)


def load_model(fp: str) -> NetworkModel:
    logging.info(f"Loading model: {fp}")
    try:
        with open(fp) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as ex:
        raise InvalidModelFileError(f"Invalid JSON in model file: {ex}")
    return parse_model(doc)


def _emit_matrix(m: np.ndarray) -> list:
    if np.iscomplexobj(m) and np.any(m.imag):
        return [[[float(x.real), float(x.imag)] for x in row] for row in m]
    return [[float(x) for x in row] for row in np.real(m)]


def emit_model(model: NetworkModel) -> dict[str, Any]:
    return {
        'n_modes': model.n_modes,
        'hopping': _emit_matrix(model.hopping),
        'gamma_plus': _emit_matrix(model.gamma_plus),
        'gamma_minus': _emit_matrix(model.gamma_minus),
        'sigma': _emit_matrix(model.dephasing)
    }


def write_model(fp: str, model: NetworkModel) -> None:
    logging.info(f"Writing model: {fp}")
    with open(fp, 'w') as fh:
        json.dump(emit_model(model), fh)
