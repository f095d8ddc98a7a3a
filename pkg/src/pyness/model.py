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

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Any

import numpy as np

from .constants import DEFAULT_GAMMA_IN, DEFAULT_GAMMA_OUT, DEFAULT_HOPPING, DEFAULT_SIGMA, HERMITIAN_TOL, PSD_TOL
from .errors import InvalidModelError
from .utils import hermiticity_defect, psd_defect, symmetry_defect


def _frozen(a: Any, dtype: type) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(slots=True, frozen=True, eq=False)
class NetworkModel:
    """
    Quadratic fermionic network with Markovian injection, depletion and dephasing

    All rates are in units of the hopping scale (v_S = 1, hbar = 1).
    """

    n_modes: int
    hopping: np.ndarray
    gamma_plus: np.ndarray
    gamma_minus: np.ndarray
    dephasing: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, 'hopping', _frozen(self.hopping, np.complex128))
        object.__setattr__(self, 'gamma_plus', _frozen(self.gamma_plus, np.complex128))
        object.__setattr__(self, 'gamma_minus', _frozen(self.gamma_minus, np.complex128))
        # Imaginary parts are rejected by validation rather than dropped here
        sigma = np.asarray(self.dephasing)
        object.__setattr__(self, 'dephasing', _frozen(
            sigma, np.complex128 if np.iscomplexobj(sigma) and np.any(sigma.imag) else np.float64))

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma_plus + self.gamma_minus

    @property
    def dephasing_diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.dephasing))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkModel):
            return NotImplemented
        return (
            self.n_modes == other.n_modes and
            np.array_equal(self.hopping, other.hopping) and
            np.array_equal(self.gamma_plus, other.gamma_plus) and
            np.array_equal(self.gamma_minus, other.gamma_minus) and
            np.array_equal(self.dephasing, other.dephasing)
        )


@dataclass(slots=True, frozen=True)
class Violation:
    matrix: str
    prop: str
    defect: float

    def __str__(self) -> str:
        return f"{self.matrix} not {self.prop} (defect: {self.defect:.3g})"

    def to_dict(self) -> dict[str, Any]:
        return {
            'matrix': self.matrix,
            'property': self.prop,
            'defect': self.defect
        }


class DephasingKind(Enum):
    NONE = 'none'
    ONSITE_ALL = 'onsite_all'
    ONSITE_SUBSET = 'onsite_subset'
    GENERAL = 'general'


@dataclass(slots=True, frozen=True, eq=False)
class DephasingPattern:
    """
    Nonzero entries (m, m') of the dephasing matrix, in row-major order
    """

    rows: np.ndarray
    cols: np.ndarray
    kind: DephasingKind

    @property
    def n_sigma(self) -> int:
        return int(self.rows.shape[0])

    @property
    def indices(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.rows == self.cols))

    def is_closed(self) -> bool:
        """Closed under transposition"""
        return set(self.indices) == set(zip(self.cols.tolist(), self.rows.tolist()))


MATRIX_NAMES: dict[str, str] = {
    'hopping': 'H',
    'gamma_plus': 'gamma+',
    'gamma_minus': 'gamma-',
    'dephasing': 'sigma'
}


def validate_model(model: NetworkModel) -> list[Violation]:
    """
    Check the matrix classes required of a network: Hermitian hopping,
    Hermitian positive semidefinite rates and a real symmetric positive
    semidefinite dephasing matrix, all N x N
    """

    violations: list[Violation] = []
    n: int = model.n_modes

    if n < 1:
        violations.append(Violation('N', 'positive', float(n)))
        return violations

    for attr, name in MATRIX_NAMES.items():
        a: np.ndarray = getattr(model, attr)

        # Shape first: no further checks on a mismatching matrix
        if a.shape != (n, n):
            violations.append(Violation(name, f"{n}x{n}", float(abs(a.size - n * n))))
            continue
        if not np.all(np.isfinite(a)):
            violations.append(Violation(name, 'finite', float(np.count_nonzero(~np.isfinite(a)))))
            continue

        if attr == 'dephasing':
            if np.iscomplexobj(a):
                violations.append(Violation(name, 'real', float(np.max(np.abs(a.imag)))))
                a = a.real
            if (d := symmetry_defect(a)) > HERMITIAN_TOL:
                violations.append(Violation(name, 'symmetric', d))
        elif (d := hermiticity_defect(a)) > HERMITIAN_TOL:
            violations.append(Violation(name, 'Hermitian', d))

        if attr != 'hopping' and (d := psd_defect(a)) > PSD_TOL:
            violations.append(Violation(name, 'PSD', d))

    return violations


def check_model(model: NetworkModel) -> None:
    violations: list[Violation] = validate_model(model)
    if violations:
        for v in violations:
            logging.error(str(v))
        raise InvalidModelError(
            f"Invalid network model: {'; '.join(map(str, violations))}", violations=violations)


def dephasing_pattern(model: NetworkModel, zero_tol: float = 0.0) -> DephasingPattern:
    sigma: np.ndarray = np.real(model.dephasing)
    rows, cols = np.nonzero(np.abs(sigma) > zero_tol)
    n_sigma: int = rows.shape[0]
    kind: DephasingKind
    if n_sigma == 0:
        kind = DephasingKind.NONE
    elif np.all(rows == cols):
        kind = DephasingKind.ONSITE_ALL if n_sigma == model.n_modes else DephasingKind.ONSITE_SUBSET
    else:
        kind = DephasingKind.GENERAL
    return DephasingPattern(rows.astype(np.intp), cols.astype(np.intp), kind)


def long_range_hopping(n_sites: int, v: float, alpha: float) -> np.ndarray:
    """
    Power-law hopping v / r^alpha between every pair of sites at distance r
    """

    idx = np.arange(n_sites)
    r = np.abs(np.subtract.outer(idx, idx)).astype(np.float64)
    h = np.zeros((n_sites, n_sites), dtype=np.float64)
    mask = r > 0
    h[mask] = v / r[mask] ** alpha
    return h


def _check_chain_args(n_sites: int, alpha: float, **rates: float) -> None:
    if n_sites < 2:
        raise InvalidModelError(f"A chain requires at least 2 sites (got {n_sites})!")
    if not alpha > 0.0:
        raise InvalidModelError(f"The long-range exponent must be positive (got {alpha})!")
    for k, x in rates.items():
        if x < 0.0:
            raise InvalidModelError(f"Rate '{k}' must be non-negative (got {x})!")


def _boundary_drive(n_sites: int, gamma_in: float, gamma_out: float) -> tuple[np.ndarray, np.ndarray]:
    gp = np.zeros((n_sites, n_sites), dtype=np.complex128)
    gm = np.zeros((n_sites, n_sites), dtype=np.complex128)
    gp[0, 0] = gamma_in
    gm[-1, -1] = gamma_out
    return gp, gm


def build_long_range_chain(
    n_sites: int,
    v: float = DEFAULT_HOPPING,
    alpha: float = 1.5,
    gamma_in: float = DEFAULT_GAMMA_IN,
    gamma_out: float = DEFAULT_GAMMA_OUT,
    sigma: float = DEFAULT_SIGMA
) -> NetworkModel:
    """
    Boundary-driven chain with long-range hopping and uniform onsite dephasing:
    injection on the first site, depletion on the last one
    """

    _check_chain_args(n_sites, alpha, v=v, gamma_in=gamma_in, gamma_out=gamma_out, sigma=sigma)
    gp, gm = _boundary_drive(n_sites, gamma_in, gamma_out)
    return NetworkModel(
        n_sites,
        long_range_hopping(n_sites, v, alpha),
        gp,
        gm,
        sigma * np.eye(n_sites))


def build_junction_chain(
    n_sites: int,
    n_dephased: int,
    v: float = DEFAULT_HOPPING,
    alpha: float = 1.5,
    gamma_in: float = DEFAULT_GAMMA_IN,
    gamma_out: float = DEFAULT_GAMMA_OUT,
    sigma: float = DEFAULT_SIGMA
) -> NetworkModel:
    """
    Long-range chain with onsite dephasing restricted to a central window
    of n_dephased sites
    """

    _check_chain_args(n_sites, alpha, v=v, gamma_in=gamma_in, gamma_out=gamma_out, sigma=sigma)
    if not 0 <= n_dephased <= n_sites:
        raise InvalidModelError(f"Invalid dephased window size: {n_dephased}!")
    start: int = (n_sites - n_dephased) // 2
    diag = np.zeros(n_sites)
    diag[start:start + n_dephased] = sigma
    gp, gm = _boundary_drive(n_sites, gamma_in, gamma_out)
    return NetworkModel(n_sites, long_range_hopping(n_sites, v, alpha), gp, gm, np.diag(diag))


def build_extended_reservoir(
    n_reservoir: int,
    n_junction: int,
    v: float = DEFAULT_HOPPING,
    gamma: float = DEFAULT_GAMMA_IN,
    sigma: float = DEFAULT_SIGMA
) -> NetworkModel:
    """
    Nearest-neighbour chain made of a left reservoir (injection on every mode),
    a dephased junction and a right reservoir (depletion on every mode)
    """

    if n_reservoir < 1 or n_junction < 1:
        raise InvalidModelError("Reservoirs and junction need at least one mode each!")
    for k, x in (('v', v), ('gamma', gamma), ('sigma', sigma)):
        if x < 0.0:
            raise InvalidModelError(f"Rate '{k}' must be non-negative (got {x})!")

    n: int = 2 * n_reservoir + n_junction
    h = v * (np.eye(n, k=1) + np.eye(n, k=-1))
    left = np.zeros(n)
    left[:n_reservoir] = gamma
    right = np.zeros(n)
    right[n - n_reservoir:] = gamma
    junction = np.zeros(n)
    junction[n_reservoir:n_reservoir + n_junction] = sigma
    return NetworkModel(n, h, np.diag(left), np.diag(right), np.diag(junction))


@dataclass(slots=True, frozen=True)
class ChainParameters:
    v: float = DEFAULT_HOPPING
    alpha: float = 1.5
    gamma_in: float = DEFAULT_GAMMA_IN
    gamma_out: float = DEFAULT_GAMMA_OUT
    sigma: float = DEFAULT_SIGMA

    def build(self, n_sites: int, alpha: float | None = None) -> NetworkModel:
        return build_long_range_chain(
            n_sites,
            v=self.v,
            alpha=self.alpha if alpha is None else alpha,
            gamma_in=self.gamma_in,
            gamma_out=self.gamma_out,
            sigma=self.sigma)

    def to_dict(self) -> dict[str, float]:
        return {
            'v': self.v,
            'alpha': self.alpha,
            'gamma_in': self.gamma_in,
            'gamma_out': self.gamma_out,
            'sigma': self.sigma
        }
