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
import logging

import numpy as np

from .constants import OCCUPATION_TOL, PROFILE_EDGE_FRACTION, ZERO_CURRENT
from .correlations import CorrelationMatrix
from .errors import NonRealOccupation, NotBoundaryDriven, ZeroCurrent
from .model import NetworkModel


@dataclass(slots=True, eq=False)
class TransportReport:
    occupations: np.ndarray
    terminal_in: float
    terminal_out: float
    cut_currents: np.ndarray
    resistance: float | None

    @property
    def current(self) -> float:
        return self.terminal_in

    def imbalance(self) -> float:
        """Relative mismatch of the terminal currents"""
        return abs(self.terminal_in - self.terminal_out) / max(abs(self.terminal_in), 1e-30)

    def cut_deviation(self) -> float:
        if self.cut_currents.size == 0:
            return 0.0
        return float(np.max(np.abs(self.cut_currents - self.terminal_in))) / max(abs(self.terminal_in), 1e-30)

    def occupations_in_range(self, tol: float = OCCUPATION_TOL) -> bool:
        return bool(np.all(self.occupations >= -tol) and np.all(self.occupations <= 1.0 + tol))

    def to_dict(self) -> dict:
        return {
            'J_in': self.terminal_in,
            'J_out': self.terminal_out,
            'R_SS': self.resistance,
            'cut_currents': self.cut_currents.tolist(),
            'occupations': self.occupations.tolist()
        }


def occupations(c: CorrelationMatrix) -> np.ndarray:
    diag: np.ndarray = np.diag(c.matrix)
    imag: float = float(np.max(np.abs(diag.imag))) if diag.size else 0.0
    if imag > 1e-12:
        raise NonRealOccupation(f"Complex occupations (max imaginary part: {imag:.3g})")
    return diag.real.copy()


def _support(a: np.ndarray) -> set[int]:
    return set(np.nonzero(np.any(a != 0, axis=0) | np.any(a != 0, axis=1))[0].tolist())


def terminal_currents(c: CorrelationMatrix, model: NetworkModel) -> tuple[float, float]:
    """
    Particle flow from the injection terms, Tr[gamma+ (1 - C)], and into the
    depletion terms, Tr[gamma- C]
    """

    gp: np.ndarray = model.gamma_plus
    gm: np.ndarray = model.gamma_minus
    overlap: set[int] = _support(gp) & _support(gm)
    if overlap:
        raise NotBoundaryDriven(f"Injection and depletion act on the same modes: {sorted(overlap)}")
    m: np.ndarray = c.matrix
    j_in: float = float(np.real(np.trace(gp) - np.sum(gp * m.T)))
    j_out: float = float(np.real(np.sum(gm * m.T)))
    return j_in, j_out


def current_matrix(c: CorrelationMatrix, model: NetworkModel) -> np.ndarray:
    """
    Bond currents: element (i, j) is the coherent particle flow from i to j,
    2 Im(H[j, i] C[i, j])
    """

    return 2.0 * np.imag(model.hopping.T * c.matrix)


def cut_currents(c: CorrelationMatrix, model: NetworkModel) -> np.ndarray:
    """
    Currents across every cut k of a chain: sum over bonds (i, j) with i <= k < j
    """

    n: int = c.n_modes
    if n < 2:
        return np.zeros(0)
    bonds: np.ndarray = current_matrix(c, model)
    # below[k, j] = sum_{i <= k} bonds[i, j]
    below: np.ndarray = np.cumsum(bonds, axis=0)
    # beyond[k, j] = sum_{j' >= j} below[k, j']
    beyond: np.ndarray = np.cumsum(below[:, ::-1], axis=1)[:, ::-1]
    k = np.arange(n - 1)
    return beyond[k, k + 1]


def resistance(current: float) -> float:
    if current <= ZERO_CURRENT:
        raise ZeroCurrent(f"No stationary current (J = {current:.3g}): insulating or disconnected network")
    return 1.0 / current


def transport_report(c: CorrelationMatrix, model: NetworkModel) -> TransportReport:
    j_in, j_out = terminal_currents(c, model)
    r: float | None
    try:
        r = resistance(j_in)
    except ZeroCurrent as ex:
        logging.warning(ex.message)
        r = None
    return TransportReport(occupations(c), j_in, j_out, cut_currents(c, model), r)


def diffusion_coefficient(v: float, sigma: float) -> float:
    """Nearest-neighbour hopping with strong onsite dephasing"""
    return 2.0 * v ** 2 / sigma


def diffusive_resistance_estimate(n_sites: int, v: float, sigma: float) -> float:
    """
    Bulk resistance of a diffusive chain, (N - 1) / D, ignoring contact terms
    """

    return (n_sites - 1) / diffusion_coefficient(v, sigma)


@dataclass(slots=True, frozen=True)
class ProfileFit:
    slope: float
    intercept: float
    r_squared: float
    first: int
    last: int


def profile_linearity(occupations: np.ndarray, edge_fraction: float = PROFILE_EDGE_FRACTION) -> ProfileFit:
    """
    Least-squares line through the bulk density profile, excluding a
    fraction of the sites at each edge
    """

    n: int = occupations.shape[0]
    skip: int = int(np.floor(edge_fraction * n))
    first, last = skip, n - skip
    if last - first < 3:
        raise ValueError("Too few bulk sites for a profile fit!")
    x = np.arange(first, last, dtype=np.float64)
    y = np.asarray(occupations[first:last], dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res: float = float(np.sum((y - fitted) ** 2))
    ss_tot: float = float(np.sum((y - y.mean()) ** 2))
    r_squared: float = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return ProfileFit(float(slope), float(intercept), r_squared, first, last)
