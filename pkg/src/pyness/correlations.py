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

import numpy as np

from .constants import CORRELATION_HERMITIAN_TOL, OCCUPATION_TOL
from .utils import hermiticity_defect


@dataclass(slots=True, frozen=True, eq=False)
class CorrelationMatrix:
    """
    Two-point functions C[m, m'] = <c^dagger_m' c_m>
    """

    matrix: np.ndarray

    @classmethod
    def zeros(cls, n_modes: int):
        return cls(np.zeros((n_modes, n_modes), dtype=np.complex128))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))

    def defects(self, tol: float = OCCUPATION_TOL) -> list[str]:
        """
        Departures from a physical state: non-Hermitian matrix or
        eigenvalues outside [0, 1] beyond tolerance
        """

        issues: list[str] = []
        if (d := hermiticity_defect(self.matrix)) > CORRELATION_HERMITIAN_TOL:
            issues.append(f"not Hermitian (defect: {d:.3g})")
        w = self.spectrum()
        if w.size and (w[0] < -tol or w[-1] > 1.0 + tol):
            issues.append(f"eigenvalues outside [0, 1]: [{w[0]:.3g}, {w[-1]:.3g}]")
        return issues
