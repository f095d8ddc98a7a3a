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

import logging

import numpy as np
import scipy.linalg


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 'fro'))


def relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    """
    Frobenius distance of a from b, relative to b (absolute when b vanishes)
    """

    scale: float = frobenius(b)
    diff: float = frobenius(a - b)
    return diff / scale if scale > 0.0 else diff


def hermiticity_defect(a: np.ndarray) -> float:
    """
    Relative Frobenius norm of the anti-Hermitian part
    """

    scale: float = frobenius(a)
    if scale == 0.0:
        return 0.0
    return frobenius(a - a.conj().T) / (2.0 * scale)


def symmetry_defect(a: np.ndarray) -> float:
    scale: float = frobenius(a)
    if scale == 0.0:
        return 0.0
    return frobenius(a - a.T) / (2.0 * scale)


def psd_defect(a: np.ndarray) -> float:
    """
    Magnitude of the most negative eigenvalue of the Hermitian part,
    relative to the largest eigenvalue modulus (0 when positive semidefinite)
    """

    if a.size == 0:
        return 0.0
    w: np.ndarray = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    top: float = float(np.max(np.abs(w)))
    if top == 0.0:
        return 0.0
    return max(0.0, -float(w[0]) / top)


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def lu_with_condition(a: np.ndarray) -> tuple[tuple[np.ndarray, np.ndarray], float]:
    """
    LU factorisation with partial pivoting and the LAPACK 1-norm estimate
    of the condition number (inf when singular)
    """

    lu_piv = scipy.linalg.lu_factor(a, check_finite=False)
    gecon, = scipy.linalg.get_lapack_funcs(('gecon',), (lu_piv[0],))
    anorm: float = float(np.linalg.norm(a, 1))
    rcond, info = gecon(lu_piv[0], anorm, norm='1')
    if info != 0:  # pragma: no cover
        logging.warning(f"Condition estimation failed (info={info})")
    cond: float = float('inf') if rcond == 0.0 else 1.0 / float(rcond)
    return lu_piv, cond
