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
Effective non-Hermitian generator of the correlation matrix dynamics and its
biorthogonal eigendecomposition

Convention: with A = -iH - gamma/2 - diag(sigma)/2 the correlation matrix
obeys dC/dt = A C + C A^dagger + S, S = gamma+ + sigma * C (Hadamard).
For A = V diag(a) W^dagger with W^dagger V = 1 the stationary solution of
A C + C A^dagger = -S is C = V [Delta * (W^dagger S W)] V^dagger with
Delta_pq = -1 / (a_p + conj(a_q)).
"""

from dataclasses import dataclass
import logging
from time import time

import numpy as np
import scipy.linalg

from .constants import EIG_TOL, EIGENBASIS_COND_WARNING, STABILITY_TOL
from .errors import NonDiagonalizable, NonDissipativePair
from .model import NetworkModel
from .utils import frobenius


@dataclass(slots=True, frozen=True, eq=False)
class EffectiveHamiltonian:
    matrix: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]


@dataclass(slots=True, frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    delta: np.ndarray
    eigenbasis_condition: float = 1.0

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def left_dagger(self) -> np.ndarray:
        """Left eigenvectors as rows"""
        return self.left_vectors.conj().T

    def decay_rates(self) -> np.ndarray:
        return -self.eigenvalues.real

    def kernel(self, source: np.ndarray) -> np.ndarray:
        """
        Stationary response V [Delta * (W^dagger source W)] V^dagger to a constant source
        """

        v: np.ndarray = self.right_vectors
        projected: np.ndarray = self.left_dagger @ source @ self.left_vectors
        return v @ (self.delta * projected) @ v.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.right_vectors * self.eigenvalues) @ self.left_dagger


def effective_hamiltonian(model: NetworkModel) -> EffectiveHamiltonian:
    return EffectiveHamiltonian(
        -1j * model.hopping -
        0.5 * model.gamma -
        0.5 * np.diag(model.dephasing_diagonal))


def decompose(
    h_eff: EffectiveHamiltonian,
    stability_tol: float = STABILITY_TOL,
    eig_tol: float = EIG_TOL
) -> SpectralData:
    """
    Right eigenvectors from a dense eigensolve, left ones from the inverse of
    the right eigenbasis (W^dagger V = 1 by construction)

    stability_tol is relative to the largest eigenvalue modulus.
    """

    start = time()
    a: np.ndarray = h_eff.matrix
    n: int = h_eff.n_modes

    eigenvalues, v = scipy.linalg.eig(a, check_finite=False)
    eigenvalues = eigenvalues.astype(np.complex128)
    v = v.astype(np.complex128)

    scale: float = frobenius(a)
    residual: float = frobenius(a @ v - v * eigenvalues)
    if residual > eig_tol * scale:
        raise NonDiagonalizable(f"Eigenpair residual too large: {residual:.3g} (|A|: {scale:.3g})")

    try:
        w_dagger: np.ndarray = scipy.linalg.inv(v, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as ex:
        raise NonDiagonalizable(f"Singular eigenbasis: {ex}")

    cond: float = float(np.linalg.norm(v, 1) * np.linalg.norm(w_dagger, 1))
    logging.debug(f"Eigenbasis condition number (1-norm): {cond:.3g}")
    if cond > EIGENBASIS_COND_WARNING:
        logging.warning(f"Ill-conditioned eigenbasis (condition number: {cond:.3g})")

    # A defective matrix passes the eigenpair residual but not the reconstruction
    reconstruction: float = frobenius((v * eigenvalues) @ w_dagger - a)
    if reconstruction > eig_tol * scale:
        raise NonDiagonalizable(
            f"Eigenbasis does not reconstruct the generator: {reconstruction:.3g} (|A|: {scale:.3g})")

    denominators: np.ndarray = eigenvalues[:, np.newaxis] + eigenvalues.conj()[np.newaxis, :]
    tol: float = stability_tol * (float(np.max(np.abs(eigenvalues))) if n > 0 else 0.0)
    flat: int = int(np.argmin(np.abs(denominators)))
    p, q = divmod(flat, n)
    if abs(denominators[p, q]) <= tol:
        raise NonDissipativePair(
            f"No stationary state: eigenvalue pair ({p}, {q}) is not dissipative "
            f"(|a_p + a_q*| = {abs(denominators[p, q]):.3g})", (p, q))

    logging.debug(f"Eigendecomposition (N={n}) took: {time() - start:.3f}s")

    return SpectralData(
        eigenvalues,
        v,
        w_dagger.conj().T,
        -1.0 / denominators,
        eigenbasis_condition=cond)
