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
Independent references for the steady-state solver: direct integration of
the correlation matrix equation of motion and the brute-force solve of its
vectorised (N^2 x N^2) form
"""

from dataclasses import dataclass, field
import logging
import math
from time import time

import numpy as np
from scipy.linalg import lu_solve

from .constants import DEFAULT_STEP_FACTOR, ORACLE_MAX_MODES, CONDITION_LIMIT, TRAJECTORY_EIGENVALUE_TOL
from .correlations import CorrelationMatrix
from .errors import OracleSizeExceeded, SingularLindbladian, StepTooLarge
from .model import NetworkModel
from .spectral import effective_hamiltonian
from .utils import frobenius, hermitize, lu_with_condition


def _as_array(c: CorrelationMatrix | np.ndarray) -> np.ndarray:
    return c.matrix if isinstance(c, CorrelationMatrix) else np.asarray(c)


def eom_rhs(c: CorrelationMatrix | np.ndarray, model: NetworkModel) -> np.ndarray:
    """
    Time derivative of the correlation matrix:
    -i[H, C] + gamma+ - {gamma, C}/2 + sigma * C - {diag(sigma), C}/2
    """

    m: np.ndarray = _as_array(c)
    h: np.ndarray = model.hopping
    g: np.ndarray = model.gamma
    d: np.ndarray = model.dephasing_diagonal
    return (
        -1j * (h @ m - m @ h) +
        model.gamma_plus -
        0.5 * (g @ m + m @ g) +
        model.dephasing * m -
        0.5 * (d[:, np.newaxis] * m + m * d[np.newaxis, :])
    )


def vectorize(m: np.ndarray) -> np.ndarray:
    """Column-major stacking"""
    return m.reshape(-1, order='F')


def unvectorize(x: np.ndarray, n: int) -> np.ndarray:
    return x.reshape((n, n), order='F')


def lindblad_matrix(model: NetworkModel) -> np.ndarray:
    """
    Linear part L of the vectorised equation of motion,
    d vec(C)/dt = L vec(C) + vec(gamma+)
    """

    n: int = model.n_modes
    a: np.ndarray = effective_hamiltonian(model).matrix
    eye = np.eye(n, dtype=np.complex128)
    return (
        np.kron(eye, a) +
        np.kron(a.conj(), eye) +
        np.diag(vectorize(model.dephasing).astype(np.complex128))
    )


def brute_force_steady_state(
    model: NetworkModel,
    max_modes: int = ORACLE_MAX_MODES,
    condition_limit: float = CONDITION_LIMIT
) -> CorrelationMatrix:
    n: int = model.n_modes
    if n > max_modes:
        raise OracleSizeExceeded(f"Brute-force solve limited to {max_modes} modes (got {n})!")

    start = time()
    lu_piv, cond = lu_with_condition(lindblad_matrix(model))
    if cond > condition_limit:
        raise SingularLindbladian(f"Degenerate steady state: vectorised generator condition number {cond:.3g}")

    x: np.ndarray = lu_solve(lu_piv, -vectorize(model.gamma_plus), check_finite=False)
    logging.debug(f"Brute-force steady state (N={n}) took: {time() - start:.3f}s")
    return CorrelationMatrix(hermitize(unvectorize(x, n)))


@dataclass(slots=True)
class StepControl:
    step: float | None = None
    record_every: int = 1


@dataclass(slots=True)
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[CorrelationMatrix] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    def append(self, t: float, c: np.ndarray, residual: float) -> None:
        self.times.append(t)
        self.states.append(CorrelationMatrix(c.copy()))
        self.residuals.append(residual)

    @property
    def final(self) -> CorrelationMatrix:
        return self.states[-1]

    @property
    def is_monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.residuals, self.residuals[1:]))


def default_step(model: NetworkModel) -> float | None:
    scale: float = max(
        float(np.linalg.norm(model.gamma, 2)),
        float(np.linalg.norm(model.dephasing, 2)),
        float(np.linalg.norm(model.hopping, 2)))
    return DEFAULT_STEP_FACTOR / scale if scale > 0.0 else None


def _check_snapshot(t: float, c: np.ndarray) -> None:
    w = np.linalg.eigvalsh(c)
    if w[0] < -TRAJECTORY_EIGENVALUE_TOL or w[-1] > 1.0 + TRAJECTORY_EIGENVALUE_TOL:
        raise StepTooLarge(
            f"Unphysical state at t={t:.6g}: eigenvalues in [{w[0]:.3g}, {w[-1]:.3g}], reduce the step")


def integrate(
    model: NetworkModel,
    c0: CorrelationMatrix,
    t_final: float,
    step_control: StepControl | None = None
) -> Trajectory:
    """
    Classic fixed-step fourth-order Runge-Kutta integration of the equation of motion
    """

    if not t_final > 0.0:
        raise ValueError(f"Final time must be positive (got {t_final})!")

    control: StepControl = step_control or StepControl()
    h: float | None = control.step or default_step(model)
    if h is None:
        h = t_final
    n_steps: int = max(1, math.ceil(t_final / h))
    h = t_final / n_steps
    logging.debug(f"Integrating {n_steps} steps of {h:.3g} up to t={t_final:.6g}")

    def f(c: np.ndarray) -> np.ndarray:
        return eom_rhs(c, model)

    c: np.ndarray = hermitize(np.array(c0.matrix, dtype=np.complex128))
    trajectory = Trajectory()
    trajectory.append(0.0, c, frobenius(f(c)))

    for i in range(1, n_steps + 1):
        k1 = f(c)
        k2 = f(c + 0.5 * h * k1)
        k3 = f(c + 0.5 * h * k2)
        k4 = f(c + h * k3)
        c = hermitize(c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))

        if i % control.record_every == 0 or i == n_steps:
            t: float = i * h
            _check_snapshot(t, c)
            trajectory.append(t, c, frobenius(f(c)))

    if not trajectory.is_monotone:
        logging.info("Equation of motion residual is not monotonically decreasing along the trajectory")

    return trajectory
