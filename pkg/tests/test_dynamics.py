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

import numpy as np
import pytest

from pyness.correlations import CorrelationMatrix
from pyness.dynamics import (
    StepControl, brute_force_steady_state, eom_rhs, integrate, lindblad_matrix, unvectorize, vectorize)
from pyness.errors import OracleSizeExceeded, StepTooLarge
from pyness.model import NetworkModel
from pyness.steady_state import steady_state
from tests.models import random_hermitian, random_model, single_site


def _damped(seed: int) -> NetworkModel:
    """Random network with an injection floor, so every mode relaxes at rate >= 1/2"""
    model = random_model(seed, n=int(np.random.default_rng(seed).integers(1, 7)))
    n = model.n_modes
    return NetworkModel(n, model.hopping, model.gamma_plus + 0.5 * np.eye(n), model.gamma_minus, model.dephasing)


@pytest.mark.parametrize('c,exp', [(0.0, 0.7), (1.0, -0.3), (0.7, 0.0)])
def test_eom_rhs_single_site(c: float, exp: float):
    model = single_site(0.7, 0.3, sigma=2.0)
    assert eom_rhs(np.array([[c]]), model)[0, 0] == pytest.approx(exp)


@pytest.mark.parametrize('seed', range(10))
def test_eom_rhs_properties(seed: int):
    rng = np.random.default_rng(1000 + seed)
    model = random_model(seed)
    n = model.n_modes
    c1 = random_hermitian(rng, n)
    c2 = random_hermitian(rng, n)

    f1 = eom_rhs(c1, model)
    assert np.allclose(f1, f1.conj().T)

    # Trace: dephasing conserves particles
    assert np.trace(f1) == pytest.approx(np.trace(model.gamma_plus) - np.trace(model.gamma @ c1))

    # Affine in C
    mix = eom_rhs(0.3 * c1 + 0.7 * c2, model)
    assert np.allclose(mix, 0.3 * f1 + 0.7 * eom_rhs(c2, model))

    # Accepts a correlation matrix too
    assert np.array_equal(eom_rhs(CorrelationMatrix(c1), model), f1)


@pytest.mark.parametrize('seed', range(5))
def test_lindblad_matrix_vectorization(seed: int):
    rng = np.random.default_rng(seed)
    model = random_model(seed)
    n = model.n_modes
    c = random_hermitian(rng, n) + 0.1j * random_hermitian(rng, n)
    lhs = unvectorize(lindblad_matrix(model) @ vectorize(c) + vectorize(model.gamma_plus), n)
    assert np.allclose(lhs, eom_rhs(c, model))


def test_vectorize_column_major():
    m = np.array([[1, 2], [3, 4]])
    assert vectorize(m).tolist() == [1, 3, 2, 4]
    assert np.array_equal(unvectorize(vectorize(m), 2), m)


def test_brute_force_single_site():
    c = brute_force_steady_state(single_site(1.0, 3.0, sigma=5.0))
    assert c.matrix[0, 0] == pytest.approx(0.25)


def test_brute_force_size_limit():
    with pytest.raises(OracleSizeExceeded):
        brute_force_steady_state(random_model(0, n=3), max_modes=2)


@pytest.mark.parametrize('t', [0.5, 1.0, 3.0])
def test_integrate_single_site(t: float):
    g_in, g_out = 0.6, 1.4
    trajectory = integrate(single_site(g_in, g_out, sigma=1.0), CorrelationMatrix.zeros(1), t)
    exp = g_in / (g_in + g_out) * (1.0 - np.exp(-(g_in + g_out) * t))
    assert trajectory.times[-1] == pytest.approx(t)
    assert trajectory.final.matrix[0, 0].real == pytest.approx(exp, rel=1e-5)
    assert trajectory.is_monotone


def test_integrate_zero_model():
    model = NetworkModel(2, np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
    c0 = CorrelationMatrix(np.diag([0.2, 0.9]).astype(np.complex128))
    trajectory = integrate(model, c0, 5.0)
    assert np.array_equal(trajectory.final.matrix, c0.matrix)


@pytest.mark.parametrize('seed', range(20))
def test_integrate_converges(seed: int):
    model = _damped(seed)
    trajectory = integrate(model, CorrelationMatrix.zeros(model.n_modes), 40.0, StepControl(record_every=100))
    c = steady_state(model).matrix
    assert np.max(np.abs(trajectory.final.matrix - c)) <= 1e-6
    assert trajectory.residuals[-1] <= 1e-6


def test_integrate_record_every():
    trajectory = integrate(single_site(1.0, 1.0), CorrelationMatrix.zeros(1), 1.0, StepControl(step=0.01, record_every=10))
    assert len(trajectory.times) == 11
    assert np.allclose(np.diff(trajectory.times), 0.1)


def test_integrate_step_too_large():
    with pytest.raises(StepTooLarge):
        integrate(single_site(1.0, 1.0), CorrelationMatrix.zeros(1), 20.0, StepControl(step=10.0))


def test_integrate_rejects_time():
    with pytest.raises(ValueError):
        integrate(single_site(1.0, 1.0), CorrelationMatrix.zeros(1), 0.0)


@pytest.mark.parametrize('g', [0.5, 2.0])
def test_integrate_filling(g: float):
    trajectory = integrate(single_site(g, 0.0), CorrelationMatrix.zeros(1), 5.0 / g)
    assert trajectory.final.matrix[0, 0].real == pytest.approx(1.0 - np.exp(-5.0), abs=1e-6)


def test_eom_rhs_pure_dephasing():
    s, x = 0.7, 0.2 + 0.1j
    model = NetworkModel(2, np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)), s * np.eye(2))
    c = np.array([[0.3, x], [np.conj(x), 0.6]])
    rhs = eom_rhs(c, model)
    assert rhs[0, 1] == pytest.approx(-s * x)
    assert np.allclose(np.diag(rhs), 0.0)
