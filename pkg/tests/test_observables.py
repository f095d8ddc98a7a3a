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
from pyness.errors import NonRealOccupation, NotBoundaryDriven, SolverError, ZeroCurrent
from pyness.model import NetworkModel, build_long_range_chain
from pyness.observables import (
    current_matrix, cut_currents, diffusion_coefficient, diffusive_resistance_estimate, occupations,
    profile_linearity, resistance, terminal_currents, transport_report)
from pyness.steady_state import solve, steady_state
from tests.models import dimer, single_site


def _reversed(model: NetworkModel) -> NetworkModel:
    """Injection moved to the last site, depletion to the first"""
    n = model.n_modes
    gp = np.zeros((n, n))
    gm = np.zeros((n, n))
    gp[-1, -1] = model.gamma_plus[0, 0].real
    gm[0, 0] = model.gamma_minus[-1, -1].real
    return NetworkModel(n, model.hopping, gp, gm, model.dephasing)


def test_occupations():
    c = CorrelationMatrix(np.array([[0.25, 0.1j], [-0.1j, 0.5]]))
    assert occupations(c).tolist() == [0.25, 0.5]


def test_occupations_complex_diagonal():
    with pytest.raises(NonRealOccupation) as excinfo:
        occupations(CorrelationMatrix(np.array([[0.5 + 1e-6j]])))
    assert isinstance(excinfo.value, SolverError)
    assert excinfo.value.exit_code == 1


def test_current_matrix_antisymmetric():
    model = build_long_range_chain(6, alpha=1.2, sigma=0.5)
    j = current_matrix(steady_state(model), model)
    assert np.allclose(j, -j.T)


@pytest.mark.parametrize('n,alpha,sigma', [(2, 1.0, 0.0), (5, 1.5, 0.0), (8, 1.2, 3.0), (16, 2.5, 10.0)])
def test_current_conservation(n: int, alpha: float, sigma: float):
    model = build_long_range_chain(n, alpha=alpha, sigma=sigma)
    c = steady_state(model)
    report = transport_report(c, model)

    assert report.terminal_in > 0
    assert report.imbalance() < 1e-10
    assert report.cut_deviation() < 1e-10
    assert report.occupations_in_range()
    assert report.resistance == pytest.approx(1.0 / report.terminal_in)

    # Density drops away from the injected end
    assert report.occupations[0] > report.occupations[-1]


@pytest.mark.slow
@pytest.mark.parametrize('alpha', [1.2, 1.5, 2.0])
@pytest.mark.parametrize('n', [256, 1024])
def test_current_conservation_long_chain(n: int, alpha: float):
    model = build_long_range_chain(n, alpha=alpha, sigma=1.0)
    sol = solve(model)
    report = transport_report(sol.correlations, model)

    assert sol.residual <= 1e-10
    assert report.imbalance() <= 1e-10
    assert report.cut_deviation() <= 1e-10
    assert report.occupations_in_range()


def test_dimer_current():
    # Unit in and out rates: J = 2v^2 / (1 + 4v^2)
    v = 0.5
    j_in, j_out = terminal_currents(steady_state(dimer(v=v)), dimer(v=v))
    exp = 2.0 * v ** 2 / (1.0 + 4.0 * v ** 2)
    assert j_in == pytest.approx(exp)
    assert j_out == pytest.approx(exp)


def test_reversed_drive():
    model = build_long_range_chain(7, alpha=1.3, sigma=2.0)
    forward = cut_currents(steady_state(model), model)
    rev = _reversed(model)
    backward = cut_currents(steady_state(rev), rev)
    assert np.all(forward > 0)
    assert np.allclose(backward, -forward[::-1])


@pytest.mark.parametrize('sigma', [0.0, 1.0, 100.0])
def test_particle_hole_symmetry(sigma: float):
    n = occupations(steady_state(build_long_range_chain(8, alpha=1.7, sigma=sigma)))
    assert np.allclose(n + n[::-1], 1.0)


def test_not_boundary_driven():
    with pytest.raises(NotBoundaryDriven):
        terminal_currents(CorrelationMatrix.zeros(1), single_site(1.0, 1.0))


@pytest.mark.parametrize('current,exp', [(2.0, 0.5), (0.125, 8.0)])
def test_resistance(current: float, exp: float):
    assert resistance(current) == exp


@pytest.mark.parametrize('current', [0.0, 1e-15, -0.3])
def test_resistance_zero_current(current: float):
    with pytest.raises(ZeroCurrent):
        resistance(current)


def test_transport_report_disconnected():
    model = NetworkModel(2, np.zeros((2, 2)), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), np.zeros((2, 2)))
    report = transport_report(steady_state(model), model)
    assert report.resistance is None
    assert report.to_dict()['R_SS'] is None
    assert np.allclose(report.occupations, [1.0, 0.0])


def test_diffusive_estimates():
    assert diffusion_coefficient(1.0, 1000.0) == pytest.approx(2e-3)
    assert diffusive_resistance_estimate(101, 1.0, 1000.0) == pytest.approx(5e4)


def test_profile_linearity_exact():
    fit = profile_linearity(np.linspace(0.9, 0.1, 100))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.slope == pytest.approx(-0.8 / 99)
    assert (fit.first, fit.last) == (5, 95)


def test_profile_linearity_too_short():
    with pytest.raises(ValueError):
        profile_linearity(np.array([0.5, 0.4]))


def test_diffusive_chain_resistance():
    # Nearest-neighbour-like chain in the strong dephasing limit
    n, sigma = 64, 1e3
    model = build_long_range_chain(n, alpha=8.0, sigma=sigma)
    report = transport_report(steady_state(model), model)
    assert report.resistance == pytest.approx(diffusive_resistance_estimate(n, 1.0, sigma), rel=0.05)


@pytest.mark.slow
@pytest.mark.parametrize('alpha,linear', [(1.51, True), (1.1, False)])
def test_profile_shape(alpha: float, linear: bool):
    model = build_long_range_chain(512, alpha=alpha, sigma=1e3)
    fit = profile_linearity(occupations(steady_state(model)))
    if linear:
        assert fit.r_squared >= 0.999
    else:
        assert fit.r_squared < 0.99
