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

from pyness.model import NetworkModel


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * scale * (a + a.conj().T)


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0, rank: int | None = None) -> np.ndarray:
    b = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    return scale * (b @ b.conj().T) / (rank or n)


def random_real_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    b = rng.normal(size=(n, n))
    s = scale * (b @ b.T) / n
    return 0.5 * (s + s.T)


def random_model(seed: int, n: int | None = None, dephasing: str = 'general') -> NetworkModel:
    """
    Random dissipative network: Hermitian hopping, injection and depletion of
    random ranks and a dephasing matrix with cross terms. The two ranks add up
    to at least n so that the total damping is full rank.
    """

    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 9))
    match dephasing:
        case 'general':
            sigma = random_real_psd(rng, n, scale=rng.uniform(0.1, 2.0))
        case 'onsite':
            sigma = np.diag(rng.uniform(0.1, 2.0, size=n))
        case _:
            sigma = np.zeros((n, n))
    rank_plus = int(rng.integers(1, n + 1))
    rank_minus = int(rng.integers(max(1, n - rank_plus), n + 1))
    return NetworkModel(
        n,
        random_hermitian(rng, n),
        random_psd(rng, n, scale=rng.uniform(0.2, 1.0), rank=rank_plus),
        random_psd(rng, n, scale=rng.uniform(0.2, 1.0), rank=rank_minus),
        sigma)


def dimer(v: float = 1.0, g_in: float = 1.0, g_out: float = 1.0, sigma: float = 0.0) -> NetworkModel:
    return NetworkModel(
        2,
        np.array([[0.0, v], [v, 0.0]]),
        np.diag([g_in, 0.0]),
        np.diag([0.0, g_out]),
        sigma * np.eye(2))


def single_site(g_in: float, g_out: float, sigma: float = 0.0) -> NetworkModel:
    return NetworkModel(1, np.zeros((1, 1)), [[g_in]], [[g_out]], [[sigma]])
