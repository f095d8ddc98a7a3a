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

from typing import Final

import numpy as np


# Stored results carry this tag; bump it whenever the sign/phase
# convention of the decay kernel changes
CONVENTION: Final[str] = 'generator-v1'

# Matrix class checks (relative)
HERMITIAN_TOL: Final[float] = 1e-12
PSD_TOL: Final[float] = 1e-12

# Spectral decomposition
EIG_TOL: Final[float] = 1e-10
STABILITY_TOL: Final[float] = 1e-12
EIGENBASIS_COND_WARNING: Final[float] = 1e8

# Steady state
CONDITION_LIMIT: Final[float] = 1e14
CONSISTENCY_TOL: Final[float] = 1e-8
# Residual refinement of the closed-form solution (relative to |gamma+|)
MAX_REFINEMENTS: Final[int] = 6
REFINEMENT_TOL: Final[float] = 1e-14
CORRELATION_HERMITIAN_TOL: Final[float] = 1e-10
OCCUPATION_TOL: Final[float] = 1e-8
DEFAULT_MEMORY_BUDGET: Final[int] = 8 * 1024 ** 3

# Oracle and dynamics
ORACLE_MAX_MODES: Final[int] = 64
DEFAULT_STEP_FACTOR: Final[float] = 0.1
TRAJECTORY_EIGENVALUE_TOL: Final[float] = 1e-3

# Observables
ZERO_CURRENT: Final[float] = 1e-14
PROFILE_EDGE_FRACTION: Final[float] = 0.05

# Chain defaults (v_S = 1 sets the frequency scale)
DEFAULT_HOPPING: Final[float] = 1.0
DEFAULT_GAMMA_IN: Final[float] = 1.0
DEFAULT_GAMMA_OUT: Final[float] = 1.0
DEFAULT_SIGMA: Final[float] = 1e3

# Scaling
ALPHA_MAX_FIT: Final[float] = 1.5
LONG_RUNNING_SIZE: Final[int] = 4096

WORKERS_ENVVAR: Final[str] = 'PYNESS_WORKERS'


def _alpha_grid(start: float, stop: float, step: float) -> list[float]:
    n: int = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(n)]


SWEEP_PRESETS: Final[dict[str, dict]] = {
    'small-system': {
        'alphas': _alpha_grid(1.0, 2.0, 0.05),
        'sizes': [512, 645, 813, 1024],
        'long_running': False
    },
    'large-system': {
        'alphas': _alpha_grid(1.0, 2.0, 0.05),
        'sizes': [7500, 8250, 9000],
        'long_running': True
    },
    'diffusive': {
        'alphas': [3.0],
        'sizes': [128, 256, 512, 1024],
        'long_running': False
    }
}


def geometric_sizes(n_min: int, n_max: int, ratio: float = 2.0) -> list[int]:
    """
    Integer sizes from n_min to n_max (both included) growing by a constant ratio
    """

    if n_min < 2 or n_max < n_min or ratio <= 1.0:
        raise ValueError("Invalid geometric size range!")
    count: int = int(np.floor(np.log(n_max / n_min) / np.log(ratio) + 1e-9)) + 1
    sizes = {int(round(n_min * ratio ** k)) for k in range(count)}
    sizes.add(n_max)
    return sorted(s for s in sizes if s <= n_max)
