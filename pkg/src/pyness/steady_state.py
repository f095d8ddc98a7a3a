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
Stationary correlation matrix: closed-form response to a constant source,
self-consistent dephasing feedback restricted to the nonzero entries of the
dephasing matrix, and the cost model choosing how to form that feedback
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import logging
from time import time

import numpy as np
from scipy.linalg import lu_solve

from .constants import (
    CONDITION_LIMIT, CONSISTENCY_TOL, CONVENTION, DEFAULT_MEMORY_BUDGET, EIG_TOL, MAX_REFINEMENTS, OCCUPATION_TOL,
    REFINEMENT_TOL, STABILITY_TOL)
from .correlations import CorrelationMatrix
from .dynamics import eom_rhs
from .errors import ConsistencyFailure, MemoryBudgetExceeded, SingularSystem
from .model import DephasingKind, DephasingPattern, NetworkModel, check_model, dephasing_pattern
from .spectral import SpectralData, decompose, effective_hamiltonian
from .utils import frobenius, hermitize, lu_with_condition


COMPLEX_BYTES: int = np.dtype(np.complex128).itemsize


class StrategyTag(Enum):
    LYAPUNOV_ONLY = 'lyapunov_only'
    RESTRICTED_PER_ELEMENT = 'restricted_per_element'
    RESTRICTED_VIA_FULL = 'restricted_via_full'
    FULL_VECTORIZED = 'full_vectorized'


@dataclass(slots=True, frozen=True)
class SolveStrategy:
    tag: StrategyTag
    predicted_cost: float


@dataclass(slots=True, frozen=True, eq=False)
class RestrictedSuperoperator:
    """
    Dephasing feedback acting on the entries of C selected by the pattern:
    row l is the output pair pattern.indices[l], column k the input pair
    pattern.indices[k]
    """

    entries: np.ndarray
    pattern: DephasingPattern

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(slots=True)
class SolverOptions:
    stability_tol: float = STABILITY_TOL
    eig_tol: float = EIG_TOL
    condition_limit: float = CONDITION_LIMIT
    consistency_tol: float = CONSISTENCY_TOL
    max_refinements: int = MAX_REFINEMENTS
    refinement_tol: float = REFINEMENT_TOL
    zero_tol: float = 0.0
    workers: int = 1
    chunk_size: int | None = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    check_physical: bool = True


@dataclass(slots=True)
class SteadyStateSolution:
    correlations: CorrelationMatrix
    strategy: SolveStrategy
    n_sigma: int
    pattern_kind: DephasingKind
    timings: dict[str, float] = field(default_factory=dict)
    residual: float = 0.0
    eigenbasis_condition: float = 1.0
    refinement_steps: int = 0

    def metadata(self) -> dict:
        return {
            'strategy': self.strategy.tag.value,
            'predicted_cost': self.strategy.predicted_cost,
            'n_sigma': self.n_sigma,
            'pattern': self.pattern_kind.value,
            'timings': self.timings,
            'wall_seconds': sum(self.timings.values()),
            'stationarity_residual': self.residual,
            'eigenbasis_condition': self.eigenbasis_condition,
            'refinement_steps': self.refinement_steps,
            'convention': CONVENTION
        }


def lyapunov_steady_state(decomp: SpectralData, source: np.ndarray) -> CorrelationMatrix:
    """
    Stationary state sustained by a constant Hermitian source
    (gamma+ alone, or the full lesser self-energy)
    """

    return CorrelationMatrix(hermitize(decomp.kernel(source)))


def choose_strategy(n_modes: int, pattern: DephasingPattern) -> SolveStrategy:
    """
    Cost = max[min(N_s^2 N^2, N^5), N_s^3, N^3]: formation of the restricted
    feedback (per element or through full N x N responses), its dense
    solve, and the standard matrix operations
    """

    n: float = float(n_modes)
    ns: float = float(pattern.n_sigma)
    cost: float = max(min(ns ** 2 * n ** 2, n ** 5), ns ** 3, n ** 3)

    tag: StrategyTag
    if pattern.n_sigma == 0:
        tag = StrategyTag.LYAPUNOV_ONLY
    elif ns ** 2 < n ** 3:
        tag = StrategyTag.RESTRICTED_PER_ELEMENT
    else:
        tag = StrategyTag.RESTRICTED_VIA_FULL
    return SolveStrategy(tag, cost)


def _chunks(n: int, chunk_size: int) -> list[range]:
    return [range(i, min(i + chunk_size, n)) for i in range(0, n, chunk_size)]


def form_restricted_superoperator(
    decomp: SpectralData,
    model: NetworkModel,
    pattern: DephasingPattern,
    tag: StrategyTag = StrategyTag.RESTRICTED_PER_ELEMENT,
    workers: int = 1,
    chunk_size: int | None = None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> RestrictedSuperoperator:
    """
    Column (m, m') holds sigma[m, m'] V [Delta * (W^dagger |m><m'| W)] V^dagger
    read at every output pair of the pattern

    Columns are independent: they are split into chunks and formed by a
    pool of workers sharing V, W, Delta and sigma read-only.
    """

    ns: int = pattern.n_sigma
    if ns == 0:
        raise ValueError("No dephasing: nothing to form!")
    if ns * ns * COMPLEX_BYTES > memory_budget:
        raise MemoryBudgetExceeded(
            f"Restricted superoperator needs {ns * ns * COMPLEX_BYTES} bytes (budget: {memory_budget})")

    v: np.ndarray = decomp.right_vectors
    v_dagger: np.ndarray = v.conj().T
    w_conj: np.ndarray = decomp.left_vectors.conj()
    w: np.ndarray = decomp.left_vectors
    delta: np.ndarray = decomp.delta
    rows, cols = pattern.rows, pattern.cols
    weights: np.ndarray = np.real(model.dephasing)[rows, cols]

    # Output selectors for the per-element path
    out_rows: np.ndarray = v[rows, :]
    out_cols: np.ndarray = v.conj()[cols, :]

    entries = np.empty((ns, ns), dtype=np.complex128)

    def form_column(k: int) -> None:
        inner: np.ndarray = delta * np.outer(w_conj[rows[k], :], w[cols[k], :])
        if tag is StrategyTag.RESTRICTED_VIA_FULL:
            entries[:, k] = weights[k] * (v @ inner @ v_dagger)[rows, cols]
        else:
            entries[:, k] = weights[k] * np.einsum('lp,lp->l', out_rows @ inner, out_cols)

    def form_chunk(chunk: range) -> None:
        for k in chunk:
            form_column(k)

    start = time()
    workers = max(1, workers)
    size: int = chunk_size or max(1, -(-ns // (4 * workers)))
    chunks: list[range] = _chunks(ns, size)
    if workers == 1:
        for chunk in chunks:
            form_chunk(chunk)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # Consume the iterator to surface worker exceptions
            list(pool.map(form_chunk, chunks))

    logging.debug(f"Formed {ns}x{ns} restricted superoperator ({tag.value}, {workers} workers) in {time() - start:.3f}s")
    return RestrictedSuperoperator(entries, pattern)


def factor_restricted(d: RestrictedSuperoperator, condition_limit: float = CONDITION_LIMIT) -> tuple:
    """
    LU factorisation of 1 - d, rejected when ill-conditioned
    """

    system: np.ndarray = np.eye(d.size, dtype=np.complex128) - d.entries
    lu_piv, cond = lu_with_condition(system)
    logging.debug(f"Restricted system condition number (1-norm estimate): {cond:.3g}")
    if cond > condition_limit:
        raise SingularSystem(f"Restricted system is singular to working precision (condition number: {cond:.3g})")
    return lu_piv


def solve_restricted(
    c_gamma_restricted: np.ndarray,
    d: RestrictedSuperoperator,
    condition_limit: float = CONDITION_LIMIT
) -> np.ndarray:
    """
    Solve (1 - d) c = c_gamma on the dephased entries
    """

    lu_piv = factor_restricted(d, condition_limit=condition_limit)
    return lu_solve(lu_piv, np.asarray(c_gamma_restricted, dtype=np.complex128), check_finite=False)


def lesser_self_energy(restricted: np.ndarray, model: NetworkModel, pattern: DephasingPattern) -> np.ndarray:
    """
    gamma+ + sigma * C, which only needs C on the dephased entries
    """

    source: np.ndarray = np.array(model.gamma_plus, dtype=np.complex128)
    rows, cols = pattern.rows, pattern.cols
    source[rows, cols] += np.real(model.dephasing)[rows, cols] * restricted
    return source


def complete_correlation_matrix(
    restricted: np.ndarray,
    model: NetworkModel,
    decomp: SpectralData,
    pattern: DephasingPattern | None = None,
    consistency_tol: float | None = CONSISTENCY_TOL
) -> CorrelationMatrix:
    if pattern is None:
        pattern = dephasing_pattern(model)
    c: CorrelationMatrix = lyapunov_steady_state(decomp, lesser_self_energy(restricted, model, pattern))
    if consistency_tol is not None and pattern.n_sigma > 0:
        deviation: float = float(np.max(np.abs(c.matrix[pattern.rows, pattern.cols] - restricted)))
        if deviation > consistency_tol:
            raise ConsistencyFailure(
                f"Completed correlation matrix departs from the restricted solution by {deviation:.3g}")
    return c


def stationarity_residual(c: CorrelationMatrix, model: NetworkModel) -> float:
    """
    Frobenius norm of the equation of motion at c, relative to |gamma+|
    """

    scale: float = frobenius(model.gamma_plus)
    residual: float = frobenius(eom_rhs(c, model))
    return residual / scale if scale > 0.0 else residual


def refine_steady_state(
    c: CorrelationMatrix,
    model: NetworkModel,
    decomp: SpectralData,
    pattern: DephasingPattern,
    lu_piv: tuple | None = None,
    max_steps: int = MAX_REFINEMENTS,
    tol: float = REFINEMENT_TOL
) -> tuple[CorrelationMatrix, float, int]:
    """
    Iterative refinement on the equation of motion.

    The correction d solves A d + d A^dagger + sigma * d = -R for the residual R,
    reusing the eigendecomposition and, on the dephased entries, the LU factors of 1 - d.
    Steps stop once the relative residual falls below tol or no longer decreases.
    """

    scale: float = frobenius(model.gamma_plus) or 1.0
    rows, cols = pattern.rows, pattern.cols
    sigma_restricted: np.ndarray = np.real(model.dephasing)[rows, cols]
    r: np.ndarray = eom_rhs(c, model)
    residual: float = frobenius(r) / scale
    steps: int = 0
    while steps < max_steps and residual > tol:
        source: np.ndarray = r
        if pattern.n_sigma > 0:
            if lu_piv is None:
                raise ValueError("Refinement with dephasing requires the restricted factorisation")
            correction: np.ndarray = lu_solve(lu_piv, decomp.kernel(r)[rows, cols], check_finite=False)
            source = r.copy()
            source[rows, cols] += sigma_restricted * correction
        candidate = CorrelationMatrix(hermitize(c.matrix + decomp.kernel(source)))
        candidate_r: np.ndarray = eom_rhs(candidate, model)
        candidate_residual: float = frobenius(candidate_r) / scale
        if not candidate_residual < residual:
            break
        c, r, residual = candidate, candidate_r, candidate_residual
        steps += 1
    logging.debug(f"Refinement: {steps} step(s), stationarity residual {residual:.3g}")
    return c, residual, steps


def solve(model: NetworkModel, options: SolverOptions | None = None) -> SteadyStateSolution:
    """
    validate -> pattern -> decompose -> dispatch -> form -> solve -> complete
    """

    opts: SolverOptions = options or SolverOptions()
    timings: dict[str, float] = {}

    def lap(stage: str, t0: float) -> float:
        t1 = time()
        timings[stage] = t1 - t0
        return t1

    t = time()
    check_model(model)
    pattern: DephasingPattern = dephasing_pattern(model, zero_tol=opts.zero_tol)
    strategy: SolveStrategy = choose_strategy(model.n_modes, pattern)
    logging.info(
        f"N={model.n_modes}, N_sigma={pattern.n_sigma} ({pattern.kind.value}): "
        f"strategy {strategy.tag.value}, predicted cost {strategy.predicted_cost:.3g}")
    t = lap('validation', t)

    decomp: SpectralData = decompose(
        effective_hamiltonian(model), stability_tol=opts.stability_tol, eig_tol=opts.eig_tol)
    t = lap('decomposition', t)

    c: CorrelationMatrix
    lu_piv: tuple | None = None
    if strategy.tag is StrategyTag.LYAPUNOV_ONLY:
        c = lyapunov_steady_state(decomp, model.gamma_plus)
        t = lap('completion', t)
    else:
        d: RestrictedSuperoperator = form_restricted_superoperator(
            decomp,
            model,
            pattern,
            tag=strategy.tag,
            workers=opts.workers,
            chunk_size=opts.chunk_size,
            memory_budget=opts.memory_budget)
        t = lap('formation', t)

        c_gamma: CorrelationMatrix = lyapunov_steady_state(decomp, model.gamma_plus)
        lu_piv = factor_restricted(d, condition_limit=opts.condition_limit)
        restricted: np.ndarray = lu_solve(
            lu_piv, c_gamma.matrix[pattern.rows, pattern.cols], check_finite=False)
        t = lap('restricted_solve', t)

        c = complete_correlation_matrix(restricted, model, decomp, pattern, consistency_tol=None)
        t = lap('completion', t)

    residual: float
    steps: int
    c, residual, steps = refine_steady_state(
        c, model, decomp, pattern, lu_piv=lu_piv, max_steps=opts.max_refinements, tol=opts.refinement_tol)
    t = lap('refinement', t)
    if residual > opts.consistency_tol:
        raise ConsistencyFailure(
            f"Steady state does not satisfy the equation of motion (relative residual after "
            f"{steps} refinement step(s): {residual:.3g})")

    if opts.check_physical:
        issues: list[str] = c.defects(OCCUPATION_TOL)
        if issues:
            raise ConsistencyFailure(f"Unphysical steady state: {'; '.join(issues)}")

    lap('checks', t)
    logging.info(f"Steady state took: {sum(timings.values()):.3f}s (stationarity residual: {residual:.3g})")

    return SteadyStateSolution(
        c,
        strategy,
        pattern.n_sigma,
        pattern.kind,
        timings=timings,
        residual=residual,
        eigenbasis_condition=decomp.eigenbasis_condition,
        refinement_steps=steps)


def steady_state(model: NetworkModel, options: SolverOptions | None = None) -> CorrelationMatrix:
    return solve(model, options).correlations
