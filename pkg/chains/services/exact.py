# chains/services/exact.py
"""
Exact first-step solutions on the truncated grid {0..xmax}^2.

rho(a, b) is the probability that species 0 survives when the chain first
reaches consensus from (a, b); meanT(a, b) is the expected number of jump
chain steps until consensus. Births are suppressed on the xmax face.
"""

import logging
import math
from typing import Callable, Iterator, List, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from chains.domain import ExactGrid, ModelSpec
from chains.exceptions import InvalidInput, NoConvergence

from .kinetics import effects_for, rate_vector

logger = logging.getLogger(__name__)

BOUNDARY_POLICY = 'births_suppressed'


class TruncatedChain:
    """
    Interior states (a, b), 1 <= a, b <= xmax, with their one-step
    transitions. Interior states where nothing can fire are traps.
    """

    def __init__(self, spec: ModelSpec, xmax: int):
        if xmax < 2:
            raise InvalidInput(f"xmax must be >= 2, got {xmax}")
        self.spec = spec
        self.xmax = xmax
        effects = effects_for(spec)
        # ascending total population, so birth-free chains settle in one sweep
        self.states: List[Tuple[int, int]] = sorted(
            ((a, b) for a in range(1, xmax + 1) for b in range(1, xmax + 1)),
            key=lambda s: (s[0] + s[1], s[0]),
        )
        self.index = {state: i for i, state in enumerate(self.states)}
        self.transitions: List[List[Tuple[Tuple[int, int], float]]] = []
        self.traps = []
        for a, b in self.states:
            rates = rate_vector(spec, a, b)
            if a == xmax:
                rates[0] = 0.0
            if b == xmax:
                rates[1] = 0.0
            phi = sum(rates)
            moves = {}
            if phi > 0:
                for k, rate in enumerate(rates):
                    if rate > 0:
                        dx0, dx1 = effects[k]
                        target = (a + dx0, b + dx1)
                        moves[target] = moves.get(target, 0.0) + rate / phi
            else:
                self.traps.append((a, b))
            self.transitions.append(list(moves.items()))

    def is_interior(self, state) -> bool:
        return state in self.index

    def solve(self, boundary: Callable[[int, int], float], step_cost: float,
              tol: float, direct: bool, max_sweeps: int) -> Tuple[np.ndarray, float, int]:
        """
        Solve v = step_cost + sum P v on interior states with v given on the
        boundary. Traps are fixed at 0. Returns (grid, residual, sweeps).
        """
        size = len(self.states)
        trap_set = set(self.traps)
        constant = np.zeros(size)
        links = []
        for i, state in enumerate(self.states):
            if state in trap_set:
                links.append([])
                continue
            constant[i] = step_cost
            row = []
            for target, prob in self.transitions[i]:
                j = self.index.get(target)
                if j is None:
                    constant[i] += prob * boundary(*target)
                elif target not in trap_set:
                    row.append((j, prob))
            links.append(row)

        sweeps = 0
        if direct:
            rows, cols, vals = [], [], []
            for i, row in enumerate(links):
                rows.append(i)
                cols.append(i)
                vals.append(1.0)
                for j, prob in row:
                    rows.append(i)
                    cols.append(j)
                    vals.append(-prob)
            matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
            values = np.asarray(spsolve(matrix, constant), dtype=float)
            if not np.all(np.isfinite(values)):
                raise NoConvergence('Direct solve produced non-finite values; the truncated chain is not absorbing')
        else:
            values = np.zeros(size)
            while True:
                sweeps += 1
                change = 0.0
                for i, row in enumerate(links):
                    new = constant[i]
                    for j, prob in row:
                        new += prob * values[j]
                    diff = abs(new - values[i])
                    if diff > change:
                        change = diff
                    values[i] = new
                if change <= tol / 10:
                    break
                if sweeps >= max_sweeps or not math.isfinite(change):
                    raise NoConvergence(
                        f"Gauss-Seidel did not converge in {sweeps} sweeps (last change {change:.3g})"
                    )

        residual = 0.0
        for i, row in enumerate(links):
            if self.states[i] in trap_set:
                continue
            value = constant[i] + sum(prob * values[j] for j, prob in row)
            residual = max(residual, abs(value - values[i]))

        grid = np.zeros((self.xmax + 1, self.xmax + 1))
        for a in range(self.xmax + 1):
            for b in range(self.xmax + 1):
                if a == 0 or b == 0:
                    grid[a, b] = boundary(a, b)
        for i, (a, b) in enumerate(self.states):
            grid[a, b] = values[i]
        return grid, residual, sweeps


def _rho_boundary(both_extinct_value: float) -> Callable[[int, int], float]:
    def boundary(a: int, b: int) -> float:
        if a == 0 and b == 0:
            return both_extinct_value
        return 1.0 if b == 0 else 0.0
    return boundary


def _zero_boundary(a: int, b: int) -> float:
    return 0.0


def _use_direct(xmax: int, method: str, direct_max_xmax: int) -> bool:
    if method == 'direct':
        return True
    if method == 'gauss_seidel':
        return False
    if method != 'auto':
        raise InvalidInput(f"Unknown solver method: {method}")
    return xmax <= direct_max_xmax


def _solve_rho(chain: TruncatedChain, tol, method, direct_max_xmax, max_sweeps, both_extinct_value=0.0):
    direct = _use_direct(chain.xmax, method, direct_max_xmax)
    boundary = _rho_boundary(both_extinct_value)
    rho, residual, sweeps = chain.solve(boundary, 0.0, tol, direct, max_sweeps)
    if rho.min() < -1e-9 or rho.max() > 1 + 1e-9:
        raise NoConvergence(f"rho left [0, 1]: min {rho.min():.3g}, max {rho.max():.3g}")
    return np.clip(rho, 0.0, 1.0), residual, sweeps, direct


def exact_rho(
    spec: ModelSpec,
    xmax: int,
    tol: float = 1e-10,
    method: str = 'auto',
    direct_max_xmax: int = 64,
    max_sweeps: int = 200000,
    with_truncation_gap: bool = True,
    with_mean_t: bool = False,
    both_extinct_value: float = 0.0,
) -> ExactGrid:
    """
    Solve rho on the truncated grid.

    both_extinct_value is the score of (0, 0): 0 counts it as a failure
    like the Monte Carlo estimators do, 1/2 splits it between the species.
    """
    if not 0.0 <= both_extinct_value <= 1.0:
        raise InvalidInput(f"both_extinct_value must lie in [0, 1], got {both_extinct_value}")
    chain = TruncatedChain(spec, xmax)
    rho, residual, sweeps, direct = _solve_rho(
        chain, tol, method, direct_max_xmax, max_sweeps, both_extinct_value
    )
    if residual > tol:
        raise NoConvergence(f"Residual {residual:.3g} exceeds tolerance {tol:.3g}")
    if chain.traps:
        logger.warning(f"{len(chain.traps)} interior states cannot fire any reaction; rho = 0 there")

    grid = ExactGrid(
        xmax=xmax,
        rho=rho,
        residual=residual,
        boundary_policy=BOUNDARY_POLICY,
        both_extinct_value=both_extinct_value,
        method='direct' if direct else 'gauss_seidel',
        sweeps=sweeps,
    )
    if with_truncation_gap and xmax >= 8:
        half = TruncatedChain(spec, xmax // 2)
        rho_half, _, _, _ = _solve_rho(
            half, tol, method, direct_max_xmax, max_sweeps, both_extinct_value
        )
        quarter = xmax // 4
        grid.truncation_gap = float(np.max(np.abs(
            rho[:quarter + 1, :quarter + 1] - rho_half[:quarter + 1, :quarter + 1]
        )))
    if with_mean_t:
        grid.mean_t, grid.mean_t_residual = _solve_mean_t(chain, tol, method, direct_max_xmax, max_sweeps)

    logger.info(
        f"Exact rho solved at xmax={xmax} ({grid.method}): residual {residual:.3g}, "
        f"truncation gap {grid.truncation_gap:.3g}"
    )
    return grid


def _solve_mean_t(chain: TruncatedChain, tol, method, direct_max_xmax, max_sweeps):
    if chain.traps:
        raise NoConvergence(
            f"Expected consensus time is infinite: no reaction can fire at {chain.traps[0]}"
        )
    direct = _use_direct(chain.xmax, method, direct_max_xmax)
    mean_t, residual, _ = chain.solve(_zero_boundary, 1.0, tol, direct, max_sweeps)
    if mean_t.min() < -1e-9:
        raise NoConvergence('Negative expected consensus time; the truncated chain is not absorbing')
    scale = max(1.0, float(mean_t.max()))
    if residual > tol * scale:
        raise NoConvergence(f"meanT residual {residual:.3g} exceeds tolerance")
    return mean_t, residual


def exact_mean_consensus_time(
    spec: ModelSpec,
    xmax: int,
    tol: float = 1e-10,
    method: str = 'auto',
    direct_max_xmax: int = 64,
    max_sweeps: int = 200000,
) -> np.ndarray:
    """Expected jump-chain steps to consensus; 0 on the consensus boundary."""
    chain = TruncatedChain(spec, xmax)
    mean_t, _ = _solve_mean_t(chain, tol, method, direct_max_xmax, max_sweeps)
    return mean_t


def harmonic_defect(spec: ModelSpec, f: Callable[[int, int], float], xmax: int) -> float:
    """
    max |f(a, b) - sum_y P((a, b), y) f(y)| over 1 <= a, b <= xmax, using
    the untruncated chain. States where nothing can fire are skipped.
    """
    effects = effects_for(spec)
    worst = 0.0
    for a in range(1, xmax + 1):
        for b in range(1, xmax + 1):
            rates = rate_vector(spec, a, b)
            phi = sum(rates)
            if phi <= 0:
                continue
            step = sum(
                rate / phi * f(a + effects[k][0], b + effects[k][1])
                for k, rate in enumerate(rates) if rate > 0
            )
            worst = max(worst, abs(step - f(a, b)))
    return worst


def ratio_of_counts(a: int, b: int) -> float:
    """a / (a + b), with 1/2 at (0, 0)."""
    return a / (a + b) if a + b > 0 else 0.5


def grid_rows(grid: ExactGrid) -> Iterator[tuple]:
    """CSV rows a, b, rho, meanT (meanT empty when not solved)."""
    for a in range(grid.xmax + 1):
        for b in range(grid.xmax + 1):
            mean_t = '' if grid.mean_t is None else float(grid.mean_t[a, b])
            yield a, b, float(grid.rho[a, b]), mean_t
