# chains/services/birthdeath.py
"""
Single-species "nice" birth-death chains: birth probability at most C/m,
death probability at least D, holding probability 1 - p - q.
"""

import logging
import math
from typing import Optional, Sequence

from chains.domain import ModelSpec, NiceChainRun, NiceChainSpec
from chains.exceptions import (
    InvalidInput, InvariantViolation, RequiresInterspecific, RequiresNoIntra, ZeroTrials,
)
from chains.utils import mean_and_se, run_parallel, trial_rng

logger = logging.getLogger(__name__)


def dominating_chain(spec: ModelSpec) -> NiceChainSpec:
    """
    The canonical dominating chain of a spec without intraspecific
    competition: p(m) = theta / (alpha m + theta), q(m) = alpha_min / (alpha + 2 theta).
    """
    if spec.gamma0 > 0 or spec.gamma1 > 0:
        raise RequiresNoIntra('The dominating chain needs gamma0 = gamma1 = 0')
    if spec.alpha_min <= 0:
        raise RequiresInterspecific('The dominating chain needs alpha_min > 0')

    theta, alpha = spec.theta, spec.alpha
    chain = NiceChainSpec(
        theta=theta,
        alpha=alpha,
        alpha_min=spec.alpha_min,
        C=theta / alpha,
        D=spec.alpha_min / (alpha + 2 * theta),
        degenerate=theta == 0,
    )
    if chain.p(1) + chain.q(1) > 1:
        raise InvariantViolation(f"p(1) + q(1) = {chain.p(1) + chain.q(1)} > 1")
    if chain.degenerate:
        logger.warning('Dominating chain has theta = 0: p(m) = 0 for every m, chain is not nice')
    return chain


def tabulated_chain(p_table: Sequence[float], q_table: Sequence[float]) -> NiceChainSpec:
    """
    Build a nice chain from explicit tables indexed by state.

    Args:
        p_table: birth probabilities p(0), p(1), ...
        q_table: death probabilities, same length

    Returns:
        NiceChainSpec: with witnesses C = max m p(m) and D = min q(m) over
        the table, used to extrapolate beyond it

    Raises:
        InvalidInput: If the tables are malformed or p + q > 1 somewhere
    """
    if len(p_table) != len(q_table) or len(p_table) < 2:
        raise InvalidInput('p and q tables must have equal length >= 2')
    if p_table[0] != 0 or q_table[0] != 0:
        raise InvalidInput('p(0) and q(0) must be 0')
    for m, (p, q) in enumerate(zip(p_table, q_table)):
        if p < 0 or q < 0 or p + q > 1 + 1e-12:
            raise InvalidInput(f"Invalid probabilities at state {m}: p={p}, q={q}")

    states = range(1, len(p_table))
    C = max(m * p_table[m] for m in states)
    D = min(q_table[m] for m in states)
    degenerate = any(p_table[m] == 0 or q_table[m] == 0 for m in states)
    if degenerate:
        logger.warning('Tabulated chain has a zero birth or death probability at a positive state')
    return NiceChainSpec(
        p_table=tuple(float(p) for p in p_table),
        q_table=tuple(float(q) for q in q_table),
        C=C,
        D=D,
        degenerate=degenerate,
    )


def default_cap(n0: int) -> int:
    return 10 ** 4 * (n0 + 1)


def run_nice_chain(nice: NiceChainSpec, n0: int, rng, cap: Optional[int] = None) -> NiceChainRun:
    """
    Run the chain from n0 until it hits 0 or `cap` steps have passed.

    Holding steps are skipped in one geometric draw; E counts them all.
    """
    if n0 < 0:
        raise InvalidInput(f"Initial state must be >= 0, got {n0}")
    if cap is None:
        cap = default_cap(n0)

    state, steps, births, peak = n0, 0, 0, n0
    while state > 0:
        p, q = nice.p(state), nice.q(state)
        move = p + q
        if move <= 0:
            return NiceChainRun(extinction_time=cap, births=births, max_state=peak, censored=True)
        steps += int(rng.geometric(move)) if move < 1 else 1
        if steps > cap:
            return NiceChainRun(extinction_time=cap, births=births, max_state=peak, censored=True)
        if rng.random() * move < p:
            state += 1
            births += 1
            if state > peak:
                peak = state
        else:
            state -= 1
    return NiceChainRun(extinction_time=steps, births=births, max_state=peak)


def _nice_chain_tally(nice, n0, seed, cell, cap, e_limit, b_limit, start, stop):
    tally = {
        'trials': 0, 'censored': 0, 'sum_E': 0, 'sumsq_E': 0, 'sum_B': 0, 'sumsq_B': 0,
        'sum_max': 0, 'E_tail': 0, 'B_tail': 0,
    }
    for trial in range(start, stop):
        run = run_nice_chain(nice, n0, trial_rng(seed, cell, trial), cap)
        tally['trials'] += 1
        if run.censored:
            tally['censored'] += 1
            continue
        tally['sum_E'] += run.extinction_time
        tally['sumsq_E'] += run.extinction_time ** 2
        tally['sum_B'] += run.births
        tally['sumsq_B'] += run.births ** 2
        tally['sum_max'] += run.max_state
        if e_limit is not None and run.extinction_time > e_limit:
            tally['E_tail'] += 1
        if b_limit is not None and run.births > b_limit:
            tally['B_tail'] += 1
    return tally


def nice_chain_statistics(
    nice: NiceChainSpec,
    n0: int,
    trials: int,
    seed: int,
    cell: int = 0,
    threads: int = 1,
    cap: Optional[int] = None,
    theta_star: Optional[float] = None,
    c_star: Optional[float] = None,
) -> dict:
    """
    Aggregate E(n0) and B(n0) over `trials` runs.

    The tail fractions count runs with E > theta_star * n0 and
    B > c_star * log^2 n0 when those constants are given.
    """
    if trials < 1:
        raise ZeroTrials('trials must be >= 1')
    e_limit = theta_star * n0 if theta_star is not None else None
    b_limit = c_star * math.log(max(n0, 2)) ** 2 if c_star is not None else None
    tally = run_parallel(_nice_chain_tally, trials, threads, nice, n0, seed, cell, cap, e_limit, b_limit)

    done = tally['trials'] - tally['censored']
    mean_e, se_e = mean_and_se(tally['sum_E'], tally['sumsq_E'], done)
    mean_b, se_b = mean_and_se(tally['sum_B'], tally['sumsq_B'], done)
    stats = {
        'n0': n0,
        'trials': tally['trials'],
        'censored': tally['censored'],
        'mean_E': mean_e,
        'se_E': se_e,
        'mean_B': mean_b,
        'se_B': se_b,
        'mean_max_state': tally['sum_max'] / done if done else 0.0,
        'E_tail_fraction': tally['E_tail'] / done if done and e_limit is not None else None,
        'B_tail_fraction': tally['B_tail'] / done if done and b_limit is not None else None,
    }
    logger.info(
        f"Nice chain from {n0}: mean E={mean_e:.4g}, mean B={mean_b:.4g}, "
        f"censored {tally['censored']}/{tally['trials']}"
    )
    return stats
