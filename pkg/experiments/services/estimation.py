# experiments/services/estimation.py
"""
Monte Carlo estimation of rho, the probability that the initial majority
wins, with Wilson score intervals.
"""

import logging
import math
from typing import Optional, Tuple

from scipy import stats

from chains.domain import Config, ConsensusState, ModelSpec, Outcome
from chains.exceptions import InvalidInput, ZeroTrials
from chains.services.kinetics import check_counts, consensus_state, validate_spec
from chains.services.simulation import run_to_consensus
from chains.utils import mean_and_se, run_parallel, trial_rng
from experiments.domain import MEASURES, Estimate

logger = logging.getLogger(__name__)


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    Args:
        successes: number of successes
        trials: number of trials; 0 gives the uninformative [0, 1]
        confidence: two-sided level in (0, 1)

    Returns:
        (lower, upper), both inside [0, 1]
    """
    if not 0 < confidence < 1:
        raise InvalidInput(f"Confidence must lie in (0, 1), got {confidence}")
    if trials == 0:
        return 0.0, 1.0
    z = float(stats.norm.ppf((1 + confidence) / 2))
    p_hat = successes / trials
    denominator = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denominator
    margin = (z / denominator) * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - margin), min(1.0, center + margin)


def _estimate_tally(spec, init, seed, cell, max_steps, start, stop):
    tally = {
        'trials': 0, 'wins': 0, 'minority_wins': 0, 'both_extinct': 0, 'censored': 0,
        'hit_tie': 0, 'tie_failures': 0,
    }
    for name in MEASURES:
        tally[f'sum_{name}'] = 0
        tally[f'sumsq_{name}'] = 0

    for trial in range(start, stop):
        result = run_to_consensus(spec, init, trial_rng(seed, cell, trial), max_steps=max_steps)
        tally['trials'] += 1
        if result.outcome == Outcome.CENSORED:
            tally['censored'] += 1
            continue
        if result.outcome == Outcome.MAJORITY_WON:
            tally['wins'] += 1
        elif result.outcome == Outcome.MINORITY_WON:
            tally['minority_wins'] += 1
        else:
            tally['both_extinct'] += 1
        if result.hit_tie:
            tally['hit_tie'] += 1
            if result.outcome != Outcome.MAJORITY_WON:
                tally['tie_failures'] += 1
        values = (
            result.steps, result.individual_events, result.competitive_events,
            result.bad_noncompetitive_events, result.noise, result.max_total,
        )
        for name, value in zip(MEASURES, values):
            tally[f'sum_{name}'] += value
            tally[f'sumsq_{name}'] += value * value
    return tally


def _absorbed_estimate(init: Config, trials: int, confidence: float) -> Estimate:
    """Every trial from a consensus state ends where it starts; the interval collapses to rho_hat."""
    won = init.x0 > 0
    rho_hat = 1.0 if won else 0.0
    means = {name: 0.0 for name in MEASURES}
    means['max_total'] = float(init.n)
    return Estimate(
        trials=trials,
        wins=trials if won else 0,
        minority_wins=0,
        both_extinct=0 if won else trials,
        censored=0,
        confidence=confidence,
        rho_hat=rho_hat,
        ci_low=rho_hat,
        ci_high=rho_hat,
        means=means,
        std_errors={name: 0.0 for name in MEASURES},
    )


def estimate_rho(
    spec: ModelSpec,
    init: Config,
    trials: int,
    seed: int,
    cell: int = 0,
    threads: int = 1,
    confidence: float = 0.99,
    max_steps: Optional[int] = None,
    censor_warn_fraction: float = 1e-3,
) -> Estimate:
    """
    Estimate rho from `trials` independent runs from `init`.

    Trial k of cell c draws from trial_rng(seed, c, k), and the per-chunk
    tallies are integer sums, so the result is the same for any thread
    count. rho_hat is taken over the non-censored trials; BothExtinct counts
    as a failure. A start that is already at consensus gives an
    interval degenerate at rho_hat.

    Raises:
        ZeroTrials: If trials < 1
        InvalidInput: If the spec or init is invalid
    """
    if trials < 1:
        raise ZeroTrials('trials must be >= 1')
    validate_spec(spec)
    check_counts(init)
    if init.x0 < init.x1:
        raise InvalidInput(f"x0 must be the initial majority, got {init}")
    if consensus_state(init) != ConsensusState.NOT_REACHED:
        logger.info(f"{init} is already at consensus; rho is exact")
        return _absorbed_estimate(init, trials, confidence)

    logger.info(f"Estimating rho from {init}: {trials} trials, seed {seed}, cell {cell}")
    tally = run_parallel(_estimate_tally, trials, threads, spec, init, seed, cell, max_steps)

    done = tally['trials'] - tally['censored']
    rho_hat = tally['wins'] / done if done else 0.0
    ci_low, ci_high = wilson_interval(tally['wins'], done, confidence)
    means, std_errors = {}, {}
    for name in MEASURES:
        means[name], std_errors[name] = mean_and_se(tally[f'sum_{name}'], tally[f'sumsq_{name}'], done)

    estimate = Estimate(
        trials=tally['trials'],
        wins=tally['wins'],
        minority_wins=tally['minority_wins'],
        both_extinct=tally['both_extinct'],
        censored=tally['censored'],
        confidence=confidence,
        rho_hat=rho_hat,
        ci_low=min(ci_low, rho_hat),
        ci_high=max(ci_high, rho_hat),
        means=means,
        std_errors=std_errors,
        hit_tie=tally['hit_tie'],
        tie_failures=tally['tie_failures'],
    )
    if estimate.censored > censor_warn_fraction * estimate.trials:
        logger.warning(
            f"{estimate.censored} of {estimate.trials} trials from {init} were censored; "
            f"rho_hat uses the remaining {done}"
        )
    logger.info(f"rho_hat={rho_hat:.6f} [{estimate.ci_low:.6f}, {estimate.ci_high:.6f}] from {init}")
    return estimate
