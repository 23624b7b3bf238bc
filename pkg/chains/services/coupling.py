# chains/services/coupling.py
"""
Executable pseudo-coupling of the two-species chain S and its dominating
single-species chain N.

Both chains read one shared uniform xi per step. N moves up when
xi < p(N), down when xi >= 1 - q(N), and holds otherwise. S only moves at
steps where min S = N; it then fires a bad non-competitive reaction when
xi < P(S), a good reaction when xi >= 1 - Q(S), and any other reaction in
between, each conditionally on its class.
"""

import logging
from typing import Iterable, Iterator, List, Optional

import numpy as np
from scipy import stats

from chains.domain import (
    REACTIONS, Config, CouplingReport, ModelSpec, NiceChainSpec, ReactionKind,
)
from chains.exceptions import (
    InvalidInput, InvariantViolation, NotDominating, ReplayMismatch, ZeroTrials,
)
from chains.utils import run_parallel, trial_rng

from .birthdeath import dominating_chain, run_nice_chain
from .kinetics import check_counts, classify_step, effects_for, rate_vector
from .simulation import run_to_consensus

logger = logging.getLogger(__name__)

RULE_2B_READINGS = ('all_good', 'good_competitive')
INTERVAL_SLACK = 1e-12

BAD = 'bad_noncomp'
GOOD = 'good'
OTHER = 'other'


def default_cap(n: int) -> int:
    return 10 ** 5 * (n + 1)


def _partition(x0: int, x1: int, rates, effects, reading: str) -> dict:
    """Reaction indices and propensity mass of the three xi-classes at (x0, x1)."""
    classes = {BAD: [], GOOD: [], OTHER: []}
    for index, rate in enumerate(rates):
        if rate <= 0:
            continue
        _, good, bad_nc, _ = classify_step(x0, x1, index, effects)
        if bad_nc:
            classes[BAD].append(index)
        elif good and (reading == 'all_good' or index >= 4):
            classes[GOOD].append(index)
        else:
            classes[OTHER].append(index)
    return classes


def _pick(indices: List[int], rates, u: float) -> int:
    mass = sum(rates[index] for index in indices)
    target = u * mass
    cumulative = 0.0
    for index in indices:
        cumulative += rates[index]
        if target < cumulative:
            return index
    return indices[-1]


def check_domination_premises(
    spec: ModelSpec,
    amax: int = 200,
    bmax: int = 200,
    nice: Optional[NiceChainSpec] = None,
    reading: str = 'all_good',
) -> list:
    """
    Check P(a, b) <= p(min(a, b)) and Q(a, b) >= q(min(a, b)) for every
    1 <= a <= amax, 1 <= b <= bmax. Returns the violating states as dicts.
    """
    nice = nice or dominating_chain(spec)
    effects = effects_for(spec)
    violations = []
    for a in range(1, amax + 1):
        for b in range(1, bmax + 1):
            rates = rate_vector(spec, a, b)
            phi = sum(rates)
            classes = _partition(a, b, rates, effects, reading)
            P = sum(rates[i] for i in classes[BAD]) / phi
            Q = sum(rates[i] for i in classes[GOOD]) / phi
            m = min(a, b)
            p, q = nice.p(m), nice.q(m)
            if P > p + INTERVAL_SLACK or Q < q - INTERVAL_SLACK:
                violations.append({'a': a, 'b': b, 'P': P, 'Q': Q, 'p': p, 'q': q})
    return violations


class _XiSource:
    def __init__(self, rng: np.random.Generator, replay: Optional[Iterable[float]]):
        self.rng = rng
        self.replay: Optional[Iterator[float]] = iter(replay) if replay is not None else None

    def next(self) -> float:
        if self.replay is None:
            return float(self.rng.random())
        try:
            return float(next(self.replay))
        except StopIteration:
            raise ReplayMismatch('xi stream exhausted before the coupled run finished')


def coupled_run(
    spec: ModelSpec,
    init: Config,
    rng: np.random.Generator,
    cap: Optional[int] = None,
    xi_stream: Optional[Iterable[float]] = None,
    reaction_stream: Optional[Iterable] = None,
    rule2b_reading: str = 'all_good',
    fast_forward: bool = False,
    nice: Optional[NiceChainSpec] = None,
) -> CouplingReport:
    """
    Run the coupled pair (S, N) from S = init, N = min(init) until N hits 0
    or `cap` steps have passed.

    Args:
        spec: model with gamma = 0 and alpha_min > 0
        init: starting configuration of S
        rng: source of xi and of the within-class reaction choice
        cap: step budget, default 10^5 (n + 1)
        xi_stream: replayed xi values instead of rng draws
        reaction_stream: replayed S reactions (ReactionKind or labels);
            each must belong to the class selected by xi
        rule2b_reading: 'all_good' uses every good reaction for the
            upper xi interval, 'good_competitive' only the competitive ones
        fast_forward: while S is frozen below N, replace N's holding
            steps by one geometric draw; the law of the report is
            unchanged. Ignored in replay mode.
        nice: dominating chain to couple with, default the canonical one

    Raises:
        NotDominating: If P > p(m) or Q < q(m) at a visited state
        ReplayMismatch: If a replayed reaction does not fit its xi
    """
    if rule2b_reading not in RULE_2B_READINGS:
        raise InvalidInput(f"rule2b_reading must be one of {RULE_2B_READINGS}")
    check_counts(init)
    nice = nice or dominating_chain(spec)
    effects = effects_for(spec)
    if cap is None:
        cap = default_cap(init.n)

    xi_source = _XiSource(rng, xi_stream)
    reactions = iter(reaction_stream) if reaction_stream is not None else None
    fast_forward = fast_forward and xi_stream is None and reactions is None

    s0, s1 = init.x0, init.x1
    n_hat = min(s0, s1)
    report = CouplingReport(initial=init)
    j_count = b_count = 0
    t = 0

    while True:
        low = min(s0, s1)
        if low == n_hat:
            report.tau.append(t)
            report.tau_states.append((s0, s1))
        if low > n_hat:
            report.violations_min += 1
        if j_count > b_count:
            report.violations_j += 1
        if report.s_consensus_step is None and low == 0:
            report.s_consensus_step = t
        if n_hat == 0:
            report.n_extinction_step = t
            break
        if t >= cap:
            report.censored = True
            break

        if fast_forward and low < n_hat and j_count <= b_count:
            # S is frozen: jump N over its holding steps to its next move
            p, q = nice.p(n_hat), nice.q(n_hat)
            move = p + q
            skip = int(rng.geometric(move)) if move < 1 else 1
            if t + skip > cap:
                t = cap
                continue
            t += skip
            if rng.random() * move < p:
                n_hat += 1
                b_count += 1
            else:
                n_hat -= 1
            continue

        xi = xi_source.next()
        m = n_hat
        p, q = nice.p(m), nice.q(m)
        if p > 1 - q + INTERVAL_SLACK:
            raise InvariantViolation(f"p({m}) + q({m}) > 1")
        if xi < p:
            n_hat += 1
            b_count += 1
        elif xi >= 1 - q:
            n_hat -= 1

        if low == m and low > 0:
            rates = rate_vector(spec, s0, s1)
            phi = sum(rates)
            classes = _partition(s0, s1, rates, effects, rule2b_reading)
            masses = {key: sum(rates[i] for i in indices) for key, indices in classes.items()}
            P, Q = masses[BAD] / phi, masses[GOOD] / phi
            if abs(sum(masses.values()) / phi - 1) > INTERVAL_SLACK:
                raise InvariantViolation(f"Class masses at ({s0},{s1}) do not sum to phi")
            if P > p + INTERVAL_SLACK or Q < q - INTERVAL_SLACK:
                raise NotDominating(
                    Config(s0, s1),
                    f"At ({s0},{s1}): P={P:.6g} vs p({m})={p:.6g}, Q={Q:.6g} vs q({m})={q:.6g}",
                )
            if P > 1 - Q + INTERVAL_SLACK:
                raise InvariantViolation(f"xi intervals overlap at ({s0},{s1})")

            if xi < P:
                chosen = BAD
            elif xi >= 1 - Q:
                chosen = GOOD
            else:
                chosen = OTHER
            if not classes[chosen]:
                # the middle interval is empty up to rounding
                chosen = GOOD if classes[GOOD] else BAD

            if reactions is not None:
                index = _replayed_index(reactions, classes[chosen], chosen, t)
            else:
                index = _pick(classes[chosen], rates, float(rng.random()))
            if chosen == BAD:
                j_count += 1
            dx0, dx1 = effects[index]
            s0, s1 = s0 + dx0, s1 + dx1
            report.s_updates += 1
        t += 1

    report.steps = t
    report.final_j = j_count
    report.final_b = b_count
    report.final_s = Config(s0, s1)
    report.final_n = n_hat
    return report


def _replayed_index(reactions: Iterator, allowed: List[int], chosen: str, t: int) -> int:
    try:
        kind = next(reactions)
    except StopIteration:
        raise ReplayMismatch(f"Reaction stream exhausted at step {t}")
    if not isinstance(kind, ReactionKind):
        kind = ReactionKind.from_label(str(kind))
    index = REACTIONS.index(kind)
    if index not in allowed:
        raise ReplayMismatch(f"Replayed {kind} at step {t} is not in the {chosen} class")
    return index


def tau_state(report: CouplingReport, k: int) -> tuple:
    """
    S at tau(k + 1), the state after its k-th move. Once S is absorbed the
    last recorded state stands in for later ones.
    """
    if not report.tau_states:
        return report.initial.as_tuple()
    return report.tau_states[min(k, len(report.tau_states) - 1)]


def _coupling_tally(spec, init, seed, cell, cap, rule2b_reading, fast_forward, start, stop):
    tally = {
        'runs': 0, 'censored': 0, 'dirty_runs': 0, 'violations_min': 0, 'violations_j': 0,
        'sum_steps': 0, 'sum_j': 0, 'sum_b': 0, 'sum_s_updates': 0,
    }
    for trial in range(start, stop):
        report = coupled_run(
            spec, init, trial_rng(seed, cell, trial), cap=cap,
            rule2b_reading=rule2b_reading, fast_forward=fast_forward,
        )
        tally['runs'] += 1
        tally['censored'] += report.censored
        tally['dirty_runs'] += not report.clean
        tally['violations_min'] += report.violations_min
        tally['violations_j'] += report.violations_j
        tally['sum_steps'] += report.steps
        tally['sum_j'] += report.final_j
        tally['sum_b'] += report.final_b
        tally['sum_s_updates'] += report.s_updates
    return tally


def coupling_statistics(
    spec: ModelSpec,
    init: Config,
    runs: int,
    seed: int,
    cell: int = 0,
    threads: int = 1,
    cap: Optional[int] = None,
    rule2b_reading: str = 'all_good',
    fast_forward: bool = True,
) -> dict:
    """Aggregate violation counts over independent coupled runs."""
    if runs < 1:
        raise ZeroTrials('runs must be >= 1')
    dominating_chain(spec)
    logger.info(f"Coupling check: {runs} runs from {init}, cap {cap or default_cap(init.n)}")
    tally = run_parallel(
        _coupling_tally, runs, threads, spec, init, seed, cell, cap, rule2b_reading, fast_forward,
    )
    finished = tally['runs']
    summary = {
        'initial': str(init),
        'runs': finished,
        'censored': tally['censored'],
        'dirty_runs': tally['dirty_runs'],
        'violations_min': tally['violations_min'],
        'violations_j': tally['violations_j'],
        'mean_steps': tally['sum_steps'] / finished,
        'mean_j': tally['sum_j'] / finished,
        'mean_b': tally['sum_b'] / finished,
        'mean_s_updates': tally['sum_s_updates'] / finished,
    }
    if summary['dirty_runs']:
        logger.warning(f"{summary['dirty_runs']} coupled runs broke domination")
    return summary


def _domination_tally(spec, nice, init, seed, cell, max_steps, start, stop):
    tally = {'runs': 0, 'censored': 0, 'T': [], 'J': [], 'E': [], 'B': []}
    for trial in range(start, stop):
        rng = trial_rng(seed, cell, trial)
        direct = run_to_consensus(spec, init, rng, max_steps=max_steps)
        chain = run_nice_chain(nice, init.min_count, rng)
        tally['runs'] += 1
        if direct.censored or chain.censored:
            tally['censored'] += 1
            continue
        tally['T'].append(direct.steps)
        tally['J'].append(direct.bad_noncompetitive_events)
        tally['E'].append(chain.extinction_time)
        tally['B'].append(chain.births)
    return tally


def _one_sided_ks(smaller: list, larger: list, significance: float) -> dict:
    # alternative='less': some x has F_smaller(x) < F_larger(x), i.e. `smaller` is not dominated
    result = stats.ks_2samp(smaller, larger, alternative='less')
    return {
        'statistic': float(result.statistic),
        'p_value': float(result.pvalue),
        'consistent': bool(result.pvalue >= significance),
    }


def domination_statistics(
    spec: ModelSpec,
    init: Config,
    runs: int,
    seed: int,
    cell: int = 0,
    threads: int = 1,
    max_steps: Optional[int] = None,
    significance: float = 1e-3,
) -> dict:
    """
    Compare direct jump-chain runs of S with independent runs of the
    dominating chain N from min(init): T(S) against E(N) and J(S) against
    B(N), each with a one-sided two-sample Kolmogorov-Smirnov test.

    `consistent` is False when the test rejects domination at `significance`.
    """
    if runs < 1:
        raise ZeroTrials('runs must be >= 1')
    check_counts(init)
    nice = dominating_chain(spec)
    tally = run_parallel(_domination_tally, runs, threads, spec, nice, init, seed, cell, max_steps)
    summary = {'initial': str(init), 'runs': tally['runs'], 'censored': tally['censored']}
    if not tally['T']:
        logger.warning(f"Every domination run from {init} was censored")
        summary.update(T_vs_E=None, J_vs_B=None)
        return summary
    summary['T_vs_E'] = _one_sided_ks(tally['T'], tally['E'], significance)
    summary['J_vs_B'] = _one_sided_ks(tally['J'], tally['B'], significance)
    summary['mean_T'] = sum(tally['T']) / len(tally['T'])
    summary['mean_E'] = sum(tally['E']) / len(tally['E'])
    summary['mean_J'] = sum(tally['J']) / len(tally['J'])
    summary['mean_B'] = sum(tally['B']) / len(tally['B'])
    if not (summary['T_vs_E']['consistent'] and summary['J_vs_B']['consistent']):
        logger.warning(f"Direct runs from {init} reject domination: {summary}")
    return summary
