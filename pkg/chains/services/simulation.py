# chains/services/simulation.py
"""
Jump-chain and continuous-time runners for the two-species chain.

Both runners draw reaction selections from the same kind of uniform
stream, so seeding them identically yields the same embedded jump chain.
The Gillespie runner takes its exponential holding times from a separate
clock stream.
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np

from chains.domain import (
    MAX_COUNT, REACTIONS, Config, EventClass, EventFamily, EventTag, GillespieResult,
    ModelSpec, Outcome, ReactionKind, TrajectoryStats,
)
from chains.exceptions import CountOverflow, InvalidInput, InvariantViolation, ZeroPropensity
from chains.utils import UniformStream

from .kinetics import apply_reaction, check_counts, classify_step, effects_for, rate_vector

logger = logging.getLogger(__name__)

EventCallback = Callable[[int, ReactionKind, Config, EventClass], None]


def default_max_steps(n: int) -> int:
    return 1000 * (n + 1) + 10 ** 6


def _select(rates, u: float) -> int:
    """Index of the reaction picked by u in [0, 1), proportional to rates."""
    target = u * sum(rates)
    cumulative = 0.0
    last = -1
    for index, rate in enumerate(rates):
        if rate <= 0:
            continue
        last = index
        cumulative += rate
        if target < cumulative:
            return index
    return last


def _uniforms(rng):
    return rng if isinstance(rng, UniformStream) else UniformStream(rng)


def jump_step(spec: ModelSpec, c: Config, rng) -> Tuple[ReactionKind, Config]:
    check_counts(c)
    rates = rate_vector(spec, c.x0, c.x1)
    if sum(rates) <= 0:
        raise ZeroPropensity(f"No reaction can fire at {c}")
    u = rng.next() if isinstance(rng, UniformStream) else rng.random()
    kind = REACTIONS[_select(rates, u)]
    return kind, apply_reaction(spec, c, kind)


def _event_class(index: int, d_gap: int, good: bool, bad_nc: bool, bad_c: bool) -> EventClass:
    tags = set()
    if good:
        tags.add(EventTag.GOOD)
    if bad_nc:
        tags.add(EventTag.BAD_NONCOMPETITIVE)
    if bad_c:
        tags.add(EventTag.BAD_COMPETITIVE)
    family = EventFamily.INDIVIDUAL if index < 4 else EventFamily.COMPETITIVE
    return EventClass(family, d_gap, frozenset(tags or {EventTag.NEUTRAL}))


def _outcome(x0: int, x1: int) -> Optional[Outcome]:
    if x0 > 0 and x1 > 0:
        return None
    if x0 > 0:
        return Outcome.MAJORITY_WON
    if x1 > 0:
        return Outcome.MINORITY_WON
    return Outcome.BOTH_EXTINCT


def check_trajectory(spec: ModelSpec, stats: TrajectoryStats):
    """Raise InvariantViolation if a finished trajectory breaks its accounting."""
    if stats.censored:
        return
    problems = []
    if stats.noise != stats.initial.gap - stats.final.gap:
        problems.append(f"F={stats.noise} but gap went {stats.initial.gap} -> {stats.final.gap}")
    if stats.noise_individual + stats.noise_competitive != stats.noise:
        problems.append('F_ind + F_comp != F')
    # SD Inter removes one of each species; SD Intra moves the gap by 2
    if spec.self_destructive and stats.noise_interspecific != 0:
        problems.append(f"F_inter={stats.noise_interspecific} under self-destructive competition")
    if stats.bad_noncompetitive_events > stats.individual_events:
        problems.append('J > I')
    if stats.steps != stats.individual_events + stats.competitive_events:
        problems.append('T != I + K')
    if stats.majority_won and stats.noise >= stats.initial.gap:
        problems.append('majority won with F >= gap')
    if stats.outcome in (Outcome.MINORITY_WON, Outcome.BOTH_EXTINCT) and stats.noise < stats.initial.gap:
        problems.append('majority lost with F < gap')
    if problems:
        raise InvariantViolation(f"Trajectory from {stats.initial}: " + '; '.join(problems))


class _Walker:
    """Mutable state of one trajectory while it is being advanced."""

    __slots__ = (
        'spec', 'effects', 'x0', 'x1', 'steps', 'individual', 'competitive', 'bad_nc',
        'noise_ind', 'noise_comp', 'noise_inter', 'hit_tie', 'max_total', 'on_event',
    )

    def __init__(self, spec: ModelSpec, init: Config, on_event: Optional[EventCallback]):
        self.spec = spec
        self.effects = effects_for(spec)
        self.x0, self.x1 = init.x0, init.x1
        self.steps = self.individual = self.competitive = self.bad_nc = 0
        self.noise_ind = self.noise_comp = self.noise_inter = 0
        self.hit_tie = False
        self.max_total = init.n
        self.on_event = on_event

    def advance(self, u: float) -> bool:
        """Fire one reaction; False when nothing can fire."""
        x0, x1 = self.x0, self.x1
        rates = rate_vector(self.spec, x0, x1)
        if sum(rates) <= 0:
            return False
        if x0 == x1:
            self.hit_tie = True
        index = _select(rates, u)
        d_gap, good, bad_nc, bad_c = classify_step(x0, x1, index, self.effects)
        dx0, dx1 = self.effects[index]
        self.x0, self.x1 = x0 + dx0, x1 + dx1
        if self.x0 > MAX_COUNT or self.x1 > MAX_COUNT:
            raise CountOverflow(f"Counts exceeded {MAX_COUNT} at ({self.x0},{self.x1})")
        self.steps += 1
        if index < 4:
            self.individual += 1
            self.noise_ind += d_gap
            if bad_nc:
                self.bad_nc += 1
        else:
            self.competitive += 1
            self.noise_comp += d_gap
            if index < 6:
                self.noise_inter += d_gap
        total = self.x0 + self.x1
        if total > self.max_total:
            self.max_total = total
        if self.on_event is not None:
            self.on_event(
                self.steps, REACTIONS[index], Config(self.x0, self.x1),
                _event_class(index, d_gap, good, bad_nc, bad_c),
            )
        return True

    def stats(self, init: Config, outcome: Outcome, elapsed: Optional[float] = None) -> TrajectoryStats:
        return TrajectoryStats(
            initial=init,
            final=Config(self.x0, self.x1),
            outcome=outcome,
            steps=self.steps,
            individual_events=self.individual,
            competitive_events=self.competitive,
            bad_noncompetitive_events=self.bad_nc,
            noise=self.noise_ind + self.noise_comp,
            noise_individual=self.noise_ind,
            noise_competitive=self.noise_comp,
            noise_interspecific=self.noise_inter,
            hit_tie=self.hit_tie,
            max_total=self.max_total,
            elapsed_time=elapsed,
        )


def _require_majority_first(init: Config):
    check_counts(init)
    if init.x0 < init.x1:
        raise InvalidInput(f"Species 0 must be the initial majority, got {init}")


def run_to_consensus(
    spec: ModelSpec,
    init: Config,
    rng,
    max_steps: Optional[int] = None,
    on_event: Optional[EventCallback] = None,
) -> TrajectoryStats:
    """
    Run the jump chain from `init` until one species is gone.

    A run that hits `max_steps` first, or gets stuck in a state where no
    reaction can fire, is reported with the Censored outcome.
    """
    _require_majority_first(init)
    if max_steps is None:
        max_steps = default_max_steps(init.n)
    uniforms = _uniforms(rng)
    walker = _Walker(spec, init, on_event)

    outcome = _outcome(walker.x0, walker.x1)
    while outcome is None:
        if walker.steps >= max_steps or not walker.advance(uniforms.next()):
            outcome = Outcome.CENSORED
            break
        outcome = _outcome(walker.x0, walker.x1)

    stats = walker.stats(init, outcome)
    check_trajectory(spec, stats)
    return stats


def gillespie_run(
    spec: ModelSpec,
    init: Config,
    rng,
    max_events: Optional[int] = None,
    clock_rng: Optional[np.random.Generator] = None,
) -> GillespieResult:
    """
    Continuous-time run that keeps going after consensus until both
    species are extinct, recording the extinction time of each species.

    The returned stats describe the trajectory up to consensus, with
    elapsed_time set to the consensus time.
    """
    _require_majority_first(init)
    if max_events is None:
        max_events = default_max_steps(init.n)
    if clock_rng is None:
        base = rng.rng if isinstance(rng, UniformStream) else rng
        clock_rng = base.spawn(1)[0]
    uniforms = _uniforms(rng)
    walker = _Walker(spec, init, None)

    now = 0.0
    extinction = [0.0 if init.x0 == 0 else None, 0.0 if init.x1 == 0 else None]
    stats = None
    outcome = _outcome(walker.x0, walker.x1)
    if outcome is not None:
        stats = walker.stats(init, outcome, elapsed=0.0)

    events = 0
    while walker.x0 > 0 or walker.x1 > 0:
        if events >= max_events:
            break
        phi = sum(rate_vector(spec, walker.x0, walker.x1))
        if phi <= 0:
            break
        now += clock_rng.exponential(1.0 / phi)
        walker.advance(uniforms.next())
        events += 1
        if extinction[0] is None and walker.x0 == 0:
            extinction[0] = now
        if extinction[1] is None and walker.x1 == 0:
            extinction[1] = now
        if stats is None:
            outcome = _outcome(walker.x0, walker.x1)
            if outcome is not None:
                stats = walker.stats(init, outcome, elapsed=now)

    censored = extinction[0] is None or extinction[1] is None
    if stats is None:
        stats = walker.stats(init, Outcome.CENSORED, elapsed=now)
    check_trajectory(spec, stats)
    return GillespieResult(
        stats=stats,
        extinction_times=(extinction[0], extinction[1]),
        events=events,
        final_time=now,
        censored=censored,
    )
