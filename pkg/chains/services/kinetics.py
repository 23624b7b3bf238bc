# chains/services/kinetics.py
"""
Reaction kinetics of the two-species Lotka-Volterra chain.

Rates are always handled as an 8-vector in REACTIONS order:
birth0, birth1, death0, death1, inter0, inter1, intra0, intra1.
"""

import logging
import math
from typing import List, Optional, Tuple

from chains.domain import (
    MAX_COUNT, REACTIONS, CompetitionMode, Config, ConsensusState, EventClass,
    EventFamily, EventTag, ModelSpec, ReactionKind,
)
from chains.exceptions import (
    CountOverflow, InfeasibleReaction, InvalidInput, NegativeRate, NonFiniteRate, ZeroPropensity,
)

logger = logging.getLogger(__name__)

# (dx0, dx1) per reaction index, per competition mode
SD_EFFECTS = (
    (1, 0), (0, 1), (-1, 0), (0, -1),
    (-1, -1), (-1, -1), (-2, 0), (0, -2),
)
NSD_EFFECTS = (
    (1, 0), (0, 1), (-1, 0), (0, -1),
    (0, -1), (-1, 0), (-1, 0), (0, -1),
)

REACTION_INDEX = {kind: index for index, kind in enumerate(REACTIONS)}


def effects_for(spec: ModelSpec):
    return SD_EFFECTS if spec.self_destructive else NSD_EFFECTS


def validate_spec(spec: ModelSpec) -> dict:
    """
    Reject negative or non-finite rates and return the derived quantities
    (alpha, gamma, theta, alpha_min, neutral).
    """
    for name, value in spec.rates().items():
        if not math.isfinite(value):
            raise NonFiniteRate(f"{name} must be finite, got {value}")
        if value < 0:
            raise NegativeRate(f"{name} must be >= 0, got {value}")
    if not isinstance(spec.mode, CompetitionMode):
        raise InvalidInput(f"Unknown competition mode: {spec.mode}")
    return spec.derived()


def check_counts(c: Config):
    if c.x0 < 0 or c.x1 < 0:
        raise InfeasibleReaction(f"Negative count in {c}")
    if c.x0 > MAX_COUNT or c.x1 > MAX_COUNT:
        raise CountOverflow(f"Count in {c} exceeds {MAX_COUNT}")


def rate_vector(spec: ModelSpec, x0: int, x1: int) -> List[float]:
    """Propensities of all eight reactions at (x0, x1), zeros included."""
    pair = x0 * x1
    return [
        spec.beta * x0,
        spec.beta * x1,
        spec.delta * x0,
        spec.delta * x1,
        spec.alpha0 * pair,
        spec.alpha1 * pair,
        spec.gamma0 * (x0 * (x0 - 1) // 2),
        spec.gamma1 * (x1 * (x1 - 1) // 2),
    ]


def propensities(spec: ModelSpec, c: Config) -> List[Tuple[ReactionKind, float]]:
    check_counts(c)
    return [
        (kind, rate)
        for kind, rate in zip(REACTIONS, rate_vector(spec, c.x0, c.x1))
        if rate > 0
    ]


def total_propensity(spec: ModelSpec, c: Config) -> float:
    """phi(x0, x1) in closed form."""
    check_counts(c)
    x0, x1 = c.x0, c.x1
    return (
        spec.alpha * x0 * x1
        + spec.theta * (x0 + x1)
        + spec.gamma0 * (x0 * (x0 - 1) // 2)
        + spec.gamma1 * (x1 * (x1 - 1) // 2)
    )


def apply_reaction(spec: ModelSpec, c: Config, k: ReactionKind) -> Config:
    check_counts(c)
    index = REACTION_INDEX[k]
    if rate_vector(spec, c.x0, c.x1)[index] <= 0:
        raise InfeasibleReaction(f"{k} has zero propensity in {c}")
    dx0, dx1 = effects_for(spec)[index]
    y0, y1 = c.x0 + dx0, c.x1 + dx1
    if y0 < 0 or y1 < 0:
        raise InfeasibleReaction(f"{k} would make a count negative in {c}")
    if y0 > MAX_COUNT or y1 > MAX_COUNT:
        raise CountOverflow(f"{k} in {c} exceeds {MAX_COUNT}")
    return Config(y0, y1)


def consensus_state(c: Config) -> ConsensusState:
    if c.x0 > 0 and c.x1 > 0:
        return ConsensusState.NOT_REACHED
    if c.x0 > 0:
        return ConsensusState.WINNER_0
    if c.x1 > 0:
        return ConsensusState.WINNER_1
    return ConsensusState.BOTH_EXTINCT


def min_species(x0: int, x1: int) -> int:
    """Index of the current minimum; species 1 at a tie."""
    return 0 if x0 < x1 else 1


def classify_step(x0: int, x1: int, index: int, effects) -> Tuple[int, bool, bool, bool]:
    """
    Classify reaction `index` fired at (x0, x1) without building objects.

    Returns (d_gap, good, bad_noncompetitive, bad_competitive).
    """
    dx0, dx1 = effects[index]
    if x0 < x1:
        low, high, d_low, d_high = x0, x1, dx0, dx1
    else:
        low, high, d_low, d_high = x1, x0, dx1, dx0
    good = d_low < 0
    gap_shrinks = low > 0 and (d_high - d_low) < 0
    individual = index < 4
    return dx1 - dx0, good, gap_shrinks and individual, gap_shrinks and not individual


def classify(spec: ModelSpec, c_before: Config, k: ReactionKind) -> EventClass:
    apply_reaction(spec, c_before, k)
    index = REACTION_INDEX[k]
    d_gap, good, bad_nc, bad_c = classify_step(c_before.x0, c_before.x1, index, effects_for(spec))
    tags = set()
    if good:
        tags.add(EventTag.GOOD)
    if bad_nc:
        tags.add(EventTag.BAD_NONCOMPETITIVE)
    if bad_c:
        tags.add(EventTag.BAD_COMPETITIVE)
    if not tags:
        tags.add(EventTag.NEUTRAL)
    family = EventFamily.INDIVIDUAL if k.is_individual else EventFamily.COMPETITIVE
    return EventClass(family=family, d_gap_initial=d_gap, tags=frozenset(tags))


def class_masses(spec: ModelSpec, c: Config) -> dict:
    """
    Propensity mass of every event class at c, plus phi.

    Keys: phi, good, good_competitive, bad_noncomp, bad_comp, other.
    `other` is everything that is neither good nor bad non-competitive.
    """
    check_counts(c)
    rates = rate_vector(spec, c.x0, c.x1)
    effects = effects_for(spec)
    masses = {'phi': 0.0, 'good': 0.0, 'good_competitive': 0.0,
              'bad_noncomp': 0.0, 'bad_comp': 0.0, 'other': 0.0}
    for index, rate in enumerate(rates):
        if rate <= 0:
            continue
        masses['phi'] += rate
        _, good, bad_nc, bad_c = classify_step(c.x0, c.x1, index, effects)
        if good:
            masses['good'] += rate
            if index >= 4:
                masses['good_competitive'] += rate
        elif bad_nc:
            masses['bad_noncomp'] += rate
        else:
            masses['other'] += rate
        if bad_c:
            masses['bad_comp'] += rate
    return masses


def _ratio(spec: ModelSpec, c: Config, key: str) -> float:
    masses = class_masses(spec, c)
    if masses['phi'] <= 0:
        raise ZeroPropensity(f"phi is 0 at {c}")
    return masses[key] / masses['phi']


def prob_bad_noncomp(spec: ModelSpec, c: Config) -> float:
    """P(a, b): probability that the next event is a bad non-competitive event."""
    return _ratio(spec, c, 'bad_noncomp')


def prob_good(spec: ModelSpec, c: Config) -> float:
    """Q(a, b): probability that the next event decreases the current minimum."""
    return _ratio(spec, c, 'good')


def prob_good_competitive(spec: ModelSpec, c: Config) -> float:
    return _ratio(spec, c, 'good_competitive')


def prob_bad_competitive(spec: ModelSpec, c: Config) -> float:
    return _ratio(spec, c, 'bad_comp')


def prob_other(spec: ModelSpec, c: Config) -> float:
    return _ratio(spec, c, 'other')


def harmonic_family(spec: ModelSpec) -> Optional[str]:
    """
    Name the family in which a/(a+b) solves the first-step recurrence,
    or None. Births and deaths never break harmonicity.
    """
    if spec.gamma0 != spec.gamma1 or spec.gamma0 <= 0:
        return None
    if spec.self_destructive:
        return 'sd_alpha_equals_gamma' if math.isclose(spec.alpha, spec.gamma0) else None
    if spec.alpha0 == spec.alpha1 and math.isclose(spec.gamma, 2 * spec.alpha):
        return 'nsd_gamma_equals_two_alpha'
    return None
