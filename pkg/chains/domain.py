# chains/domain.py
"""
Value types shared by every chain service.

Species 0 is always the initial majority; callers swap labels before
handing a configuration to a runner.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

MAX_COUNT = 2 ** 62


class CompetitionMode(str, Enum):
    SELF_DESTRUCTIVE = 'sd'
    NON_SELF_DESTRUCTIVE = 'nsd'


MODE_CHOICES = [
    (CompetitionMode.SELF_DESTRUCTIVE.value, 'Self-destructive'),
    (CompetitionMode.NON_SELF_DESTRUCTIVE.value, 'Non-self-destructive'),
]


@dataclass(frozen=True)
class ModelSpec:
    """
    The six rate constants and the competition mode of a two-species chain.
    """
    alpha0: float = 0.0
    alpha1: float = 0.0
    beta: float = 0.0
    delta: float = 0.0
    gamma0: float = 0.0
    gamma1: float = 0.0
    mode: CompetitionMode = CompetitionMode.SELF_DESTRUCTIVE

    RATE_FIELDS = ('alpha0', 'alpha1', 'beta', 'delta', 'gamma0', 'gamma1')

    @property
    def alpha(self) -> float:
        return self.alpha0 + self.alpha1

    @property
    def gamma(self) -> float:
        return self.gamma0 + self.gamma1

    @property
    def theta(self) -> float:
        return self.beta + self.delta

    @property
    def alpha_min(self) -> float:
        return min(self.alpha0, self.alpha1)

    @property
    def neutral(self) -> bool:
        return self.alpha0 == self.alpha1 and self.gamma0 == self.gamma1

    @property
    def self_destructive(self) -> bool:
        return self.mode == CompetitionMode.SELF_DESTRUCTIVE

    def rates(self) -> dict:
        return {name: getattr(self, name) for name in self.RATE_FIELDS}

    def to_mapping(self) -> dict:
        mapping = self.rates()
        mapping['mode'] = self.mode.value
        return mapping

    def derived(self) -> dict:
        return {
            'alpha': self.alpha,
            'gamma': self.gamma,
            'theta': self.theta,
            'alpha_min': self.alpha_min,
            'neutral': self.neutral,
        }


@dataclass(frozen=True)
class Config:
    x0: int
    x1: int

    @property
    def n(self) -> int:
        return self.x0 + self.x1

    @property
    def gap(self) -> int:
        return self.x0 - self.x1

    @property
    def min_count(self) -> int:
        return min(self.x0, self.x1)

    @property
    def max_count(self) -> int:
        return max(self.x0, self.x1)

    def swapped(self) -> 'Config':
        return Config(self.x1, self.x0)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.x0, self.x1)

    def __str__(self):
        return f"({self.x0},{self.x1})"


class ReactionType(str, Enum):
    BIRTH = 'birth'
    DEATH = 'death'
    INTER = 'inter'
    INTRA = 'intra'


@dataclass(frozen=True)
class ReactionKind:
    """
    One reaction of the system. INTER(i) is the reaction with rate alpha_i;
    INTER(0) and INTER(1) stay distinct even when their effects coincide.
    """
    type: ReactionType
    species: int

    @property
    def label(self) -> str:
        return f"{self.type.value}{self.species}"

    @property
    def is_individual(self) -> bool:
        return self.type in (ReactionType.BIRTH, ReactionType.DEATH)

    @classmethod
    def from_label(cls, label: str) -> 'ReactionKind':
        kind = LABEL_TO_REACTION.get(label)
        if kind is None:
            raise ValueError(f"Unknown reaction label: {label}")
        return kind

    def __str__(self):
        return self.label


BIRTH0 = ReactionKind(ReactionType.BIRTH, 0)
BIRTH1 = ReactionKind(ReactionType.BIRTH, 1)
DEATH0 = ReactionKind(ReactionType.DEATH, 0)
DEATH1 = ReactionKind(ReactionType.DEATH, 1)
INTER0 = ReactionKind(ReactionType.INTER, 0)
INTER1 = ReactionKind(ReactionType.INTER, 1)
INTRA0 = ReactionKind(ReactionType.INTRA, 0)
INTRA1 = ReactionKind(ReactionType.INTRA, 1)

# Fixed order used by every rate vector in the package.
REACTIONS = (BIRTH0, BIRTH1, DEATH0, DEATH1, INTER0, INTER1, INTRA0, INTRA1)
LABEL_TO_REACTION = {kind.label: kind for kind in REACTIONS}


class EventFamily(str, Enum):
    INDIVIDUAL = 'individual'
    COMPETITIVE = 'competitive'


class EventTag(str, Enum):
    GOOD = 'good'
    BAD_NONCOMPETITIVE = 'bad_noncomp'
    BAD_COMPETITIVE = 'bad_comp'
    NEUTRAL = 'neutral'


@dataclass(frozen=True)
class EventClass:
    family: EventFamily
    d_gap_initial: int
    tags: frozenset

    @property
    def is_good(self) -> bool:
        return EventTag.GOOD in self.tags

    @property
    def is_bad_noncompetitive(self) -> bool:
        return EventTag.BAD_NONCOMPETITIVE in self.tags

    @property
    def is_bad_competitive(self) -> bool:
        return EventTag.BAD_COMPETITIVE in self.tags

    def tag_string(self) -> str:
        return ','.join(sorted(tag.value for tag in self.tags))


class ConsensusState(str, Enum):
    NOT_REACHED = 'not_reached'
    WINNER_0 = 'winner0'
    WINNER_1 = 'winner1'
    BOTH_EXTINCT = 'both_extinct'


class Outcome(str, Enum):
    MAJORITY_WON = 'majority_won'
    MINORITY_WON = 'minority_won'
    BOTH_EXTINCT = 'both_extinct'
    CENSORED = 'censored'


@dataclass
class TrajectoryStats:
    """
    Per-run accounting of one jump-chain trajectory.

    steps is T, individual_events I, competitive_events K,
    bad_noncompetitive_events J, noise F = noise_individual + noise_competitive.
    noise_interspecific is the part of noise_competitive from Inter reactions.
    """
    initial: Config
    final: Config
    outcome: Outcome
    steps: int = 0
    individual_events: int = 0
    competitive_events: int = 0
    bad_noncompetitive_events: int = 0
    noise: int = 0
    noise_individual: int = 0
    noise_competitive: int = 0
    noise_interspecific: int = 0
    hit_tie: bool = False
    max_total: int = 0
    elapsed_time: Optional[float] = None

    @property
    def censored(self) -> bool:
        return self.outcome == Outcome.CENSORED

    @property
    def majority_won(self) -> bool:
        return self.outcome == Outcome.MAJORITY_WON


@dataclass
class GillespieResult:
    stats: TrajectoryStats
    extinction_times: Tuple[Optional[float], Optional[float]]
    events: int
    final_time: float
    censored: bool

    @property
    def minority_outlived_majority(self) -> bool:
        t0, t1 = self.extinction_times
        return t0 is not None and (t1 is None or t0 < t1)


@dataclass
class NiceChainSpec:
    """
    Birth probability p and death probability q of a single-species chain,
    either in the canonical dominating form (theta, alpha, alpha_min) or as
    explicit tables indexed by state. Beyond a table, p = C/m and q = D.
    """
    theta: Optional[float] = None
    alpha: Optional[float] = None
    alpha_min: Optional[float] = None
    p_table: Optional[Tuple[float, ...]] = None
    q_table: Optional[Tuple[float, ...]] = None
    C: float = 0.0
    D: float = 0.0
    degenerate: bool = False

    @property
    def canonical(self) -> bool:
        return self.p_table is None

    def p(self, m: int) -> float:
        if m <= 0:
            return 0.0
        if self.canonical:
            return self.theta / (self.alpha * m + self.theta) if self.theta > 0 else 0.0
        if m < len(self.p_table):
            return self.p_table[m]
        return min(self.C / m, 1.0 - self.D)

    def q(self, m: int) -> float:
        if m <= 0:
            return 0.0
        if self.canonical:
            return self.alpha_min / (self.alpha + 2 * self.theta)
        if m < len(self.q_table):
            return self.q_table[m]
        return self.D

    def holding(self, m: int) -> float:
        return 1.0 - self.p(m) - self.q(m)


@dataclass
class NiceChainRun:
    extinction_time: int
    births: int
    max_state: int
    censored: bool = False


@dataclass
class CouplingReport:
    initial: Config
    steps: int = 0
    violations_min: int = 0
    violations_j: int = 0
    tau: List[int] = field(default_factory=list)
    tau_states: List[Tuple[int, int]] = field(default_factory=list)
    final_j: int = 0
    final_b: int = 0
    s_updates: int = 0
    s_consensus_step: Optional[int] = None
    n_extinction_step: Optional[int] = None
    final_s: Optional[Config] = None
    final_n: int = 0
    censored: bool = False

    @property
    def clean(self) -> bool:
        return self.violations_min == 0 and self.violations_j == 0


@dataclass
class ExactGrid:
    xmax: int
    rho: np.ndarray
    residual: float
    boundary_policy: str = 'births_suppressed'
    both_extinct_value: float = 0.0
    mean_t: Optional[np.ndarray] = None
    mean_t_residual: Optional[float] = None
    truncation_gap: float = 0.0
    method: str = 'direct'
    sweeps: int = 0

    def rho_at(self, a: int, b: int) -> float:
        return float(self.rho[a, b])
