# experiments/domain.py

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from chains.domain import Config, ModelSpec
from chains.exceptions import InvalidPlan, ZeroTrials

MEASURES = ('T', 'I', 'K', 'J', 'F', 'max_total')


@dataclass
class Estimate:
    """Monte Carlo estimate of rho for one (spec, init) cell."""

    trials: int
    wins: int
    minority_wins: int
    both_extinct: int
    censored: int
    confidence: float
    rho_hat: float
    ci_low: float
    ci_high: float
    means: dict = field(default_factory=dict)
    std_errors: dict = field(default_factory=dict)
    hit_tie: int = 0
    tie_failures: int = 0

    @property
    def effective_trials(self) -> int:
        return self.trials - self.censored

    @property
    def hit_tie_freq(self) -> float:
        done = self.effective_trials
        return self.hit_tie / done if done else 0.0

    @property
    def split_rho(self) -> float:
        """rho_hat with every BothExtinct outcome scored 1/2."""
        done = self.effective_trials
        return (self.wins + 0.5 * self.both_extinct) / done if done else 0.0

    @property
    def split_rho_se(self) -> float:
        done = self.effective_trials
        if done < 2:
            return 0.0
        second_moment = (self.wins + 0.25 * self.both_extinct) / done
        variance = max(second_moment - self.split_rho ** 2, 0.0) * done / (done - 1)
        return math.sqrt(variance / done)

    def tie_gap(self) -> Tuple[float, float]:
        """
        Mean and standard error of fail - hit_tie / 2 per trial, where fail
        is any outcome other than MajorityWon.
        """
        done = self.effective_trials
        if done == 0:
            return 0.0, 0.0
        fails = done - self.wins
        mean = fails / done - 0.5 * self.hit_tie / done
        # fail^2 = fail, tie^2 = tie
        second_moment = (fails - self.tie_failures + 0.25 * self.hit_tie) / done
        if done < 2:
            return mean, 0.0
        variance = max(second_moment - mean * mean, 0.0) * done / (done - 1)
        return mean, math.sqrt(variance / done)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['effective_trials'] = self.effective_trials
        data['hit_tie_freq'] = self.hit_tie_freq
        return data


class GapRuleKind(str, Enum):
    FIXED = 'fixed'
    LOG_SQUARED = 'log_squared'
    SQRT_N_LOG_N = 'sqrt_n_log_n'
    SQRT_N = 'sqrt_n'
    SQRT_LOG_N = 'sqrt_log_n'


@dataclass(frozen=True)
class GapRule:
    kind: GapRuleKind
    c: float = 1.0

    @classmethod
    def parse(cls, text: str) -> 'GapRule':
        """`kind:c`, e.g. `log_squared:1.5` or `fixed:196`; c defaults to 1."""
        name, _, value = text.partition(':')
        try:
            kind = GapRuleKind(name.strip().lower())
            c = float(value) if value else 1.0
        except ValueError:
            raise InvalidPlan(f"Invalid gap rule: {text}")
        if not math.isfinite(c) or c <= 0:
            raise InvalidPlan(f"Gap rule constant must be positive, got {value}")
        return cls(kind, c)

    def raw(self, n: int) -> float:
        if self.kind == GapRuleKind.FIXED:
            return self.c
        if self.kind == GapRuleKind.LOG_SQUARED:
            return self.c * math.log2(n) ** 2
        if self.kind == GapRuleKind.SQRT_N_LOG_N:
            return self.c * math.sqrt(n * math.log(n))
        if self.kind == GapRuleKind.SQRT_N:
            return self.c * math.sqrt(n)
        return self.c * math.sqrt(math.log(n))

    def delta0(self, n: int) -> int:
        """Ceiling of the rule value, clipped to [1, n - 1]."""
        return min(max(math.ceil(self.raw(n)), 1), n - 1)

    def __str__(self):
        return f"{self.kind.value}:{self.c:g}"


def initial_config(n: int, delta0: int) -> Config:
    """x0 = ceil((n + delta0) / 2), x1 = n - x0."""
    if n < 1 or not 0 <= delta0 <= n:
        raise InvalidPlan(f"Need 0 <= delta0 <= n, got n={n}, delta0={delta0}")
    x0 = (n + delta0 + 1) // 2
    return Config(x0, n - x0)


@dataclass
class SweepPlan:
    spec: ModelSpec
    ns: List[int]
    gap_rule: GapRule
    trials: int
    seed: int
    confidence: float = 0.99
    threads: int = 1
    max_steps: Optional[int] = None

    def validate(self):
        if not self.ns:
            raise InvalidPlan('A sweep needs at least one n')
        if any(n < 2 for n in self.ns):
            raise InvalidPlan('Every n must be >= 2')
        if self.trials < 1:
            raise ZeroTrials('trials must be >= 1')
        if not 0 < self.confidence < 1:
            raise InvalidPlan(f"Confidence must lie in (0, 1), got {self.confidence}")

    def cells(self) -> List[Tuple[int, int, Config]]:
        self.validate()
        rows = []
        for n in self.ns:
            delta0 = self.gap_rule.delta0(n)
            rows.append((n, delta0, initial_config(n, delta0)))
        return rows


@dataclass
class SweepRow:
    n: int
    delta0: int
    init: Config
    estimate: Optional[Estimate] = None
    error: Optional[str] = None


@dataclass
class Probe:
    delta0: int
    init: Config
    estimate: Estimate
    passed: bool


@dataclass
class ThresholdResult:
    n: int
    target: float
    delta_star: int
    probes: List[Probe] = field(default_factory=list)
    monotonicity_violations: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'target': self.target,
            'delta_star': self.delta_star,
            'probes': [
                {
                    'delta0': probe.delta0,
                    'init': str(probe.init),
                    'rho_hat': probe.estimate.rho_hat,
                    'ci_low': probe.estimate.ci_low,
                    'ci_high': probe.estimate.ci_high,
                    'passed': probe.passed,
                }
                for probe in self.probes
            ],
            'monotonicity_violations': [list(pair) for pair in self.monotonicity_violations],
        }


@dataclass
class OdeTrajectory:
    times: list
    x0: list
    x1: list
    dt: float
    halvings: int
    converged: bool
    blew_up: bool = False

    def rows(self):
        return zip(self.times, self.x0, self.x1)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
