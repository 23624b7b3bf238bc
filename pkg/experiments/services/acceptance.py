# experiments/services/acceptance.py
"""
Acceptance criteria 1-12, each an executable check returning a
CriterionResult. `quick` scales every Monte Carlo criterion down to a smoke
run; the exact and exhaustive criteria stay at full size where cheap.
"""

import logging
import math
import time
from typing import Dict, Iterable, List, Optional

from scipy import stats

from chains.domain import CompetitionMode, Config, ModelSpec
from chains.services.birthdeath import dominating_chain, nice_chain_statistics
from chains.services.coupling import check_domination_premises, coupling_statistics, domination_statistics
from chains.services.exact import exact_rho
from chains.services.simulation import gillespie_run
from chains.utils import run_parallel, trial_rng
from experiments.domain import CriterionResult, GapRule, GapRuleKind, SweepPlan, initial_config

from .estimation import estimate_rho, wilson_interval
from .sweep import sweep

logger = logging.getLogger(__name__)

SD = CompetitionMode.SELF_DESTRUCTIVE
NSD = CompetitionMode.NON_SELF_DESTRUCTIVE

# gamma_i equals the total interspecific rate alpha0 + alpha1
SD_HARMONIC = ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=1, gamma1=1)
NSD_HARMONIC = ModelSpec(alpha0=0.25, alpha1=0.25, gamma0=0.5, gamma1=0.5, mode=NSD)
NEUTRAL = ModelSpec(alpha0=0.5, alpha1=0.5, beta=1, delta=1)
INTRA_ONLY = ModelSpec(beta=1, delta=1, gamma0=1, gamma1=1)
# canonical chain with moderate constants: p(1) = 0.2 < q = 1/3. Coupled runs with it finish;
# NEUTRAL's chain (p(m) = 2/(m + 2), q = 0.1) drifts up below m = 18 and needs ~10^7 steps to die out.
NICE_SPEC = ModelSpec(alpha0=1, alpha1=1, beta=0.25, delta=0.25)

TITLES = {
    1: 'Exact a/(a+b), SD with gamma = alpha0 + alpha1',
    2: 'Exact a/(a+b), NSD with gamma = 2 alpha',
    3: 'Monte Carlo agrees with the exact oracle at (6,4)',
    4: 'Domination premises on the 200 x 200 grid',
    5: 'Coupled runs never break domination',
    6: 'Consensus time grows linearly',
    7: 'Bad non-competitive events grow logarithmically',
    8: 'SD/NSD separation at equal gap',
    9: 'Tie-failure inequality',
    10: 'Intraspecific-only competition fails with constant probability',
    11: 'Nice-chain extinction time and births',
    12: 'Individual events grow at least logarithmically',
}
CRITERIA = tuple(TITLES)


def coupling_verdict(summary: dict) -> bool:
    """
    Coupled runs pass only when none broke domination and none was censored;
    a censored run leaves the rest of its path unchecked.
    """
    if summary['dirty_runs'] or summary['censored'] or not summary['runs']:
        return False
    domination = summary.get('domination')
    if domination is None:
        return True
    return all(
        domination[name] is not None and domination[name]['consistent'] for name in ('T_vs_E', 'J_vs_B')
    )


def _survival_tally(spec, m, seed, cell, max_events, start, stop):
    tally = {'runs': 0, 'censored': 0, 'outlived': 0}
    for trial in range(start, stop):
        result = gillespie_run(spec, Config(2 * m, m), trial_rng(seed, cell, trial), max_events=max_events)
        tally['runs'] += 1
        if result.censored:
            tally['censored'] += 1
        elif result.minority_outlived_majority:
            tally['outlived'] += 1
    return tally


class AcceptanceSuite:
    """Runs the numbered acceptance criteria with a shared seed and thread count."""

    def __init__(self, seed: int = 0, threads: int = 1, quick: bool = False,
                 confidence: float = 0.99, tolerance: float = 1e-10):
        self.seed = seed
        self.threads = threads
        self.quick = quick
        self.confidence = confidence
        self.tolerance = tolerance
        self._growth_rows = None

    def scale(self, full, quick):
        return quick if self.quick else full

    def run(self, numbers: Optional[Iterable[int]] = None) -> List[CriterionResult]:
        results = []
        for number in numbers or CRITERIA:
            check = getattr(self, f'criterion_{number}')
            started = time.perf_counter()
            passed, details = check()
            result = CriterionResult(
                number=number, title=TITLES[number], passed=bool(passed), details=details,
                elapsed=time.perf_counter() - started,
            )
            logger.info(
                f"Criterion {number} ({result.title}): {'PASS' if result.passed else 'FAIL'} "
                f"in {result.elapsed:.1f}s"
            )
            results.append(result)
        return results

    # Exact oracle

    def _ratio_error(self, spec, both_extinct_value):
        grid = exact_rho(spec, 32, tol=self.tolerance, both_extinct_value=both_extinct_value)
        worst = max(
            abs(grid.rho_at(a, b) - a / (a + b)) for a in range(1, 13) for b in range(1, a + 1)
        )
        return worst, grid

    def criterion_1(self):
        worst, grid = self._ratio_error(SD_HARMONIC, both_extinct_value=0.5)
        literal = exact_rho(
            ModelSpec(alpha0=0.5, alpha1=0.5, gamma0=0.5, gamma1=0.5), 8,
            tol=self.tolerance, with_truncation_gap=False,
        )
        return worst <= 1e-9, {
            'max_error': worst,
            'residual': grid.residual,
            'both_extinct_value': 0.5,
            'equal_rates_rho_2_1': literal.rho_at(2, 1),
        }

    def criterion_2(self):
        worst, grid = self._ratio_error(NSD_HARMONIC, both_extinct_value=0.0)
        return worst <= 1e-9, {'max_error': worst, 'residual': grid.residual}

    def criterion_3(self):
        trials = self.scale(10 ** 5, 10 ** 4)
        init = Config(6, 4)
        estimate = estimate_rho(
            SD_HARMONIC, init, trials, self.seed, cell=3, threads=self.threads, confidence=self.confidence,
        )
        oracle = exact_rho(SD_HARMONIC, 32, tol=self.tolerance).rho_at(6, 4)
        z = float(stats.norm.ppf((1 + self.confidence) / 2))
        split_ok = abs(estimate.split_rho - 0.6) <= z * estimate.split_rho_se
        oracle_ok = estimate.ci_low <= oracle <= estimate.ci_high
        return split_ok and oracle_ok, {
            'trials': trials,
            'rho_hat': estimate.rho_hat,
            'ci': [estimate.ci_low, estimate.ci_high],
            'oracle_rho': oracle,
            'split_rho': estimate.split_rho,
            'split_rho_se': estimate.split_rho_se,
            'both_extinct': estimate.both_extinct,
        }

    # Domination and coupling

    def criterion_4(self):
        size = self.scale(200, 60)
        counts = {}
        for mode in (SD, NSD):
            spec = ModelSpec(**{**NEUTRAL.rates(), 'mode': mode})
            counts[mode.value] = len(check_domination_premises(spec, size, size))
        return sum(counts.values()) == 0, {'grid': size, 'violations': counts}

    def criterion_5(self):
        n_half = self.scale(50, 20)
        runs = self.scale(10 ** 4, 50)
        init = Config(n_half, n_half)
        summary = coupling_statistics(NICE_SPEC, init, runs, self.seed, cell=5, threads=self.threads)
        summary['domination'] = domination_statistics(
            NICE_SPEC, init, self.scale(10 ** 4, 300), self.seed, cell=6, threads=self.threads,
        )
        return coupling_verdict(summary), summary

    # Growth laws of the jump chain

    def _growth(self):
        if self._growth_rows is None:
            ns = [2 ** k for k in self.scale(range(8, 15), range(8, 11))]
            plan = SweepPlan(
                spec=NEUTRAL, ns=ns, gap_rule=GapRule(GapRuleKind.LOG_SQUARED, 1.0),
                trials=self.scale(10 ** 4, 300), seed=self.seed, confidence=self.confidence,
                threads=self.threads,
            )
            self._growth_rows = sweep(plan)
        return self._growth_rows

    def criterion_6(self):
        rows = self._growth()
        failed = {row.n: row.error for row in rows if row.estimate is None}
        if failed:
            return False, {'errors': failed}
        per_n = {row.n: row.estimate.means['T'] / row.n for row in rows}
        means = [row.estimate.means['T'] for row in rows]
        ratios = [later / earlier for earlier, later in zip(means, means[1:])]
        passed = all(0.1 <= value <= 50 for value in per_n.values()) and all(1.6 <= r <= 2.4 for r in ratios)
        return passed, {'mean_T_over_n': per_n, 'doubling_ratios': ratios}

    def criterion_7(self):
        rows = self._growth()
        failed = {row.n: row.error for row in rows if row.estimate is None}
        if failed:
            return False, {'errors': failed}
        first = rows[0]
        c = first.estimate.means['J'] / math.log(first.n)
        bounds = {row.n: [row.estimate.means['J'], 3 * c * math.log(row.n)] for row in rows}
        passed = all(mean_j <= bound for mean_j, bound in bounds.values())
        return passed, {'c': c, 'mean_J_and_bound': bounds}

    def criterion_8(self):
        n = self.scale(2 ** 14, 2 ** 12)
        trials = self.scale(10 ** 4, 400)
        # the smoke run halves the log-squared gap so the NSD deficit shows at 2^12
        small = GapRule(GapRuleKind.LOG_SQUARED, self.scale(1.0, 0.5)).delta0(n)
        large = GapRule(GapRuleKind.SQRT_N_LOG_N, 1.0).delta0(n)
        nsd = ModelSpec(**{**NEUTRAL.rates(), 'mode': NSD})
        cells = {
            'sd_small_gap': (NEUTRAL, small, 80),
            'nsd_small_gap': (nsd, small, 81),
            'nsd_large_gap': (nsd, large, 82),
        }
        rho = {}
        for name, (spec, delta0, cell) in cells.items():
            rho[name] = estimate_rho(
                spec, initial_config(n, delta0), trials, self.seed, cell=cell,
                threads=self.threads, confidence=self.confidence,
            ).rho_hat
        passed = rho['sd_small_gap'] >= 0.99 and rho['nsd_small_gap'] <= 0.95 and rho['nsd_large_gap'] >= 0.99
        return passed, {'n': n, 'small_gap': small, 'large_gap': large, 'rho_hat': rho}

    def criterion_9(self):
        m = self.scale(2 ** 12, 2 ** 8)
        trials = self.scale(10 ** 4, 1000)
        init = Config(m + math.ceil(math.sqrt(math.log(m))), m)
        estimate = estimate_rho(
            NEUTRAL, init, trials, self.seed, cell=9, threads=self.threads, confidence=self.confidence,
        )
        mean, se = estimate.tie_gap()
        return mean >= -3 * se, {
            'init': str(init),
            'failure_rate': 1 - estimate.rho_hat,
            'hit_tie_freq': estimate.hit_tie_freq,
            'mean_gap': mean,
            'se': se,
        }

    # Intraspecific-only failure and nice chains

    def criterion_10(self):
        ms = self.scale((10 ** 2, 10 ** 3, 10 ** 4), (10, 30, 100))
        runs = self.scale(10 ** 4, 300)
        frequencies: Dict[int, float] = {}
        intervals = {}
        for cell, m in enumerate(ms):
            tally = run_parallel(_survival_tally, runs, self.threads, INTRA_ONLY, m, self.seed, 100 + cell, None)
            done = tally['runs'] - tally['censored']
            frequencies[m] = tally['outlived'] / done if done else 0.0
            intervals[m] = wilson_interval(tally['outlived'], done, self.confidence)
        values = list(frequencies.values())
        passed = all(value >= 0.01 for value in values) and values[-1] >= values[0] / 3
        return passed, {'frequency': frequencies, 'ci': intervals, 'runs': runs}

    def criterion_11(self):
        chain = dominating_chain(NICE_SPEC)
        ns = [2 ** k for k in self.scale(range(8, 15), range(8, 11))]
        trials = self.scale(10 ** 4, 400)
        rows = {
            n: nice_chain_statistics(chain, n, trials, self.seed, cell=n, threads=self.threads)
            for n in ns
        }
        c = rows[ns[0]]['mean_B'] / math.log(ns[0])
        e_over_n = {n: row['mean_E'] / n for n, row in rows.items()}
        b_bounds = {n: [row['mean_B'], 3 * c * math.log(n)] for n, row in rows.items()}
        passed = (
            all(0.1 <= value <= 50 for value in e_over_n.values())
            and all(mean_b <= bound for mean_b, bound in b_bounds.values())
        )
        return passed, {'spec': NICE_SPEC.to_mapping(), 'mean_E_over_n': e_over_n, 'mean_B_and_bound': b_bounds}

    def criterion_12(self):
        ms = [2 ** k for k in self.scale(range(4, 13), range(4, 9))]
        trials = self.scale(10 ** 3, 100)
        mean_i = {}
        for m in ms:
            estimate = estimate_rho(
                NEUTRAL, Config(2 * m, m), trials, self.seed, cell=120 + m.bit_length(),
                threads=self.threads, confidence=self.confidence,
            )
            mean_i[m] = estimate.means['I']
        c = mean_i[ms[0]] / math.log(ms[0])
        bounds = {m: [mean_i[m], c / 3 * math.log(m)] for m in ms}
        passed = c > 0 and all(mean >= bound for mean, bound in bounds.values())
        return passed, {'c': c, 'mean_I_and_lower_bound': bounds, 'trials': trials}
