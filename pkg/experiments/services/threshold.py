# experiments/services/threshold.py
"""
Bisection search for the smallest initial gap whose rho interval clears a
target, with monotonicity probes.
"""

import logging
from typing import Dict, Optional

from chains.domain import ModelSpec
from chains.exceptions import InvalidInput, NotBracketed
from experiments.domain import Probe, ThresholdResult, initial_config

from .estimation import estimate_rho

logger = logging.getLogger(__name__)


def find_threshold(
    spec: ModelSpec,
    n: int,
    target: float,
    seed: int,
    trials_per_probe: int,
    threads: int = 1,
    confidence: float = 0.99,
    max_steps: Optional[int] = None,
) -> ThresholdResult:
    """
    Smallest probed delta0 in [1, n - 1] whose lower confidence bound on rho
    reaches `target`.

    The probe at delta0 uses cell index delta0, so a probe's estimate does
    not depend on the order of the search. Probes at n - 1, at 1 and at the
    three interior quartiles come first; any passing probe below a failing
    one is logged as a monotonicity violation and the bisection runs between
    the smallest pass and the largest fail below it.

    Raises:
        InvalidInput: If target is not in (0.5, 1) or n < 2
        NotBracketed: If even delta0 = n - 1 misses the target
    """
    if not 0.5 < target < 1:
        raise InvalidInput(f"target must lie in (0.5, 1), got {target}")
    if n < 2:
        raise InvalidInput(f"n must be >= 2, got {n}")

    probes: Dict[int, Probe] = {}

    def probe(delta0: int) -> bool:
        if delta0 not in probes:
            init = initial_config(n, delta0)
            estimate = estimate_rho(
                spec, init, trials_per_probe, seed, cell=delta0, threads=threads,
                confidence=confidence, max_steps=max_steps,
            )
            passed = estimate.ci_low >= target
            probes[delta0] = Probe(delta0=delta0, init=init, estimate=estimate, passed=passed)
            logger.info(
                f"Threshold probe n={n}, delta0={delta0}: ci_low={estimate.ci_low:.6f} "
                f"{'passes' if passed else 'misses'} {target}"
            )
        return probes[delta0].passed

    if not probe(n - 1):
        raise NotBracketed(f"delta0 = n - 1 = {n - 1} does not reach target {target}")

    result = ThresholdResult(n=n, target=target, delta_star=n - 1)
    if probe(1):
        result.delta_star = 1
    else:
        for k in (1, 2, 3):
            delta0 = 1 + (n - 2) * k // 4
            if 1 < delta0 < n - 1:
                probe(delta0)
        passing = [d for d, p in probes.items() if p.passed]
        hi = min(passing)
        lo = max(d for d, p in probes.items() if not p.passed and d < hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if probe(mid):
                hi = mid
            else:
                lo = mid
        result.delta_star = hi

    ordered = sorted(probes.values(), key=lambda p: p.delta0)
    result.probes = ordered
    for i, low in enumerate(ordered):
        for high in ordered[i + 1:]:
            if low.passed and not high.passed:
                result.monotonicity_violations.append((low.delta0, high.delta0))
    if result.monotonicity_violations:
        logger.warning(
            f"rho is not monotone in delta0 across probes at n={n}: "
            f"{result.monotonicity_violations}"
        )
    return result
