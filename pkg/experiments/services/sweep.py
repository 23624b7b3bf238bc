# experiments/services/sweep.py

import csv
import logging
from typing import Iterable, List, TextIO

from chains.exceptions import ChainError
from experiments.domain import SweepPlan, SweepRow

from .estimation import estimate_rho

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    'n', 'delta0', 'trials', 'wins', 'both_extinct', 'censored', 'rho_hat', 'ci_low', 'ci_high',
    'mean_T', 'mean_I', 'mean_K', 'mean_J', 'mean_F', 'hit_tie_freq',
)


def sweep(plan: SweepPlan) -> List[SweepRow]:
    """
    One Estimate per n of the plan, with delta0 from the plan's gap rule.

    Cell i of the plan draws its trials from the streams of cell index i.
    A cell whose estimate fails keeps its error message and the sweep goes on.
    """
    rows = []
    for cell, (n, delta0, init) in enumerate(plan.cells()):
        logger.info(f"Sweep cell {cell}: n={n}, delta0={delta0}, init={init}")
        row = SweepRow(n=n, delta0=delta0, init=init)
        try:
            row.estimate = estimate_rho(
                plan.spec, init, plan.trials, plan.seed, cell=cell, threads=plan.threads,
                confidence=plan.confidence, max_steps=plan.max_steps,
            )
        except ChainError as exc:
            logger.warning(f"Sweep cell n={n} failed: {exc}")
            row.error = str(exc)
        rows.append(row)
    return rows


def format_number(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def sweep_record(row: SweepRow) -> dict:
    record = dict.fromkeys(SWEEP_COLUMNS, '')
    record.update(n=row.n, delta0=row.delta0)
    estimate = row.estimate
    if estimate is None:
        return record
    record.update(
        trials=estimate.trials,
        wins=estimate.wins,
        both_extinct=estimate.both_extinct,
        censored=estimate.censored,
        rho_hat=estimate.rho_hat,
        ci_low=estimate.ci_low,
        ci_high=estimate.ci_high,
        hit_tie_freq=estimate.hit_tie_freq,
    )
    for name in ('T', 'I', 'K', 'J', 'F'):
        record[f'mean_{name}'] = estimate.means[name]
    return record


def write_sweep_csv(rows: Iterable[SweepRow], stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        record = sweep_record(row)
        writer.writerow([format_number(record[column]) for column in SWEEP_COLUMNS])


def sweep_json(rows: Iterable[SweepRow]) -> list:
    payload = []
    for row in rows:
        record = sweep_record(row)
        record['init'] = str(row.init)
        record['error'] = row.error
        payload.append(record)
    return payload
