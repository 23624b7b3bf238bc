# chains/utils.py

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, List

import numpy as np
import yaml

from .domain import LABEL_TO_REACTION, ModelSpec
from .exceptions import InvalidInput

logger = logging.getLogger(__name__)

SPEC_KEYS = ('alpha0', 'alpha1', 'beta', 'delta', 'gamma0', 'gamma1', 'mode')
DUMP_HEADER = '# step kind x0 x1 dGap tags'


def parse_spec_text(value: str) -> dict:
    """
    Turn a `--spec` argument into a raw mapping.

    Args:
        value (str): path to a YAML mapping file, or an inline
            `key=val,key=val` string

    Returns:
        dict: key -> Decimal for rates, key -> str for mode

    Raises:
        InvalidInput: If the text cannot be parsed or names unknown keys
    """
    if os.path.isfile(value):
        with open(value, encoding='utf-8') as handle:
            raw = yaml.safe_load(handle) or {}
        if not isinstance(raw, dict):
            raise InvalidInput(f"Spec file {value} must contain a mapping")
    else:
        raw = {}
        for item in filter(None, (part.strip() for part in value.split(','))):
            if '=' not in item:
                raise InvalidInput(f"Expected key=value, got '{item}'")
            key, val = item.split('=', 1)
            raw[key.strip()] = val.strip()

    unknown = set(raw) - set(SPEC_KEYS)
    if unknown:
        raise InvalidInput(f"Unknown spec keys: {', '.join(sorted(unknown))}")

    parsed = {}
    for key, val in raw.items():
        if key == 'mode':
            parsed[key] = str(val).lower()
            continue
        try:
            parsed[key] = Decimal(str(val))
        except InvalidOperation:
            raise InvalidInput(f"{key} is not a number: {val}")
    return parsed


def load_spec(value: str) -> ModelSpec:
    from .serializers import ModelSpecSerializer

    serializer = ModelSpecSerializer(data=parse_spec_text(value))
    if not serializer.is_valid():
        raise InvalidInput(f"Invalid spec: {dict(serializer.errors)}")
    return serializer.to_spec()


def trial_rng(seed: int, cell: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial of one cell of an experiment."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(cell, trial)))


class UniformStream:
    """Uniform [0, 1) draws served from blocks of a Generator."""

    def __init__(self, rng: np.random.Generator, block: int = 1024):
        self.rng = rng
        self.block = block
        self._buffer = []
        self._position = 0

    def next(self) -> float:
        if self._position >= len(self._buffer):
            self._buffer = self.rng.random(self.block).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value


def merge_tallies(tallies: Iterable[dict]) -> dict:
    """Sum integer tallies key by key; list values (per-run samples) are concatenated in chunk order."""
    total = {}
    for tally in tallies:
        for key, value in tally.items():
            if isinstance(value, list):
                total[key] = total.get(key, []) + value
            else:
                total[key] = total.get(key, 0) + value
    return total


def chunk_bounds(trials: int, chunks: int) -> List[tuple]:
    chunks = max(1, min(chunks, trials))
    size, extra = divmod(trials, chunks)
    bounds, start = [], 0
    for index in range(chunks):
        stop = start + size + (1 if index < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def run_parallel(worker: Callable, trials: int, threads: int, *args) -> dict:
    """
    Run worker(*args, start, stop) over contiguous chunks of trial indices
    and merge the returned tallies: counts are summed, per-trial lists are
    joined in trial order.

    The merge does not depend on the number of workers or on completion order.
    """
    if threads <= 1 or trials < 2:
        return merge_tallies([worker(*args, 0, trials)])
    bounds = chunk_bounds(trials, threads * 4)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, *args, start, stop) for start, stop in bounds]
        return merge_tallies(future.result() for future in futures)


# Trajectory dumps

@dataclass(frozen=True)
class DumpRecord:
    step: int
    kind: str
    x0: int
    x1: int
    d_gap: int
    tags: tuple

    @property
    def reaction(self):
        return LABEL_TO_REACTION[self.kind]


def format_dump_line(step, reaction, config, event) -> str:
    return f"{step} {reaction.label} {config.x0} {config.x1} {event.d_gap_initial} {event.tag_string()}"


def trajectory_writer(stream) -> Callable:
    """Return an `on_event` callback writing one dump line per event."""
    stream.write(DUMP_HEADER + '\n')

    def on_event(step, reaction, config, event):
        stream.write(format_dump_line(step, reaction, config, event) + '\n')

    return on_event


def read_trajectory_dump(lines: Iterable[str]) -> List[DumpRecord]:
    records = []
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        if len(parts) != 6 or parts[1] not in LABEL_TO_REACTION:
            raise InvalidInput(f"Malformed dump line {number}: {line}")
        try:
            records.append(DumpRecord(
                step=int(parts[0]), kind=parts[1], x0=int(parts[2]), x1=int(parts[3]),
                d_gap=int(parts[4]), tags=tuple(parts[5].split(',')),
            ))
        except ValueError:
            raise InvalidInput(f"Malformed dump line {number}: {line}")
    return records


def read_xi_stream(lines: Iterable[str]) -> List[float]:
    values = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        value = float(line)
        if not 0.0 <= value < 1.0:
            raise InvalidInput(f"xi value outside [0, 1): {value}")
        values.append(value)
    return values


def mean_and_se(total, total_sq, count: int):
    """Mean and standard error from a sum and a sum of squares."""
    if count == 0:
        return 0.0, 0.0
    mean = total / count
    if count == 1:
        return mean, 0.0
    variance = max(total_sq / count - mean * mean, 0.0) * count / (count - 1)
    return mean, math.sqrt(variance / count)
