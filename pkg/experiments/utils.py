import json
from dataclasses import asdict
from enum import Enum

from chains.domain import Config, CouplingReport, ExactGrid, GillespieResult, TrajectoryStats


def _plain(value):
    if isinstance(value, Config):
        return [value.x0, value.x1]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def stats_to_dict(result: TrajectoryStats) -> dict:
    data = {name: _plain(getattr(result, name)) for name in result.__dataclass_fields__}
    data['censored'] = result.censored
    return data


def gillespie_to_dict(result: GillespieResult) -> dict:
    return {
        'stats': stats_to_dict(result.stats),
        'extinction_times': list(result.extinction_times),
        'events': result.events,
        'final_time': result.final_time,
        'censored': result.censored,
        'minority_outlived_majority': result.minority_outlived_majority,
    }


def coupling_to_dict(report: CouplingReport, tau_limit: int = 1000) -> dict:
    """
    JSON form of a coupled run. The first `tau_limit` S-update steps and the
    S states after them are kept; `tau_count` is always the full count.
    """
    data = _plain({key: value for key, value in asdict(report).items() if key not in ('tau', 'tau_states')})
    data['initial'] = [report.initial.x0, report.initial.x1]
    data['final_s'] = [report.final_s.x0, report.final_s.x1] if report.final_s else None
    data['tau'] = list(report.tau[:tau_limit])
    data['tau_states'] = [list(state) for state in report.tau_states[:tau_limit]]
    data['tau_count'] = len(report.tau)
    data['tau_truncated'] = len(report.tau) > tau_limit
    data['clean'] = report.clean
    return data


def grid_to_dict(grid: ExactGrid, limit: int = None) -> dict:
    """Solver metadata plus rho (and meanT) rows for a, b <= limit."""
    size = grid.xmax if limit is None else min(limit, grid.xmax)
    return {
        'xmax': grid.xmax,
        'method': grid.method,
        'residual': grid.residual,
        'sweeps': grid.sweeps,
        'boundary_policy': grid.boundary_policy,
        'both_extinct_value': grid.both_extinct_value,
        'truncation_gap': grid.truncation_gap,
        'rho': grid.rho[:size + 1, :size + 1].tolist(),
        'mean_t': None if grid.mean_t is None else grid.mean_t[:size + 1, :size + 1].tolist(),
    }


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=str)
