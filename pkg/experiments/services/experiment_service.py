# experiments/services/experiment_service.py
"""
Service objects behind the HTTP API. Each call returns (payload, error):
domain errors become an error message instead of an exception.
"""

import logging

from django.conf import settings

from chains.exceptions import ChainError
from chains.services.exact import exact_mean_consensus_time, exact_rho
from chains.services.simulation import gillespie_run, run_to_consensus
from chains.utils import trial_rng
from experiments.models import RunKinds
from experiments.utils import gillespie_to_dict, grid_to_dict, stats_to_dict

from .estimation import estimate_rho
from .interfaces import IEstimationService, IExactService, IOdeService, IRunRecorder, ISimulationService
from .ode import ode_trajectory

logger = logging.getLogger(__name__)


def lv_setting(key):
    return settings.LV_CONSENSUS[key]


class RunRecorder(IRunRecorder):
    def __init__(self, run_repo):
        self.run_repo = run_repo

    def record(self, kind, spec, parameters, seed, result):
        run = self.run_repo.create(
            kind=kind,
            spec=spec.to_mapping() if spec is not None else {},
            parameters=parameters,
            seed=seed,
            result=result,
        )
        logger.info(f"Saved {kind} run {run.run_id}")
        return run


class _RecordingService:
    kind = None

    def __init__(self, recorder: IRunRecorder):
        self.recorder = recorder

    def _finish(self, spec, parameters, seed, payload, save):
        if save:
            run = self.recorder.record(self.kind, spec, parameters, seed, payload)
            payload = {**payload, 'run_id': str(run.run_id)}
        return payload, None


class EstimationService(_RecordingService, IEstimationService):
    kind = RunKinds.ESTIMATE

    def estimate(self, spec, init, trials, seed, save=False):
        try:
            estimate = estimate_rho(
                spec, init, trials, seed,
                threads=lv_setting('DEFAULT_THREADS'),
                confidence=lv_setting('CONFIDENCE'),
                censor_warn_fraction=lv_setting('CENSOR_WARN_FRACTION'),
            )
        except ChainError as exc:
            return None, str(exc)
        parameters = {'init': [init.x0, init.x1], 'trials': trials}
        return self._finish(spec, parameters, seed, estimate.to_dict(), save)


class ExactService(_RecordingService, IExactService):
    kind = RunKinds.EXACT

    def solve(self, spec, xmax, with_mean_t=False, both_extinct_value=0.0, save=False):
        options = {
            'tol': lv_setting('EXACT_TOLERANCE'),
            'direct_max_xmax': lv_setting('DIRECT_SOLVE_MAX_XMAX'),
            'max_sweeps': lv_setting('MAX_SWEEPS'),
        }
        try:
            grid = exact_rho(spec, xmax, both_extinct_value=both_extinct_value, **options)
            if with_mean_t:
                grid.mean_t = exact_mean_consensus_time(spec, xmax, **options)
        except ChainError as exc:
            return None, str(exc)
        parameters = {
            'xmax': xmax, 'with_mean_t': with_mean_t, 'both_extinct_value': both_extinct_value,
        }
        return self._finish(spec, parameters, None, grid_to_dict(grid), save)


class OdeService(_RecordingService, IOdeService):
    kind = RunKinds.ODE

    def trajectory(self, spec, x0, x1, dt, horizon, save=False):
        try:
            result = ode_trajectory(
                spec, x0, x1, dt, horizon,
                rel_tol=lv_setting('ODE_RELATIVE_TOLERANCE'),
                max_halvings=lv_setting('ODE_MAX_HALVINGS'),
                overflow=lv_setting('ODE_OVERFLOW_THRESHOLD'),
            )
        except ChainError as exc:
            return None, str(exc)
        parameters = {'x0': x0, 'x1': x1, 'dt': dt, 'horizon': horizon}
        return self._finish(spec, parameters, None, result.to_dict(), save)


class SimulationService(_RecordingService, ISimulationService):
    kind = RunKinds.SIMULATE

    def simulate(self, spec, init, seed, gillespie=False, max_steps=None, save=False):
        rng = trial_rng(seed, 0, 0)
        try:
            if gillespie:
                payload = gillespie_to_dict(gillespie_run(spec, init, rng, max_events=max_steps))
            else:
                payload = stats_to_dict(run_to_consensus(spec, init, rng, max_steps=max_steps))
        except ChainError as exc:
            return None, str(exc)
        parameters = {'init': [init.x0, init.x1], 'gillespie': gillespie, 'max_steps': max_steps}
        return self._finish(spec, parameters, seed, payload, save)
