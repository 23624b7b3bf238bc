# experiments/services/ode.py
"""
Deterministic competitive Lotka-Volterra comparison:
dx_i/dt = x_i (r - a_i x_{1-i} - g_i x_i), integrated with fixed-step RK4.
"""

import logging
import math
from typing import Tuple

import numpy as np

from chains.domain import ModelSpec
from chains.exceptions import InvalidInput
from chains.services.kinetics import validate_spec
from experiments.domain import OdeTrajectory

logger = logging.getLogger(__name__)

# densities below this are compared in absolute terms
ABSOLUTE_FLOOR = 1e-12


def ode_coefficients(spec: ModelSpec) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    r = beta - delta, and per-species interspecific and intraspecific loss
    coefficients. Under SD both interspecific reactions kill species i, so
    a_i = alpha0 + alpha1; under NSD species i dies only in the reaction
    with rate alpha_{1-i}.
    """
    validate_spec(spec)
    r = spec.beta - spec.delta
    if spec.self_destructive:
        inter = np.array([spec.alpha, spec.alpha])
    else:
        inter = np.array([spec.alpha1, spec.alpha0])
    intra = np.array([spec.gamma0, spec.gamma1])
    return r, inter, intra


def _integrate(r, inter, intra, state, dt, steps, overflow):
    def f(x):
        return x * (r - inter * x[::-1] - intra * x)

    path = np.empty((steps + 1, 2))
    path[0] = state
    x = np.array(state, dtype=float)
    for i in range(1, steps + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = np.maximum(x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), 0.0)
        if not np.all(np.isfinite(x)) or x.max() > overflow:
            return path[:i], True
        path[i] = x
    return path, False


def ode_trajectory(
    spec: ModelSpec,
    x0: float,
    x1: float,
    dt: float,
    horizon: float,
    rel_tol: float = 1e-8,
    max_halvings: int = 20,
    overflow: float = 1e12,
) -> OdeTrajectory:
    """
    Integrate from (x0, x1) up to `horizon`, reporting the state every `dt`.

    The internal step starts at dt and is halved until the reported points
    change by less than `rel_tol` (relative) between two resolutions. A
    trajectory that exceeds `overflow` is cut at the last finite point and
    flagged `blew_up`.
    """
    if dt <= 0 or horizon <= 0 or not math.isfinite(dt) or not math.isfinite(horizon):
        raise InvalidInput('dt and horizon must be positive and finite')
    if min(x0, x1) < 0 or not (math.isfinite(x0) and math.isfinite(x1)):
        raise InvalidInput('Densities must be finite and >= 0')

    r, inter, intra = ode_coefficients(spec)
    points = max(1, math.ceil(horizon / dt - 1e-9))
    step = horizon / points

    previous, blew_up = _integrate(r, inter, intra, (x0, x1), step, points, overflow)
    halvings, converged = 0, False
    while not blew_up and halvings < max_halvings:
        halvings += 1
        factor = 2 ** halvings
        fine, blew_up = _integrate(r, inter, intra, (x0, x1), step / factor, points * factor, overflow)
        if blew_up:
            previous = fine[::factor]
            break
        sampled = fine[::factor]
        scale = np.maximum(np.abs(sampled), ABSOLUTE_FLOOR)
        change = float(np.max(np.abs(sampled - previous) / scale))
        previous = sampled
        if change < rel_tol:
            converged = True
            break

    if blew_up:
        logger.warning(f"ODE trajectory exceeded {overflow:g}; cut at t={(len(previous) - 1) * step:g}")
    elif not converged:
        logger.warning(f"ODE step halving did not reach relative tolerance {rel_tol:g} in {max_halvings} halvings")

    times = [i * step for i in range(len(previous))]
    return OdeTrajectory(
        times=times,
        x0=previous[:, 0].tolist(),
        x1=previous[:, 1].tolist(),
        dt=step / 2 ** halvings,
        halvings=halvings,
        converged=converged,
        blew_up=blew_up,
    )
