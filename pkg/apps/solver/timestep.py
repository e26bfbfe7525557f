"""Stable timestep estimate."""
import logging

import numpy as np
from django.conf import settings

from apps.core.exceptions import ConfigurationError
from .discretization import Discretization

logger = logging.getLogger(__name__)


def estimate_dt(disc: Discretization, cfl: float | None = None) -> float:
    """dt = cfl * min_k h_k / (c_k (N+1)^2) with h_k = volume / surface area."""
    if cfl is None:
        cfl = getattr(settings, 'WAVEDG_DEFAULT_CFL', 0.5)
    if not cfl > 0:
        raise ConfigurationError(f"cfl must be positive, got {cfl}")
    sizes = np.array([g.size for g in disc.geometries])
    speeds = disc.mesh.wavespeed
    n1 = disc.degree + 1
    dt = float(cfl * np.min(sizes / (speeds * n1 * n1)))
    logger.debug("dt=%.6g (cfl=%g, min h=%.6g)", dt, cfl, sizes.min())
    return dt


def steps_for(final_time: float, dt: float) -> tuple[int, float]:
    """Number of steps reaching final_time exactly and the adjusted dt."""
    if not final_time > 0:
        raise ConfigurationError(f"final_time must be positive, got {final_time}")
    steps = max(1, int(np.ceil(final_time / dt - 1e-12)))
    return steps, final_time / steps
