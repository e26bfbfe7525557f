"""
Analytic fields and nodal interpolation of initial conditions.

A field is a callable (x, y, z, t) -> (p, u_x, u_y, u_z) on arrays.
"""
from dataclasses import dataclass

import numpy as np

from .discretization import Discretization
from .enums import InitialCondition
from .state import SolutionState

STANDING_WAVE_OMEGA = np.sqrt(3.0) * np.pi / 2


def standing_wave(x, y, z, t=0.0):
    """Standing wave in [-1, 1]^3 with p = 0 on the boundary, rho = kappa = 1."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    k = np.pi / 2
    cx, cy, cz = np.cos(k * x), np.cos(k * y), np.cos(k * z)
    sx, sy, sz = np.sin(k * x), np.sin(k * y), np.sin(k * z)
    amplitude = np.sin(STANDING_WAVE_OMEGA * t) / np.sqrt(3.0)
    p = cx * cy * cz * np.cos(STANDING_WAVE_OMEGA * t)
    return p, amplitude * sx * cy * cz, amplitude * cx * sy * cz, amplitude * cx * cy * sz


def standing_wave_time_derivative(x, y, z, t=0.0):
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    k, w = np.pi / 2, STANDING_WAVE_OMEGA
    cx, cy, cz = np.cos(k * x), np.cos(k * y), np.cos(k * z)
    sx, sy, sz = np.sin(k * x), np.sin(k * y), np.sin(k * z)
    amplitude = w * np.cos(w * t) / np.sqrt(3.0)
    p = -w * cx * cy * cz * np.sin(w * t)
    return p, amplitude * sx * cy * cz, amplitude * cx * sy * cz, amplitude * cx * cy * sz


@dataclass(frozen=True)
class GaussianPulse:
    center: tuple = (0.0, 0.0, 0.0)
    width: float = 0.1

    def __call__(self, x, y, z, t=0.0):
        x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
        cx, cy, cz = self.center
        r2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
        zero = np.zeros_like(x)
        return np.exp(-r2 / self.width ** 2), zero, zero.copy(), zero.copy()


@dataclass(frozen=True)
class ConstantField:
    p: float = 1.0
    u: tuple = (0.0, 0.0, 0.0)

    def __call__(self, x, y, z, t=0.0):
        x = np.asarray(x, dtype=float)
        return (np.full_like(x, self.p),) + tuple(np.full_like(x, c) for c in self.u)


def named_field(name: InitialCondition | str, center=(0.0, 0.0, 0.0), width: float = 0.1):
    if InitialCondition(name) is InitialCondition.GAUSSIAN:
        return GaussianPulse(tuple(center), width)
    return standing_wave


def set_initial_condition(disc: Discretization, field, t: float = 0.0) -> SolutionState:
    """Nodal interpolant of field at time t."""
    state = disc.layout.zeros(time=t)
    if disc.num_wedges:
        xyz = disc.wedge_node_coordinates()
        state.wedge[:] = np.stack(field(xyz[..., 0], xyz[..., 1], xyz[..., 2], t))
    if disc.num_tets:
        xyz = disc.tet_node_coordinates()
        state.tet[:] = np.stack(field(xyz[..., 0], xyz[..., 1], xyz[..., 2], t))
    return state
