"""
Fixed vocabularies of the solver.
"""
from enum import Enum


class FluxMode(Enum):
    """Numerical flux penalties."""
    UPWIND = 'upwind'
    CENTRAL = 'central'
    CUSTOM = 'custom'


class QuadratureMode(Enum):
    """Exact quadrature or GLL mass lumping in the extruded direction."""
    EXACT = 'exact'
    LUMPED = 'lumped'


class IntegratorName(Enum):
    LSRK45 = 'lsrk45'
    AB3 = 'ab3'


class InitialCondition(Enum):
    STANDING_WAVE = 'standing_wave'
    GAUSSIAN = 'gaussian'


# Variable order inside every state block.
VARIABLES = ('p', 'u_x', 'u_y', 'u_z')
