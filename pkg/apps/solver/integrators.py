"""
Explicit time integrators.

Both work on anything supporting `+` and scalar `*` (SolutionState or plain
numpy arrays), with rhs(q, t) returning the time derivative.
"""
from typing import Callable

from apps.core.exceptions import ConfigurationError
from .enums import IntegratorName

# Carpenter-Kennedy five-stage, fourth-order, two-register coefficients.
RK4A = (
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
)
RK4B = (
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
)
RK4C = (
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
)

# third-order Adams-Bashforth weights, newest first
AB3_WEIGHTS = (23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0)


class LowStorageRK45:
    name = IntegratorName.LSRK45
    order = 4

    def step(self, rhs: Callable, q, t: float, dt: float, history: list | None = None):
        residual = None
        for a, b, c in zip(RK4A, RK4B, RK4C):
            k = rhs(q, t + c * dt)
            residual = dt * k if residual is None else a * residual + dt * k
            q = q + b * residual
        return q


class AdamsBashforth3:
    """
    Single-rate AB3. The first two steps are taken with LSRK45 while the
    history of right-hand sides fills up.
    """
    name = IntegratorName.AB3
    order = 3

    def __init__(self):
        self._bootstrap = LowStorageRK45()

    def step(self, rhs: Callable, q, t: float, dt: float, history: list | None = None):
        if history is None:
            raise ConfigurationError("AB3 needs a history list")
        f = rhs(q, t)
        history.append(f)
        del history[:-3]
        if len(history) < 3:
            return self._bootstrap.step(rhs, q, t, dt)
        w0, w1, w2 = AB3_WEIGHTS
        increment = w0 * history[-1] + w1 * history[-2] + w2 * history[-3]
        return q + dt * increment


INTEGRATORS = {
    IntegratorName.LSRK45: LowStorageRK45,
    IntegratorName.AB3: AdamsBashforth3,
}


def make_integrator(name: IntegratorName | str):
    try:
        return INTEGRATORS[IntegratorName(name)]()
    except ValueError as exc:
        raise ConfigurationError(f"unknown integrator {name!r}") from exc
