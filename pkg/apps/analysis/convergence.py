"""
Convergence studies on the standing-wave problem.

Each level runs the standing wave on a family mesh of size h to the final time
and measures the pressure L2 error there. Rates are the least-squares slope of
log(error) against log(h) over the last three stable levels.
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from apps.core.exceptions import AnalysisError, InstabilityError
from apps.mesh.generators import MeshFamily, family_mesh
from apps.solver.enums import FluxMode, InitialCondition, IntegratorName
from apps.solver.fields import standing_wave
from apps.solver.services import RunOptions, SimulationService
from apps.solver.state import FluxConfig
from .errors import l2_error

logger = logging.getLogger(__name__)

CONVERGENCE_FINAL_TIME = 1.0
FIT_LEVELS = 3
MIN_LEVELS = 3
CONVERGENCE_HEADER = ['family', 'N', 'h', 'error', 'rate', 'steps', 'dt', 'stable']


@dataclass
class ConvergenceLevel:
    h: float
    error: float
    steps: int = 0
    dt: float = 0.0
    stable: bool = True


@dataclass
class ConvergenceRecord:
    family: MeshFamily
    degree: int
    levels: list[ConvergenceLevel] = field(default_factory=list)

    def __post_init__(self):
        self.family = MeshFamily(self.family)
        hs = [level.h for level in self.levels]
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise AnalysisError(f"mesh sizes must be strictly decreasing, got {hs}")
        if any(level.stable and not level.error > 0 for level in self.levels):
            raise AnalysisError("errors of stable levels must be positive")

    @property
    def stable_levels(self) -> list[ConvergenceLevel]:
        return [level for level in self.levels if level.stable]

    @property
    def rate(self) -> float:
        levels = self.stable_levels[-FIT_LEVELS:]
        if len(levels) < 2:
            return float('nan')
        return fit_rate([level.h for level in levels], [level.error for level in levels])

    def pairwise_rates(self) -> list[float]:
        """Rate between each level and the previous one (nan for the first)."""
        rates = [float('nan')]
        for prev, cur in zip(self.levels, self.levels[1:]):
            if prev.stable and cur.stable:
                rates.append(float(np.log(prev.error / cur.error) / np.log(prev.h / cur.h)))
            else:
                rates.append(float('nan'))
        return rates

    def rows(self) -> list[list]:
        return [
            [self.family.value, self.degree, level.h, level.error, rate, level.steps, level.dt, level.stable]
            for level, rate in zip(self.levels, self.pairwise_rates())
        ]


def fit_rate(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 2:
        raise AnalysisError("a rate needs at least two levels")
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)


def check_levels(hs) -> list[float]:
    hs = [float(h) for h in hs]
    if len(hs) < MIN_LEVELS:
        raise AnalysisError(f"a convergence study needs at least {MIN_LEVELS} mesh sizes, got {len(hs)}")
    return sorted(hs, reverse=True)


def run_level(
    family: MeshFamily | str,
    degree: int,
    h: float,
    flux: FluxConfig | None = None,
    seed: int = 0,
    cfl: float | None = None,
    final_time: float = CONVERGENCE_FINAL_TIME,
    threads: int | None = None,
) -> ConvergenceLevel:
    """Standing-wave run on one family mesh; unstable runs are flagged, not raised."""
    mesh = family_mesh(family, h, seed)
    options = RunOptions(
        degree=degree,
        final_time=final_time,
        flux=flux or FluxConfig(),
        cfl=cfl,
        integrator=IntegratorName.LSRK45,
        initial_condition=InitialCondition.STANDING_WAVE,
        energy_interval=10 ** 6,
        threads=threads,
    )
    try:
        result = SimulationService.run(mesh, options)
    except InstabilityError as exc:
        logger.warning("Unstable cell %s N=%d h=%g: %s", MeshFamily(family).value, degree, h, exc)
        return ConvergenceLevel(h=h, error=float('nan'), stable=False)
    error = l2_error(result.state, result.disc, standing_wave)
    logger.info("%s N=%d h=%g: error %.6e (%d steps)", MeshFamily(family).value, degree, h, error, result.steps)
    return ConvergenceLevel(h=h, error=error, steps=result.steps, dt=result.dt)


def level_payload(level: ConvergenceLevel) -> dict:
    return asdict(level)


def flux_from_payload(mode: str, tau_scale: float = 1.0) -> FluxConfig:
    return FluxConfig(FluxMode(mode), tau_scale)
