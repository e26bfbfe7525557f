"""
Service layer for time-domain runs.
All runs go through SimulationService so that the watchdog, energy log and
artifacts are handled the same way everywhere.
"""
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.conf import settings

from apps.core.exceptions import InstabilityError
from apps.mesh.hybrid import HybridMesh
from .discretization import Discretization, build_discretization
from .energy import compute_energy
from .enums import InitialCondition, IntegratorName, QuadratureMode
from .fields import named_field, set_initial_condition
from .integrators import make_integrator
from .output import write_energy_log, write_summary, write_vtk
from .rhs import RhsEvaluator
from .state import FluxConfig, SolutionState
from .timestep import estimate_dt, steps_for

logger = logging.getLogger(__name__)


@dataclass
class RunOptions:
    degree: int
    final_time: float
    flux: FluxConfig = field(default_factory=FluxConfig)
    cfl: float | None = None
    integrator: IntegratorName = IntegratorName.LSRK45
    quadrature: QuadratureMode = QuadratureMode.EXACT
    initial_condition: InitialCondition = InitialCondition.STANDING_WAVE
    pulse_center: tuple = (0.0, 0.0, 0.0)
    pulse_width: float = 0.1
    output_dir: Path | None = None
    snapshot_interval: int = 0
    energy_interval: int = 1
    threads: int | None = None
    # fixed step instead of the CFL estimate (still adjusted to hit final_time)
    dt: float | None = None


@dataclass
class RunResult:
    disc: Discretization
    state: SolutionState
    dt: float
    steps: int
    energies: list = field(default_factory=list)
    wall_time: float = 0.0
    snapshots: list = field(default_factory=list)

    @property
    def initial_energy(self) -> float:
        return self.energies[0][1]

    @property
    def final_energy(self) -> float:
        return self.energies[-1][1]

    def summary(self, options: RunOptions) -> dict:
        return {
            **self.disc.describe(),
            'dt': self.dt,
            'steps': self.steps,
            'final_time': self.state.time,
            'initial_energy': self.initial_energy,
            'final_energy': self.final_energy,
            'wall_time': self.wall_time,
            'integrator': IntegratorName(options.integrator).value,
            'flux': options.flux.mode.value,
        }


class EnergyWatchdog:
    """Aborts when the energy stops being finite or grows past growth * E0."""

    def __init__(self, initial_energy: float, growth: float | None = None):
        self.initial_energy = initial_energy
        self.growth = growth if growth is not None else getattr(settings, 'WAVEDG_WATCHDOG_GROWTH', 10.0)

    def check(self, state: SolutionState, energy: float, step: int):
        if not np.isfinite(energy) or not state.is_finite():
            element = state.first_nonfinite_element()
            raise InstabilityError(
                f"non-finite state at step {step}, t={state.time:.6g}", element=element, time=state.time)
        if self.initial_energy > 0 and energy > self.growth * self.initial_energy:
            raise InstabilityError(
                f"energy grew from {self.initial_energy:.6g} to {energy:.6g} at step {step}, t={state.time:.6g}",
                time=state.time,
            )


class SimulationService:
    """Service for building, running and recording simulations."""

    @staticmethod
    def prepare(mesh: HybridMesh, options: RunOptions) -> tuple[Discretization, SolutionState]:
        disc = build_discretization(mesh, options.degree, options.quadrature, options.threads)
        field_ = named_field(options.initial_condition, options.pulse_center, options.pulse_width)
        return disc, set_initial_condition(disc, field_)

    @staticmethod
    def advance(
        disc: Discretization,
        state: SolutionState,
        options: RunOptions,
        dt: float,
        steps: int,
        on_sample=None,
    ) -> tuple[SolutionState, list]:
        """Take `steps` steps of size dt; returns the final state and (t, E) samples."""
        rhs = RhsEvaluator(disc, options.flux, options.threads)
        integrator = make_integrator(options.integrator)
        watchdog_interval = getattr(settings, 'WAVEDG_WATCHDOG_INTERVAL', 50)
        energy_interval = max(1, int(options.energy_interval))

        energy = compute_energy(state, disc)
        samples = [(state.time, energy)]
        watchdog = EnergyWatchdog(energy)
        history = state.history
        t0 = state.time

        for step in range(1, steps + 1):
            t = state.time
            state = integrator.step(rhs, state, t, dt, history)
            state.time = t0 + step * dt
            state.history = history

            sample = step % energy_interval == 0 or step == steps
            if sample or step % watchdog_interval == 0:
                energy = compute_energy(state, disc)
                watchdog.check(state, energy, step)
                if sample:
                    samples.append((state.time, energy))
                    logger.debug("step %d t=%.6g energy=%.17g", step, state.time, energy)
            if on_sample is not None:
                on_sample(step, state)
        return state, samples

    @staticmethod
    def run(mesh: HybridMesh, options: RunOptions) -> RunResult:
        """Full run: discretize, interpolate the initial condition, step to final_time, write artifacts."""
        started = time.perf_counter()
        disc, state = SimulationService.prepare(mesh, options)
        dt_target = options.dt if options.dt is not None else estimate_dt(disc, options.cfl)
        steps, dt = steps_for(options.final_time, dt_target)
        logger.info("Run: N=%d, %d elements, dt=%.6g, %d steps", options.degree, mesh.num_elements, dt, steps)

        snapshots = []
        output_dir = Path(options.output_dir) if options.output_dir else None

        def snapshot(step: int, current: SolutionState):
            if output_dir and options.snapshot_interval and step % options.snapshot_interval == 0:
                snapshots.append(write_vtk(output_dir / f'snapshot_{step:06d}.vtk', disc, current))

        snapshot(0, state)
        state, samples = SimulationService.advance(disc, state, options, dt, steps, on_sample=snapshot)
        result = RunResult(
            disc=disc, state=state, dt=dt, steps=steps, energies=samples,
            wall_time=time.perf_counter() - started, snapshots=snapshots,
        )
        if output_dir:
            write_energy_log(output_dir / 'energy.csv', samples)
            write_summary(output_dir / 'summary.json', result.summary(options))
        logger.info(
            "Run finished: t=%.6g, energy %.6g -> %.6g, %.2fs",
            state.time, result.initial_energy, result.final_energy, result.wall_time,
        )
        return result
