"""
Per-phase right-hand-side timings.

Phases are timed separately over repeated evaluations on a hybrid box with
equal numbers of wedge and tet layers, and reported per element and per
degree of freedom.
"""
import logging
import time
from dataclasses import dataclass

from apps.core.exceptions import ConfigurationError
from apps.core.parallel import run_chunked
from apps.mesh.generators import structured_hybrid_box
from apps.mesh.hybrid import HybridMesh
from apps.operators.storage import StorageReport, storage_report
from apps.solver.discretization import build_discretization
from apps.solver.fields import GaussianPulse, set_initial_condition
from apps.solver.rhs import RhsEvaluator

logger = logging.getLogger(__name__)

MIN_STEPS = 100
PHASES = ('wedge_volume', 'wedge_surface', 'tet_volume', 'tet_surface')
BENCH_HEADER = (
    ['N']
    + [f'{p}_ns_element' for p in PHASES]
    + [f'{p}_ns_dof' for p in PHASES]
    + ['volume_dof_ratio', 'surface_dof_ratio', 'wedge_floats', 'tet_floats', 'dense_ratio']
)


@dataclass
class BenchResult:
    degree: int
    steps: int
    ns_per_element: dict
    ns_per_dof: dict
    storage: StorageReport

    def ratio(self, kind: str) -> float:
        """Wedge over tet ns/DOF for 'volume' or 'surface'."""
        tet = self.ns_per_dof[f'tet_{kind}']
        return self.ns_per_dof[f'wedge_{kind}'] / tet if tet else float('nan')

    def as_row(self) -> list:
        return (
            [self.degree]
            + [self.ns_per_element[p] for p in PHASES]
            + [self.ns_per_dof[p] for p in PHASES]
            + [self.ratio('volume'), self.ratio('surface'),
               self.storage.wedge_floats, self.storage.tet_floats, self.storage.dense_ratio]
        )


def bench_mesh(n: int = 4) -> HybridMesh:
    """n x n columns, n wedge layers over n tet layers."""
    return structured_hybrid_box(n, n, n, n)


def bench(mesh: HybridMesh, degree: int, steps: int = MIN_STEPS, threads: int | None = None) -> BenchResult:
    if steps < MIN_STEPS:
        raise ConfigurationError(f"bench needs at least {MIN_STEPS} steps, got {steps}")
    disc = build_discretization(mesh, degree, threads=threads)
    state = set_initial_condition(disc, GaussianPulse(width=0.5))
    evaluator = RhsEvaluator(disc, threads=threads)
    out = disc.layout.zeros()
    values = state.global_values()

    counts = {'wedge': disc.num_wedges, 'tet': disc.num_tets}
    nodes = {'wedge': disc.layout.np_wedge, 'tet': disc.layout.np_tet}
    calls = {
        'wedge_volume': lambda a, b: evaluator.wedge_volume(state, out, a, b),
        'wedge_surface': lambda a, b: evaluator.wedge_surface(values, out, a, b),
        'tet_volume': lambda a, b: evaluator.tet_volume(state, out, a, b),
        'tet_surface': lambda a, b: evaluator.tet_surface(values, out, a, b),
    }

    per_element, per_dof = {}, {}
    for phase, call in calls.items():
        kind = phase.split('_')[0]
        k = counts[kind]
        run_chunked(call, k, threads)  # warm-up
        started = time.perf_counter_ns()
        for _ in range(steps):
            run_chunked(call, k, threads)
        elapsed = time.perf_counter_ns() - started
        per_element[phase] = elapsed / (steps * k) if k else float('nan')
        per_dof[phase] = per_element[phase] / nodes[kind] if k else float('nan')

    result = BenchResult(degree, steps, per_element, per_dof, storage_report(disc.wedge_ops, disc.tet_ops))
    logger.info("Bench N=%d: volume ratio %.3f, surface ratio %.3f",
                degree, result.ratio('volume'), result.ratio('surface'))
    return result
