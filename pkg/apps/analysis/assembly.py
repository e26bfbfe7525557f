"""
Dense global right-hand-side matrix A with dU/dt = A U.

Column j is the right-hand side of the j-th canonical basis state in the flat
ordering of DofLayout (element-major, wedges first, variable-major within an
element).
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from apps.core.exceptions import AnalysisError
from apps.core.parallel import run_chunked
from apps.solver.discretization import Discretization
from apps.solver.energy import mass_action
from apps.solver.rhs import RhsEvaluator
from apps.solver.state import FluxConfig

logger = logging.getLogger(__name__)

SPOT_CHECK_COLUMNS = 10
SPOT_CHECK_TOL = 1e-12


@dataclass(eq=False)
class GlobalOperator:
    matrix: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def check_dof_cap(disc: Discretization, max_dofs: int | None = None) -> int:
    if max_dofs is None:
        max_dofs = getattr(settings, 'WAVEDG_MAX_DOF', 20000)
    dofs = disc.layout.num_dofs
    if dofs > max_dofs:
        raise AnalysisError(
            f"{dofs} degrees of freedom exceed the dense cap of {max_dofs}; use a smaller mesh or degree")
    return dofs


def apply_columns(disc: Discretization, operator, columns, threads: int | None = None) -> np.ndarray:
    """Stack operator(basis state j) for each j in columns, computed in parallel chunks."""
    layout = disc.layout
    columns = np.asarray(columns, dtype=np.int64)
    out = np.empty((layout.num_dofs, len(columns)))

    def chunk(start: int, stop: int):
        basis = np.zeros(layout.num_dofs)
        for c in range(start, stop):
            basis[columns[c]] = 1.0
            out[:, c] = operator(layout.from_flat(basis)).to_flat()
            basis[columns[c]] = 0.0

    run_chunked(chunk, len(columns), threads, min_chunk=8)
    return out


def assemble_global(
    disc: Discretization,
    flux: FluxConfig | None = None,
    threads: int | None = None,
    max_dofs: int | None = None,
    seed: int = 0,
) -> GlobalOperator:
    """Dense A, spot-checked on random columns against a fresh evaluator."""
    flux = flux or FluxConfig()
    dofs = check_dof_cap(disc, max_dofs)
    rhs = RhsEvaluator(disc, flux, threads=1)
    matrix = apply_columns(disc, rhs, np.arange(dofs), threads)

    checker = RhsEvaluator(disc, flux, threads=1)
    rng = np.random.default_rng(seed)
    picked = rng.choice(dofs, size=min(SPOT_CHECK_COLUMNS, dofs), replace=False)
    again = apply_columns(disc, checker, picked, threads=1)
    scale = max(1.0, float(np.abs(matrix).max()))
    mismatch = float(np.abs(again - matrix[:, picked]).max())
    if mismatch > SPOT_CHECK_TOL * scale:
        raise AnalysisError(f"column spot check failed: difference {mismatch:.3e}")

    logger.info("Assembled %dx%d right-hand-side matrix (%s flux, %s quadrature)",
                dofs, dofs, flux.mode.value, disc.quadrature.value)
    return GlobalOperator(matrix, {
        'degree': disc.degree,
        'wedges': disc.num_wedges,
        'tets': disc.num_tets,
        'flux': flux.mode.value,
        'quadrature': disc.quadrature.value,
    })


def global_mass_matrix(disc: Discretization, threads: int | None = None) -> np.ndarray:
    """Media-weighted mass (1/kappa on p, rho on u) in the flat ordering."""
    check_dof_cap(disc)
    return apply_columns(disc, lambda s: mass_action(s, disc, disc.quadrature),
                         np.arange(disc.layout.num_dofs), threads)
