"""
Semi-discrete right-hand side of the acoustic system

    dp/dt   = kappa * (-div u + sum_f L_f F_p)
    du_i/dt = (1/rho) * (-D_i p + sum_f n_i L_f F_u)

with F_p = (tau_p [p] - n.[u]) / 2, F_u = (tau_u n.[u] - [p]) / 2 and
[q] = q+ - q-. Reflecting boundary faces use p+ = -p-, u+ = u-.

Evaluation is split into four phases (wedge volume, wedge surface, tet volume,
tet surface). Each phase is chunked over contiguous element ranges and every
element's output is written by exactly one task.
"""
import logging

import numpy as np

from apps.core.exceptions import InstabilityError
from apps.core.parallel import run_chunked
from apps.operators.tet import apply_tet_derivatives, apply_tet_divergence, apply_tet_lift
from apps.operators.wedge import apply_wedge_derivatives, apply_wedge_divergence, apply_wedge_lift
from .discretization import Discretization, FaceGroup
from .state import FluxConfig, SolutionState

logger = logging.getLogger(__name__)


def face_fluxes(values: np.ndarray, group: FaceGroup, flux: FluxConfig) -> tuple[np.ndarray, np.ndarray]:
    """(F_p, F_u), each (K, Nfp), for one face group."""
    mine = values[:, group.mine]
    theirs = values[:, group.theirs]
    if group.boundary.any():
        theirs[0] = np.where(group.boundary[:, None], -mine[0], theirs[0])

    jump_p = theirs[0] - mine[0]
    n = group.normals
    jump_un = (
        n[:, 0, None] * (theirs[1] - mine[1])
        + n[:, 1, None] * (theirs[2] - mine[2])
        + n[:, 2, None] * (theirs[3] - mine[3])
    )
    tau_p, tau_u = flux.penalties(0.5 * (group.z_mine + group.z_theirs))
    flux_p = 0.5 * (tau_p[:, None] * jump_p - jump_un)
    flux_u = 0.5 * (tau_u[:, None] * jump_un - jump_p)
    return flux_p, flux_u


class RhsEvaluator:
    """Callable rhs(state, t) -> SolutionState for one discretization and flux."""

    def __init__(self, disc: Discretization, flux: FluxConfig | None = None, threads: int | None = None):
        self.disc = disc
        self.flux = flux or FluxConfig()
        self.threads = threads

    def __call__(self, state: SolutionState, t: float | None = None) -> SolutionState:
        time = state.time if t is None else t
        out = self.disc.layout.zeros(time=time)
        values = state.global_values()
        kw, kt = self.disc.num_wedges, self.disc.num_tets

        run_chunked(lambda a, b: self.wedge_volume(state, out, a, b), kw, self.threads)
        run_chunked(lambda a, b: self.wedge_surface(values, out, a, b), kw, self.threads)
        run_chunked(lambda a, b: self.tet_volume(state, out, a, b), kt, self.threads)
        run_chunked(lambda a, b: self.tet_surface(values, out, a, b), kt, self.threads)

        if not out.is_finite():
            element = out.first_nonfinite_element()
            raise InstabilityError(
                f"non-finite right-hand side in element {element} at t={time:.6g}",
                element=element, time=time,
            )
        return out

    def wedge_volume(self, state: SolutionState, out: SolutionState, start: int, stop: int):
        ops = self.disc.wedge_ops[start:stop]
        p, ux, uy, uz = state.wedge[:, start:stop]
        kappa = self.disc.wedge_kappa[start:stop, None]
        inv_rho = 1.0 / self.disc.wedge_rho[start:stop, None]
        out.wedge[0, start:stop] = -kappa * apply_wedge_divergence(ops, ux, uy, uz)
        for i, grad in enumerate(apply_wedge_derivatives(ops, p)):
            out.wedge[1 + i, start:stop] = -inv_rho * grad

    def wedge_surface(self, values: np.ndarray, out: SolutionState, start: int, stop: int):
        ops = self.disc.wedge_ops[start:stop]
        groups = [g[start:stop] for g in self.disc.wedge_faces]
        pairs = [face_fluxes(values, g, self.flux) for g in groups]
        kappa = self.disc.wedge_kappa[start:stop, None]
        inv_rho = 1.0 / self.disc.wedge_rho[start:stop, None]

        out.wedge[0, start:stop] += kappa * apply_wedge_lift(ops, [fp for fp, _ in pairs])
        for i in range(3):
            lifted = apply_wedge_lift(ops, [g.normals[:, i, None] * fu for g, (_, fu) in zip(groups, pairs)])
            out.wedge[1 + i, start:stop] += inv_rho * lifted

    def tet_volume(self, state: SolutionState, out: SolutionState, start: int, stop: int):
        ops = self.disc.tet_ops[start:stop]
        p, ux, uy, uz = state.tet[:, start:stop]
        kappa = self.disc.tet_kappa[start:stop, None]
        inv_rho = 1.0 / self.disc.tet_rho[start:stop, None]
        out.tet[0, start:stop] = -kappa * apply_tet_divergence(ops, ux, uy, uz)
        for i, grad in enumerate(apply_tet_derivatives(ops, p)):
            out.tet[1 + i, start:stop] = -inv_rho * grad

    def tet_surface(self, values: np.ndarray, out: SolutionState, start: int, stop: int):
        ops = self.disc.tet_ops[start:stop]
        groups = [g[start:stop] for g in self.disc.tet_faces]
        pairs = [face_fluxes(values, g, self.flux) for g in groups]
        kappa = self.disc.tet_kappa[start:stop, None]
        inv_rho = 1.0 / self.disc.tet_rho[start:stop, None]

        flux_p = np.stack([fp for fp, _ in pairs], axis=1)
        out.tet[0, start:stop] += kappa * apply_tet_lift(ops, flux_p)
        for i in range(3):
            flux_u = np.stack([g.normals[:, i, None] * fu for g, (_, fu) in zip(groups, pairs)], axis=1)
            out.tet[1 + i, start:stop] += inv_rho * apply_tet_lift(ops, flux_u)


def compute_rhs(state: SolutionState, disc: Discretization, flux: FluxConfig | None = None,
                threads: int | None = None) -> SolutionState:
    return RhsEvaluator(disc, flux, threads)(state)
