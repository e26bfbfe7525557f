"""Discrete acoustic energy 1/2 sum_k (p^T M p / kappa + rho u^T M u)."""
import numpy as np

from .discretization import Discretization
from .enums import QuadratureMode
from .state import SolutionState


def _wedge_mass_action(disc: Discretization, u: np.ndarray, quadrature: QuadratureMode) -> np.ndarray:
    """M_tri U M1D per wedge; M1D is diag(w) under lumping."""
    refs = disc.refs
    n1 = refs.degree + 1
    U = u.reshape(disc.num_wedges, -1, n1)
    tri_weighted = np.einsum('kv,vab,kbj->kaj', disc.J_vertices, refs.triangle.vertex_weighted_mass, U)
    if quadrature is QuadratureMode.LUMPED:
        out = tri_weighted * refs.interval.weights[None, None, :]
    else:
        out = np.matmul(tri_weighted, refs.interval.mass)
    return out.reshape(u.shape)


def _media_weights(kappa: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """(4, K): 1/kappa for p, rho for each velocity component."""
    return np.vstack([1.0 / kappa, rho, rho, rho])


def mass_action(state: SolutionState, disc: Discretization,
                quadrature: QuadratureMode | None = None) -> SolutionState:
    """Media-weighted block-diagonal mass applied to a state."""
    quadrature = QuadratureMode(quadrature or QuadratureMode.EXACT)
    out = disc.layout.zeros(time=state.time)
    if disc.num_wedges:
        weights = _media_weights(disc.wedge_kappa, disc.wedge_rho)
        for var in range(4):
            out.wedge[var] = weights[var, :, None] * _wedge_mass_action(disc, state.wedge[var], quadrature)
    if disc.num_tets:
        weights = _media_weights(disc.tet_kappa, disc.tet_rho) * disc.tet_J[None, :]
        mass = disc.refs.tet.mass
        for var in range(4):
            out.tet[var] = weights[var, :, None] * (state.tet[var] @ mass)
    return out


def element_energies(state: SolutionState, disc: Discretization,
                     quadrature: QuadratureMode | None = None) -> np.ndarray:
    """Energy of every element, wedges first."""
    weighted = mass_action(state, disc, quadrature)
    wedge = 0.5 * np.sum(state.wedge * weighted.wedge, axis=(0, 2))
    tet = 0.5 * np.sum(state.tet * weighted.tet, axis=(0, 2))
    return np.concatenate([wedge, tet])


def compute_energy(state: SolutionState, disc: Discretization,
                   quadrature: QuadratureMode | None = None) -> float:
    """
    Total discrete energy with exact-quadrature mass actions, or under the
    lumped mass when quadrature is LUMPED.
    """
    return float(element_energies(state, disc, quadrature).sum())
