"""L2 error of the pressure against an analytic field, by cubature."""
import numpy as np

from apps.geometry.mapping import tet_barycentrics
from apps.reference.elements import WedgeRef, triangle_barycentrics
from apps.reference.quadrature import tet_cubature, wedge_cubature
from apps.solver.discretization import Discretization
from apps.solver.state import SolutionState


def _cubature_order(degree: int) -> int:
    # a q-point rule is exact to 2q - 1 >= 2N + 2
    return degree + 2


def l2_error(state: SolutionState, disc: Discretization, field, t: float | None = None) -> float:
    """
    sqrt(sum_k int (p_h - p)^2 J), with p evaluated at the cubature points
    of every element.
    """
    t = state.time if t is None else t
    q = _cubature_order(disc.degree)
    total = 0.0

    if disc.num_wedges:
        points, weights = wedge_cubature(q)
        interp = disc.refs.wedge.interpolation_matrix(points)
        shape = WedgeRef.vertex_functions(points[:, 0], points[:, 1], points[:, 2])
        vertices = disc.mesh.vertices[disc.mesh.wedges]
        xyz = np.einsum('mv,kvd->kmd', shape, vertices)
        jac = disc.J_vertices @ triangle_barycentrics(points[:, 0], points[:, 1]).T
        exact = field(xyz[..., 0], xyz[..., 1], xyz[..., 2], t)[0]
        diff = state.wedge[0] @ interp.T - exact
        total += float(np.sum(weights[None, :] * jac * diff ** 2))

    if disc.num_tets:
        points, weights = tet_cubature(q)
        interp = disc.refs.tet.interpolation_matrix(points)
        vertices = disc.mesh.vertices[disc.mesh.tets]
        xyz = np.einsum('mv,kvd->kmd', tet_barycentrics(points), vertices)
        exact = field(xyz[..., 0], xyz[..., 1], xyz[..., 2], t)[0]
        diff = state.tet[0] @ interp.T - exact
        total += float(np.sum(weights[None, :] * disc.tet_J[:, None] * diff ** 2))

    return float(np.sqrt(total))
