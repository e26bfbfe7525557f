"""
Kronecker-factored operators for vertically mapped wedges.

A wedge field is held as an (Np_tri, N+1) array U with U[i, j] the value at
triangle node i and interval node j, so (A kron B) vec(U) = A U B^T. Per
element only the triangular lift Ltri = (M_tri)^-1 Mhat_tri, three
Np_tri x (N+1) quad lift blocks and O(N) scalars are stored:

    D_x = (r_x Dr + s_x Ds) kron I + Ltri kron diag(t_x J) Dt
    D_y = (r_y Dr + s_y Ds) kron I + Ltri kron diag(t_y J) Dt
    D_z = Ltri kron t_z J Dt
    L_tri-face = J_f Ltri kron (M1D)^-1 e
    L_quad-face = (M_tri)^-1 M_edge kron I

All arrays carry a leading element axis so that a stack of wedges is applied
with one batched matmul.
"""
import logging
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from apps.core.exceptions import OperatorError
from apps.core.parallel import map_parallel
from apps.geometry.factors import ElementGeometry
from apps.reference.elements import References

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WedgeOperators:
    refs: References
    Ltri: np.ndarray  # (K, Nt, Nt)
    quad_lift_blocks: np.ndarray  # (K, 3, Nt, N+1), columns follow edge node order
    Jf_tri: np.ndarray  # (K, 2) bottom, top
    rx: np.ndarray  # (K,)
    ry: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    tzJ: np.ndarray
    txJ_t: np.ndarray  # (K, N+1)
    tyJ_t: np.ndarray

    @property
    def degree(self) -> int:
        return self.refs.degree

    @property
    def num_elements(self) -> int:
        return len(self.Ltri)

    @property
    def lift_1d(self) -> np.ndarray:
        """(2, N+1) t-profiles of the bottom and top triangular-face lifts."""
        line = self.refs.interval
        return np.stack([line.lift_bottom, line.lift_top])

    def __getitem__(self, index: slice) -> 'WedgeOperators':
        """Operators of a contiguous range of elements (views, no copies)."""
        if not isinstance(index, slice):
            index = slice(index, index + 1)
        sliced = {
            f.name: getattr(self, f.name)[index]
            for f in fields(self)
            if f.name != 'refs'
        }
        return replace(self, **sliced)

    def floats_per_element(self) -> int:
        """Stored floats per wedge; reference matrices are shared and not counted."""
        if self.num_elements == 0:
            return 0
        total = sum(getattr(self, f.name).size for f in fields(WedgeOperators) if f.name != 'refs')
        return total // self.num_elements


def _factor(mass: np.ndarray, element_id):
    try:
        return cho_factor(mass)
    except LinAlgError as exc:
        raise OperatorError(f"element {element_id}: weighted triangle mass is not positive definite") from exc


def weighted_triangle_mass(geometry: ElementGeometry, refs: References) -> np.ndarray:
    """M_tri with entries int l_i l_j J(r, s); exact since J is affine in (r, s)."""
    return np.einsum('v,vab->ab', geometry.J_vertices, refs.triangle.vertex_weighted_mass)


def edge_mass(geometry: ElementGeometry, refs: References, edge: int) -> np.ndarray:
    """Edge mass weighted by the (linear) quad-face Jacobian, in edge node order."""
    jf = geometry.faces.jacobians[2 + edge]
    weighted = refs.interval.endpoint_weighted_mass
    return jf[0] * weighted[0] + jf[-1] * weighted[1]


def _element_arrays(geometry: ElementGeometry, refs: References) -> dict:
    tri = refs.triangle
    nt, n1 = tri.num_nodes, refs.degree + 1
    factor = _factor(weighted_triangle_mass(geometry, refs), geometry.element_id)

    blocks = np.empty((3, nt, n1))
    for edge in range(3):
        rhs = np.zeros((nt, n1))
        rhs[tri.edge_nodes[edge]] = edge_mass(geometry, refs, edge)
        blocks[edge] = cho_solve(factor, rhs)

    return dict(
        Ltri=cho_solve(factor, tri.mass),
        quad_lift_blocks=blocks,
        Jf_tri=np.array([geometry.faces.jacobians[0], geometry.faces.jacobians[1]]),
        rx=geometry.rx,
        ry=geometry.ry,
        sx=geometry.sx,
        sy=geometry.sy,
        tzJ=geometry.tzJ,
        txJ_t=geometry.txJ_t,
        tyJ_t=geometry.tyJ_t,
    )


def stack_arrays(per_element: list[dict], refs: References, cls=None, **extra):
    cls = cls or WedgeOperators
    nt, n1 = refs.triangle.num_nodes, refs.degree + 1
    shapes = {
        'Ltri': (nt, nt), 'quad_lift_blocks': (3, nt, n1), 'Jf_tri': (2,),
        'rx': (), 'ry': (), 'sx': (), 'sy': (), 'tzJ': (), 'txJ_t': (n1,), 'tyJ_t': (n1,),
    }
    stacked = {
        name: (np.array([d[name] for d in per_element], dtype=float)
               if per_element else np.zeros((0,) + shape))
        for name, shape in shapes.items()
    }
    return cls(refs=refs, **stacked, **extra)


def build_wedge_operators(geometry: ElementGeometry, refs: References) -> WedgeOperators:
    """Operators of one wedge (leading axis of length 1)."""
    return stack_arrays([_element_arrays(geometry, refs)], refs)


def build_all_wedge_operators(geometries: list[ElementGeometry], refs: References, threads=None) -> WedgeOperators:
    per_element = map_parallel(lambda k: _element_arrays(geometries[k], refs), len(geometries), threads)
    ops = stack_arrays(per_element, refs)
    logger.info("Built operators for %d wedges, %d floats each", ops.num_elements, ops.floats_per_element())
    return ops


def _as_blocks(ops: WedgeOperators, u: np.ndarray) -> np.ndarray:
    n1 = ops.degree + 1
    return np.asarray(u, dtype=float).reshape(ops.num_elements, -1, n1)


def apply_wedge_derivatives(ops: WedgeOperators, u: np.ndarray):
    """(du/dx, du/dy, du/dz) for u of shape (K, Np) or (Np,) when K == 1."""
    shape = np.shape(u)
    U = _as_blocks(ops, u)
    tri, line = ops.refs.triangle, ops.refs.interval
    ur = np.matmul(tri.Dr, U)
    us = np.matmul(tri.Ds, U)
    ut = np.matmul(U, line.Dt.T)
    lt = np.matmul(ops.Ltri, ut)

    def scale(a):
        return a[:, None, None]

    dx = scale(ops.rx) * ur + scale(ops.sx) * us + np.matmul(ops.Ltri, ut * ops.txJ_t[:, None, :])
    dy = scale(ops.ry) * ur + scale(ops.sy) * us + np.matmul(ops.Ltri, ut * ops.tyJ_t[:, None, :])
    dz = scale(ops.tzJ) * lt
    return dx.reshape(shape), dy.reshape(shape), dz.reshape(shape)


def apply_wedge_divergence(ops: WedgeOperators, ux, uy, uz) -> np.ndarray:
    """D_x ux + D_y uy + D_z uz with a single Ltri product."""
    shape = np.shape(ux)
    Ux, Uy, Uz = (_as_blocks(ops, v) for v in (ux, uy, uz))
    tri, dt_t = ops.refs.triangle, ops.refs.interval.Dt.T

    def scale(a):
        return a[:, None, None]

    planar = (
        np.matmul(tri.Dr, scale(ops.rx) * Ux + scale(ops.ry) * Uy)
        + np.matmul(tri.Ds, scale(ops.sx) * Ux + scale(ops.sy) * Uy)
    )
    vertical = (
        np.matmul(Ux, dt_t) * ops.txJ_t[:, None, :]
        + np.matmul(Uy, dt_t) * ops.tyJ_t[:, None, :]
        + scale(ops.tzJ) * np.matmul(Uz, dt_t)
    )
    return (planar + np.matmul(ops.Ltri, vertical)).reshape(shape)


def apply_wedge_lift(ops: WedgeOperators, fluxes) -> np.ndarray:
    """
    Lift per-face flux values to a volume field (K, Np).

    fluxes: five arrays (K, Nfp) in face-node order: bottom and top with Np_tri
    values, quads with (N+1)^2 values ordered edge node major, slice minor.
    """
    k, n1 = ops.num_elements, ops.degree + 1
    profiles = ops.lift_1d
    out = np.zeros((k, ops.refs.triangle.num_nodes, n1))
    for face in (0, 1):
        g = np.asarray(fluxes[face], dtype=float).reshape(k, -1, 1)
        lifted = ops.Jf_tri[:, face, None, None] * np.matmul(ops.Ltri, g)
        out += lifted * profiles[face][None, None, :]
    for edge in range(3):
        f = np.asarray(fluxes[2 + edge], dtype=float).reshape(k, n1, n1)
        out += np.matmul(ops.quad_lift_blocks[:, edge], f)
    return out.reshape(k, -1)

