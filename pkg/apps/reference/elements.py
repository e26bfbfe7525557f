"""
Reference elements: interval, triangle, wedge (triangle x interval) and
tetrahedron, with their nodal matrices.

Node orderings:
    wedge node (i, j) = triangle node i at interval node j, flat id i*(N+1) + j
    wedge faces: 0 bottom (t=-1), 1 top (t=+1), 2..4 quads over triangle edges 0..2
    tet faces:   0 (t=-1), 1 (s=-1), 2 (r+s+t=-1), 3 (r=-1)
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from django.conf import settings

from apps.core.exceptions import ConfigurationError
from . import nodes as node_sets
from .polynomials import (
    grad_vandermonde_1d,
    grad_vandermonde_2d,
    grad_vandermonde_3d,
    vandermonde_1d,
    vandermonde_2d,
    vandermonde_3d,
)
from .quadrature import gauss_legendre, gauss_lobatto, tet_cubature, triangle_cubature

logger = logging.getLogger(__name__)

ON_FACE_TOL = 1e-10

# Triangle edges as (first vertex, second vertex), vertices numbered 0..2.
TRIANGLE_EDGES = ((0, 1), (1, 2), (2, 0))

# Wedge faces as vertex tuples (0..5); quads listed around the face.
WEDGE_FACE_VERTICES = (
    (0, 1, 2),
    (3, 4, 5),
    (0, 1, 4, 3),
    (1, 2, 5, 4),
    (2, 0, 3, 5),
)

TET_FACE_VERTICES = (
    (0, 1, 2),
    (0, 1, 3),
    (1, 2, 3),
    (0, 2, 3),
)

WEDGE_VERTICES = np.array([
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
])


def check_degree(n: int) -> int:
    max_degree = getattr(settings, 'WAVEDG_MAX_DEGREE', 9)
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= max_degree:
        raise ConfigurationError(f"degree must be an integer in [1, {max_degree}], got {n!r}")
    return int(n)


def triangle_barycentrics(r, s) -> np.ndarray:
    """(..., 3) barycentric coordinates for the bi-unit triangle vertices."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.stack([-(r + s) / 2, (1 + r) / 2, (1 + s) / 2], axis=-1)


def mass_from_interpolation(interp: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Mass matrix of the nodal basis given its values at quadrature points."""
    mass = interp.T @ (weights[:, None] * interp)
    return 0.5 * (mass + mass.T)


@dataclass(frozen=True, eq=False)
class Interval1D:
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    vandermonde: np.ndarray
    Dt: np.ndarray
    mass: np.ndarray
    # (2, N+1, N+1): mass weighted by (1-t)/2 and (1+t)/2
    endpoint_weighted_mass: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.degree + 1

    def interpolation_matrix(self, x) -> np.ndarray:
        return np.linalg.solve(self.vandermonde.T, vandermonde_1d(self.degree, x).T).T

    def derivative_matrix_at(self, x) -> np.ndarray:
        return np.linalg.solve(self.vandermonde.T, grad_vandermonde_1d(self.degree, x).T).T

    @cached_property
    def lift_bottom(self) -> np.ndarray:
        """(M1D)^-1 e_0."""
        e = np.zeros(self.num_nodes)
        e[0] = 1.0
        return np.linalg.solve(self.mass, e)

    @cached_property
    def lift_top(self) -> np.ndarray:
        """(M1D)^-1 e_N."""
        e = np.zeros(self.num_nodes)
        e[-1] = 1.0
        return np.linalg.solve(self.mass, e)


@dataclass(frozen=True, eq=False)
class TriangleRef:
    degree: int
    nodes: np.ndarray  # (Np, 2)
    vandermonde: np.ndarray
    Dr: np.ndarray
    Ds: np.ndarray
    mass: np.ndarray
    cubature_points: np.ndarray
    cubature_weights: np.ndarray
    # (3, N+1) node ids along each edge, ordered from first to second vertex
    edge_nodes: np.ndarray
    # (3, Np, Np): mass weighted by each vertex barycentric
    vertex_weighted_mass: np.ndarray

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def r(self) -> np.ndarray:
        return self.nodes[:, 0]

    @property
    def s(self) -> np.ndarray:
        return self.nodes[:, 1]

    def interpolation_matrix(self, r, s) -> np.ndarray:
        return np.linalg.solve(self.vandermonde.T, vandermonde_2d(self.degree, r, s).T).T

    def gradient_interpolation(self, r, s) -> tuple[np.ndarray, np.ndarray]:
        vr, vs = grad_vandermonde_2d(self.degree, r, s)
        inv_t = self.vandermonde.T
        return np.linalg.solve(inv_t, vr.T).T, np.linalg.solve(inv_t, vs.T).T

    def edge_points(self, edge: int, rho) -> np.ndarray:
        """Reference (r, s) of edge parameter rho in [-1, 1]."""
        a, b = TRIANGLE_EDGES[edge]
        rho = np.asarray(rho, dtype=float)[..., None]
        va = node_sets.TRIANGLE_VERTICES[a]
        vb = node_sets.TRIANGLE_VERTICES[b]
        return 0.5 * (1 - rho) * va + 0.5 * (1 + rho) * vb


@dataclass(frozen=True, eq=False)
class WedgeRef:
    degree: int
    triangle: TriangleRef
    interval: Interval1D

    @property
    def num_nodes(self) -> int:
        return self.triangle.num_nodes * self.interval.num_nodes

    def node_index(self, i, j):
        return np.asarray(i) * (self.degree + 1) + np.asarray(j)

    def node_pair(self, flat):
        return divmod(np.asarray(flat), self.degree + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        """(Np, 3) reference coordinates, flat id order."""
        tri = self.triangle.nodes
        t = self.interval.nodes
        return np.column_stack([
            np.repeat(tri[:, 0], len(t)),
            np.repeat(tri[:, 1], len(t)),
            np.tile(t, len(tri)),
        ])

    @cached_property
    def face_nodes(self) -> tuple[np.ndarray, ...]:
        """Flat node ids per face. Quad faces are ordered edge node major, slice minor."""
        n = self.degree
        tri_ids = np.arange(self.triangle.num_nodes)
        slices = np.arange(n + 1)
        faces = [self.node_index(tri_ids, 0), self.node_index(tri_ids, n)]
        for edge in range(3):
            edge_ids = self.triangle.edge_nodes[edge]
            faces.append(self.node_index(edge_ids[:, None], slices[None, :]).ravel())
        return tuple(np.asarray(f, dtype=int) for f in faces)

    @staticmethod
    def vertex_functions(r, s, t) -> np.ndarray:
        """(..., 6) bilinear vertex functions; bottom vertices first."""
        lam = triangle_barycentrics(r, s)
        t = np.asarray(t, dtype=float)[..., None]
        return np.concatenate([lam * 0.5 * (1 - t), lam * 0.5 * (1 + t)], axis=-1)

    def interpolation_matrix(self, points: np.ndarray) -> np.ndarray:
        """Values of every nodal basis function at reference points (m, 3)."""
        tri = self.triangle.interpolation_matrix(points[:, 0], points[:, 1])
        line = self.interval.interpolation_matrix(points[:, 2])
        return (tri[:, :, None] * line[:, None, :]).reshape(len(points), -1)

    def gradient_interpolation(self, points: np.ndarray):
        tri = self.triangle.interpolation_matrix(points[:, 0], points[:, 1])
        tri_r, tri_s = self.triangle.gradient_interpolation(points[:, 0], points[:, 1])
        line = self.interval.interpolation_matrix(points[:, 2])
        line_t = self.interval.derivative_matrix_at(points[:, 2])
        m = len(points)
        return (
            (tri_r[:, :, None] * line[:, None, :]).reshape(m, -1),
            (tri_s[:, :, None] * line[:, None, :]).reshape(m, -1),
            (tri[:, :, None] * line_t[:, None, :]).reshape(m, -1),
        )


@dataclass(frozen=True, eq=False)
class TetRef:
    degree: int
    nodes: np.ndarray  # (Np, 3)
    vandermonde: np.ndarray
    Dr: np.ndarray
    Ds: np.ndarray
    Dt: np.ndarray
    mass: np.ndarray
    cubature_points: np.ndarray
    cubature_weights: np.ndarray
    face_nodes: np.ndarray  # (4, Nfp)
    face_coordinates: np.ndarray  # (4, Nfp, 2) in-face triangle coordinates
    face_mass: np.ndarray  # (4, Nfp, Nfp)
    lift: np.ndarray  # (Np, 4*Nfp)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_face_nodes(self) -> int:
        return self.face_nodes.shape[1]

    def interpolation_matrix(self, points: np.ndarray) -> np.ndarray:
        v = vandermonde_3d(self.degree, points[:, 0], points[:, 1], points[:, 2])
        return np.linalg.solve(self.vandermonde.T, v.T).T

    def gradient_interpolation(self, points: np.ndarray):
        grads = grad_vandermonde_3d(self.degree, points[:, 0], points[:, 1], points[:, 2])
        return tuple(np.linalg.solve(self.vandermonde.T, g.T).T for g in grads)


@dataclass(frozen=True, eq=False)
class References:
    """Every reference element at one degree."""
    degree: int
    interval: Interval1D
    triangle: TriangleRef
    wedge: WedgeRef
    tet: TetRef


def build_interval(n: int) -> Interval1D:
    n = check_degree(n)
    t, w = gauss_lobatto(n)
    v = vandermonde_1d(n, t)
    vr = grad_vandermonde_1d(n, t)
    dt = np.linalg.solve(v.T, vr.T).T

    xq, wq = gauss_legendre(n + 2)
    interp = np.linalg.solve(v.T, vandermonde_1d(n, xq).T).T
    mass = mass_from_interpolation(interp, wq)
    endpoint = np.stack([
        mass_from_interpolation(interp, wq * 0.5 * (1 - xq)),
        mass_from_interpolation(interp, wq * 0.5 * (1 + xq)),
    ])
    return Interval1D(
        degree=n, nodes=t, weights=w, vandermonde=v, Dt=dt, mass=mass,
        endpoint_weighted_mass=endpoint,
    )


def _edge_node_lists(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    edge0 = np.flatnonzero(np.abs(1 + s) < ON_FACE_TOL)
    edge0 = edge0[np.argsort(r[edge0])]
    edge1 = np.flatnonzero(np.abs(r + s) < ON_FACE_TOL)
    edge1 = edge1[np.argsort(-r[edge1])]
    edge2 = np.flatnonzero(np.abs(1 + r) < ON_FACE_TOL)
    edge2 = edge2[np.argsort(-s[edge2])]
    return np.array([edge0, edge1, edge2])


def build_triangle(n: int) -> TriangleRef:
    n = check_degree(n)
    xy = node_sets.triangle_nodes(n)
    r, s = xy[:, 0], xy[:, 1]
    v = vandermonde_2d(n, r, s)
    vr, vs = grad_vandermonde_2d(n, r, s)
    dr = np.linalg.solve(v.T, vr.T).T
    ds = np.linalg.solve(v.T, vs.T).T

    points, weights = triangle_cubature(n + 2)
    interp = np.linalg.solve(v.T, vandermonde_2d(n, points[:, 0], points[:, 1]).T).T
    mass = mass_from_interpolation(interp, weights)
    lam = triangle_barycentrics(points[:, 0], points[:, 1])
    weighted = np.stack([mass_from_interpolation(interp, weights * lam[:, k]) for k in range(3)])

    edges = _edge_node_lists(r, s)
    if edges.shape != (3, n + 1):
        raise ConfigurationError(f"triangle node set at degree {n} has malformed edges")

    logger.debug("Triangle N=%d: Vandermonde condition %.3e", n, np.linalg.cond(v))
    return TriangleRef(
        degree=n, nodes=xy, vandermonde=v, Dr=dr, Ds=ds, mass=mass,
        cubature_points=points, cubature_weights=weights,
        edge_nodes=edges, vertex_weighted_mass=weighted,
    )


def build_wedge_ref(n: int) -> WedgeRef:
    return WedgeRef(degree=check_degree(n), triangle=build_triangle(n), interval=build_interval(n))


def _tet_barycentrics(nodes: np.ndarray) -> np.ndarray:
    r, s, t = nodes[:, 0], nodes[:, 1], nodes[:, 2]
    return np.column_stack([-(1 + r + s + t) / 2, (1 + r) / 2, (1 + s) / 2, (1 + t) / 2])


def build_tet_ref(n: int) -> TetRef:
    n = check_degree(n)
    xyz = node_sets.tet_nodes(n)
    r, s, t = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    v = vandermonde_3d(n, r, s, t)
    vr, vs, vt = grad_vandermonde_3d(n, r, s, t)
    dr = np.linalg.solve(v.T, vr.T).T
    ds = np.linalg.solve(v.T, vs.T).T
    dt = np.linalg.solve(v.T, vt.T).T

    points, weights = tet_cubature(n + 2)
    interp = np.linalg.solve(v.T, vandermonde_3d(n, points[:, 0], points[:, 1], points[:, 2]).T).T
    mass = mass_from_interpolation(interp, weights)

    lam = _tet_barycentrics(xyz)
    tri_points, tri_weights = triangle_cubature(n + 2)
    face_nodes, face_coords, face_mass = [], [], []
    for f, (a, b, c) in enumerate(TET_FACE_VERTICES):
        opposite = ({0, 1, 2, 3} - {a, b, c}).pop()
        ids = np.flatnonzero(np.abs(lam[:, opposite]) < ON_FACE_TOL)
        coords = np.column_stack([2 * lam[ids, b] - 1, 2 * lam[ids, c] - 1])
        v_face = vandermonde_2d(n, coords[:, 0], coords[:, 1])
        face_interp = np.linalg.solve(
            v_face.T, vandermonde_2d(n, tri_points[:, 0], tri_points[:, 1]).T).T
        face_nodes.append(ids)
        face_coords.append(coords)
        face_mass.append(mass_from_interpolation(face_interp, tri_weights))

    face_nodes = np.array(face_nodes)
    nfp = face_nodes.shape[1]
    if nfp != (n + 1) * (n + 2) // 2:
        raise ConfigurationError(f"tetrahedron node set at degree {n} has malformed faces")

    emat = np.zeros((len(xyz), 4 * nfp))
    for f in range(4):
        emat[face_nodes[f], f * nfp:(f + 1) * nfp] = face_mass[f]
    lift = np.linalg.solve(mass, emat)

    logger.info("Tetrahedron N=%d: Vandermonde condition %.3e", n, np.linalg.cond(v))
    return TetRef(
        degree=n, nodes=xyz, vandermonde=v, Dr=dr, Ds=ds, Dt=dt, mass=mass,
        cubature_points=points, cubature_weights=weights,
        face_nodes=face_nodes, face_coordinates=np.array(face_coords),
        face_mass=np.array(face_mass), lift=lift,
    )


@lru_cache(maxsize=16)
def build_references(n: int) -> References:
    """Cached bundle of every reference element at degree n."""
    n = check_degree(n)
    wedge = build_wedge_ref(n)
    return References(
        degree=n, interval=wedge.interval, triangle=wedge.triangle,
        wedge=wedge, tet=build_tet_ref(n),
    )
