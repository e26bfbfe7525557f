"""
Geometric factors, Jacobians, face Jacobians and outward normals.

For a vertically mapped wedge x and y depend on (r, s) only and z is linear in
t along each vertical edge, so

    r_x, r_y, s_x, s_y and t_z J are constant on the element,
    J and the quad-face Jacobians are constant in t,
    t_x J and t_y J are linear in t.

Reference volumes: wedge 4, tetrahedron 4/3, triangle 2. Face Jacobians map
the reference triangle (area 2) or the reference square (area 4).
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.exceptions import GeometryError
from apps.core.parallel import map_parallel
from apps.mesh.hybrid import ElementKind, HybridMesh
from apps.reference.elements import (
    TET_FACE_VERTICES,
    TRIANGLE_EDGES,
    WEDGE_FACE_VERTICES,
    References,
    triangle_barycentrics,
)

logger = logging.getLogger(__name__)

TET_REFERENCE_VOLUME = 4.0 / 3.0
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FaceGeometry:
    """Per-face outward unit normals (nf, 3), Jacobians and areas."""
    normals: np.ndarray
    # scalar for triangular faces, (N+1,) edge-node values for quad faces
    jacobians: tuple
    areas: np.ndarray

    def jacobian_at_face_nodes(self, face: int, num_slices: int | None = None) -> np.ndarray:
        """J_f at each face node in face-node order."""
        jf = np.asarray(self.jacobians[face], dtype=float)
        if jf.ndim == 0:
            return jf
        return np.repeat(jf, num_slices)


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    kind: ElementKind
    degree: int
    vertices: np.ndarray
    element_id: int | None = None
    # wedge
    rx: float = 0.0
    ry: float = 0.0
    sx: float = 0.0
    sy: float = 0.0
    tzJ: float = 0.0
    txJ_t: np.ndarray | None = None
    tyJ_t: np.ndarray | None = None
    J_tri: np.ndarray | None = None
    J_vertices: np.ndarray | None = None
    # tet: rows (r, s, t), columns (x, y, z)
    factors: np.ndarray | None = None
    J: float | None = None
    # reference edge/GLL data kept for face Jacobians
    gll_nodes: np.ndarray | None = None

    @property
    def is_wedge(self) -> bool:
        return self.kind is ElementKind.WEDGE

    @cached_property
    def faces(self) -> FaceGeometry:
        return face_normals_and_jacobians(self)

    @property
    def volume(self) -> float:
        if self.is_wedge:
            return float(4.0 * self.J_vertices.mean())
        return float(self.J * TET_REFERENCE_VOLUME)

    @property
    def surface_area(self) -> float:
        return float(self.faces.areas.sum())

    @property
    def size(self) -> float:
        """Volume over surface area."""
        return self.volume / self.surface_area

    @property
    def min_jacobian(self) -> float:
        return float(self.J_vertices.min()) if self.is_wedge else float(self.J)

    @property
    def max_jacobian(self) -> float:
        return float(self.J_vertices.max()) if self.is_wedge else float(self.J)


def wedge_geometry(vertices: np.ndarray, refs: References, element_id: int | None = None) -> ElementGeometry:
    """Closed-form factors of a vertically mapped wedge."""
    vertices = np.asarray(vertices, dtype=float)
    bottom, top = vertices[:3], vertices[3:]
    x, y = bottom[:, 0], bottom[:, 1]
    xr, xs = (x[1] - x[0]) / 2, (x[2] - x[0]) / 2
    yr, ys = (y[1] - y[0]) / 2, (y[2] - y[0]) / 2
    area2 = xr * ys - xs * yr
    heights = top[:, 2] - bottom[:, 2]

    j_vertices = area2 * heights / 2
    scale = np.ptp(vertices, axis=0).max()
    if not np.all(j_vertices > DEGENERACY_TOL * scale ** 3):
        raise GeometryError(f"non-positive Jacobian {j_vertices.min():.3e}", element=element_id)

    tri = refs.triangle
    j_tri = triangle_barycentrics(tri.r, tri.s) @ j_vertices

    t = refs.interval.nodes
    zb, zt = bottom[:, 2], top[:, 2]
    lower, upper = (1 - t) / 2, (1 + t) / 2
    zr = lower * (zb[1] - zb[0]) / 2 + upper * (zt[1] - zt[0]) / 2
    zs = lower * (zb[2] - zb[0]) / 2 + upper * (zt[2] - zt[0]) / 2

    return ElementGeometry(
        kind=ElementKind.WEDGE,
        degree=refs.degree,
        vertices=vertices,
        element_id=element_id,
        rx=ys / area2,
        ry=-xs / area2,
        sx=-yr / area2,
        sy=xr / area2,
        tzJ=area2,
        txJ_t=yr * zs - zr * ys,
        tyJ_t=zr * xs - xr * zs,
        J_tri=j_tri,
        J_vertices=j_vertices,
        gll_nodes=t,
    )


def tet_geometry(vertices: np.ndarray, refs: References, element_id: int | None = None) -> ElementGeometry:
    vertices = np.asarray(vertices, dtype=float)
    jac = np.column_stack([
        (vertices[1] - vertices[0]) / 2,
        (vertices[2] - vertices[0]) / 2,
        (vertices[3] - vertices[0]) / 2,
    ])
    det = np.linalg.det(jac)
    scale = np.ptp(vertices, axis=0).max()
    if not det > DEGENERACY_TOL * scale ** 3:
        raise GeometryError(f"degenerate tetrahedron, J = {det:.3e}", element=element_id)
    return ElementGeometry(
        kind=ElementKind.TET,
        degree=refs.degree,
        vertices=vertices,
        element_id=element_id,
        factors=np.linalg.inv(jac),
        J=float(det),
    )


def _oriented_normal(normal: np.ndarray, face_points: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    normal = normal / np.linalg.norm(normal)
    if normal @ (face_points.mean(axis=0) - centroid) < 0:
        normal = -normal
    return normal


def _triangle_face(points: np.ndarray, centroid: np.ndarray):
    cross = np.cross(points[1] - points[0], points[2] - points[0])
    area = 0.5 * np.linalg.norm(cross)
    return _oriented_normal(cross, points, centroid), area


def face_normals_and_jacobians(geometry: ElementGeometry) -> FaceGeometry:
    """Outward normals, face Jacobians and face areas."""
    vertices = geometry.vertices
    centroid = vertices.mean(axis=0)
    normals, jacobians, areas = [], [], []

    if not geometry.is_wedge:
        for face in TET_FACE_VERTICES:
            normal, area = _triangle_face(vertices[list(face)], centroid)
            normals.append(normal)
            jacobians.append(area / 2)
            areas.append(area)
        return FaceGeometry(np.array(normals), tuple(jacobians), np.array(areas))

    for face in WEDGE_FACE_VERTICES[:2]:
        normal, area = _triangle_face(vertices[list(face)], centroid)
        normals.append(normal)
        jacobians.append(area / 2)
        areas.append(area)

    heights = vertices[3:, 2] - vertices[:3, 2]
    rho = geometry.gll_nodes
    for face, (a, b) in zip(WEDGE_FACE_VERTICES[2:], TRIANGLE_EDGES):
        d = vertices[b, :2] - vertices[a, :2]
        length = np.hypot(*d)
        normal = np.array([d[1], -d[0], 0.0])
        normals.append(_oriented_normal(normal, vertices[list(face)], centroid))
        h = heights[a] * (1 - rho) / 2 + heights[b] * (1 + rho) / 2
        jacobians.append(length / 2 * h / 2)
        areas.append(length * (heights[a] + heights[b]) / 2)

    jf = np.array([np.min(j) for j in jacobians])
    if not np.all(jf > 0):
        raise GeometryError("non-positive face Jacobian", element=geometry.element_id)
    return FaceGeometry(np.array(normals), tuple(jacobians), np.array(areas))


def element_geometry(mesh: HybridMesh, refs: References, element: int) -> ElementGeometry:
    vertices = mesh.element_vertices(element)
    if element < mesh.num_wedges:
        return wedge_geometry(vertices, refs, element_id=element)
    return tet_geometry(vertices, refs, element_id=element)


def build_geometries(mesh: HybridMesh, refs: References, threads: int | None = None) -> list[ElementGeometry]:
    """Geometry of every element, in element order."""
    geometries = map_parallel(lambda e: element_geometry(mesh, refs, e), mesh.num_elements, threads)
    jmin = min(g.min_jacobian for g in geometries) if geometries else 0.0
    jmax = max(g.max_jacobian for g in geometries) if geometries else 0.0
    logger.info("Geometry for %d elements: J in [%.6g, %.6g]", len(geometries), jmin, jmax)
    return geometries


def mesh_volume(geometries: list[ElementGeometry]) -> float:
    return float(sum(g.volume for g in geometries))
