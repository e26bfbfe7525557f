"""
Hybrid wedge/tetrahedron mesh.

Vertex ordering for wedges is (bottom v1, v2, v3; top v4, v5, v6) with the
bottom triangle counterclockwise seen from above; top vertex k+3 sits
vertically above bottom vertex k. Elements are numbered wedges first, then
tetrahedra.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from apps.core.exceptions import GeometryError, MeshError

logger = logging.getLogger(__name__)

# Relative tolerance of the vertically mapped predicate.
VERTICAL_TOL = 1e-12


class ElementKind(Enum):
    """Element shapes."""
    WEDGE = 'wedge'
    TET = 'tet'


class BoundaryTag(Enum):
    """Boundary conditions available on unmatched faces."""
    REFLECT = 'reflect'


def _signed_area_xy(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def is_vertically_mapped(coords) -> bool:
    """True when the six wedge vertices pair up vertically and enclose volume."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (6, 3):
        return False
    if len({tuple(row) for row in coords}) < 6:
        return False
    scale = np.ptp(coords, axis=0).max()
    if scale == 0.0:
        return False
    if np.abs(coords[:3, :2] - coords[3:, :2]).max() > VERTICAL_TOL * scale:
        return False
    area = _signed_area_xy(*coords[:3])
    if abs(area) <= VERTICAL_TOL * scale ** 2:
        return False
    heights = coords[3:, 2] - coords[:3, 2]
    return bool(np.all(heights > VERTICAL_TOL * scale) or np.all(heights < -VERTICAL_TOL * scale))


@dataclass(eq=False)
class HybridMesh:
    """Vertices, element connectivity and per-element media."""
    vertices: np.ndarray  # (nv, 3)
    wedges: np.ndarray  # (Kw, 6)
    tets: np.ndarray  # (Kt, 4)
    rho: np.ndarray  # (K,)
    kappa: np.ndarray  # (K,)
    regions: np.ndarray  # (K,)
    # (element, face) -> boundary tag for unmatched faces; unlisted faces reflect
    boundary_tags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.wedges = np.asarray(self.wedges, dtype=np.int64).reshape(-1, 6)
        self.tets = np.asarray(self.tets, dtype=np.int64).reshape(-1, 4)
        k = self.num_elements
        self.rho = np.broadcast_to(np.asarray(self.rho, dtype=float), (k,)).copy()
        self.kappa = np.broadcast_to(np.asarray(self.kappa, dtype=float), (k,)).copy()
        self.regions = np.broadcast_to(np.asarray(self.regions, dtype=np.int64), (k,)).copy()

    @property
    def num_wedges(self) -> int:
        return len(self.wedges)

    @property
    def num_tets(self) -> int:
        return len(self.tets)

    @property
    def num_elements(self) -> int:
        return self.num_wedges + self.num_tets

    @property
    def wavespeed(self) -> np.ndarray:
        return np.sqrt(self.kappa / self.rho)

    @property
    def impedance(self) -> np.ndarray:
        """rho * c per element."""
        return np.sqrt(self.kappa * self.rho)

    def kind(self, element: int) -> ElementKind:
        return ElementKind.WEDGE if element < self.num_wedges else ElementKind.TET

    def element_vertex_ids(self, element: int) -> np.ndarray:
        if element < self.num_wedges:
            return self.wedges[element]
        return self.tets[element - self.num_wedges]

    def element_vertices(self, element: int) -> np.ndarray:
        return self.vertices[self.element_vertex_ids(element)]

    def num_faces(self, element: int) -> int:
        return 5 if element < self.num_wedges else 4

    def boundary_tag(self, element: int, face: int) -> BoundaryTag:
        return BoundaryTag(self.boundary_tags.get((element, face), BoundaryTag.REFLECT.value))

    def with_vertices(self, vertices: np.ndarray) -> 'HybridMesh':
        return replace(self, vertices=np.array(vertices, dtype=float), boundary_tags=dict(self.boundary_tags))

    def diameter(self) -> float:
        return float(np.linalg.norm(np.ptp(self.vertices, axis=0)))

    def same_as(self, other: 'HybridMesh') -> bool:
        """Bitwise equality of all arrays and tags."""
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.wedges, other.wedges)
            and np.array_equal(self.tets, other.tets)
            and np.array_equal(self.rho, other.rho)
            and np.array_equal(self.kappa, other.kappa)
            and np.array_equal(self.regions, other.regions)
            and self.boundary_tags == other.boundary_tags
        )

    def validate(self) -> 'HybridMesh':
        """Check indices, media, the vertically mapped predicate and orientation."""
        nv = len(self.vertices)
        for name, cells in (('wedge', self.wedges), ('tet', self.tets)):
            if cells.size and (cells.min() < 0 or cells.max() >= nv):
                raise MeshError(f"{name} references a vertex outside 1..{nv}")
        if not np.all(np.isfinite(self.vertices)):
            raise MeshError("vertex coordinates must be finite")

        for name, values in (('rho', self.rho), ('kappa', self.kappa)):
            bad = np.flatnonzero(~(values > 0))
            if bad.size:
                raise MeshError(f"element {bad[0]}: {name} must be positive, got {values[bad[0]]}")

        for e, ids in enumerate(self.wedges):
            coords = self.vertices[ids]
            if not is_vertically_mapped(coords):
                raise MeshError(f"element {e}: wedge is not vertically mapped")
            if _signed_area_xy(*coords[:3]) <= 0 or np.any(coords[3:, 2] <= coords[:3, 2]):
                raise GeometryError("wedge must have a counterclockwise bottom and positive heights", element=e)

        for t, ids in enumerate(self.tets):
            x = self.vertices[ids]
            det = np.linalg.det(np.column_stack([x[1] - x[0], x[2] - x[0], x[3] - x[0]]))
            scale = np.ptp(x, axis=0).max()
            if not det > VERTICAL_TOL * scale ** 3:
                raise GeometryError("tetrahedron has non-positive volume", element=self.num_wedges + t)

        for (element, face), tag in self.boundary_tags.items():
            if not 0 <= element < self.num_elements or not 0 <= face < self.num_faces(element):
                raise MeshError(f"boundary tag on nonexistent face ({element}, {face})")
            if tag not in BoundaryTag._value2member_map_:
                raise MeshError(f"unknown boundary tag {tag!r} on face ({element}, {face})")
        return self

    def summary(self) -> str:
        return f"{self.num_wedges} wedges, {self.num_tets} tets, {len(self.vertices)} vertices"
