"""
Face-to-face connectivity with node matching.

Faces are keyed by their sorted vertex ids; matched faces get a node map
sending each of my face nodes to the neighbor's volume node id.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy.spatial.distance import cdist

from apps.core.exceptions import ConnectivityError
from apps.geometry.mapping import element_nodes
from apps.reference.elements import TET_FACE_VERTICES, WEDGE_FACE_VERTICES, References
from .hybrid import HybridMesh

logger = logging.getLogger(__name__)

BOUNDARY = -1
NO_FACE = -2


@dataclass(eq=False)
class Connectivity:
    # (K, 5): neighbor element, BOUNDARY, or NO_FACE for the 5th face of a tet
    neighbor: np.ndarray
    neighbor_face: np.ndarray
    # (element, face) -> neighbor volume node ids in my face-node order
    node_maps: dict = field(default_factory=dict)
    # (element, face) -> boundary tag value
    boundary_tags: dict = field(default_factory=dict)

    def is_boundary(self, element: int, face: int) -> bool:
        return self.neighbor[element, face] == BOUNDARY

    def partner(self, element: int, face: int) -> tuple[int, int]:
        return int(self.neighbor[element, face]), int(self.neighbor_face[element, face])

    @property
    def num_interior_faces(self) -> int:
        return int((self.neighbor >= 0).sum()) // 2

    @property
    def num_boundary_faces(self) -> int:
        return int((self.neighbor == BOUNDARY).sum())


def face_vertex_ids(mesh: HybridMesh, element: int, face: int) -> np.ndarray:
    ids = mesh.element_vertex_ids(element)
    table = WEDGE_FACE_VERTICES if element < mesh.num_wedges else TET_FACE_VERTICES
    return ids[list(table[face])]


def face_node_ids(refs: References, mesh: HybridMesh, element: int, face: int) -> np.ndarray:
    if element < mesh.num_wedges:
        return refs.wedge.face_nodes[face]
    return refs.tet.face_nodes[face]


def build_connectivity(mesh: HybridMesh, refs: References) -> Connectivity:
    """Pair faces by shared vertices, then match their nodes by coordinates."""
    k = mesh.num_elements
    neighbor = np.full((k, 5), NO_FACE, dtype=np.int64)
    neighbor_face = np.full((k, 5), NO_FACE, dtype=np.int64)

    owners = defaultdict(list)
    for e in range(k):
        for f in range(mesh.num_faces(e)):
            owners[tuple(sorted(face_vertex_ids(mesh, e, f)))].append((e, f))

    tolerance = getattr(settings, 'WAVEDG_NODE_TOLERANCE', 1e-10)
    coords_cache = {}

    def coords(e):
        if e not in coords_cache:
            coords_cache[e] = element_nodes(mesh, refs, e)
        return coords_cache[e]

    node_maps = {}
    boundary_tags = {}
    for key, faces in owners.items():
        if len(faces) > 2:
            raise ConnectivityError(f"face with vertices {key} is shared by {len(faces)} elements: {faces}")
        if len(faces) == 1:
            e, f = faces[0]
            neighbor[e, f] = BOUNDARY
            neighbor_face[e, f] = BOUNDARY
            boundary_tags[(e, f)] = mesh.boundary_tag(e, f).value
            continue

        (e1, f1), (e2, f2) = faces
        neighbor[e1, f1], neighbor_face[e1, f1] = e2, f2
        neighbor[e2, f2], neighbor_face[e2, f2] = e1, f1
        for (a, fa), (b, fb) in (((e1, f1), (e2, f2)), ((e2, f2), (e1, f1))):
            mine = face_node_ids(refs, mesh, a, fa)
            theirs = face_node_ids(refs, mesh, b, fb)
            distances = cdist(coords(a)[mine], coords(b)[theirs])
            match = distances.argmin(axis=1)
            diameter = np.linalg.norm(np.ptp(mesh.element_vertices(a), axis=0))
            worst = distances[np.arange(len(mine)), match].max()
            if worst > tolerance * diameter or len(np.unique(match)) != len(mine):
                raise ConnectivityError(
                    f"face ({a}, {fa}) does not match face ({b}, {fb}): node distance {worst:.3e}")
            node_maps[(a, fa)] = theirs[match]

    for (e, f) in mesh.boundary_tags:
        if neighbor[e, f] >= 0:
            raise ConnectivityError(f"boundary tag given for interior face ({e}, {f})")

    connectivity = Connectivity(neighbor, neighbor_face, node_maps, boundary_tags)
    logger.info(
        "Connectivity: %d interior faces, %d boundary faces",
        connectivity.num_interior_faces, connectivity.num_boundary_faces,
    )
    return connectivity
