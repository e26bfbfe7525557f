"""
Everything the right-hand side needs about a mesh at one degree: geometry,
per-element operators, media and precomputed face gather indices.

Node ids used by the face groups index the (4, total nodes) array returned by
SolutionState.global_values: wedge k node n is k * Np_w + n, tet k node n is
Kw * Np_w + k * Np_t + n.
"""
import logging
from dataclasses import dataclass, fields, replace

import numpy as np

from apps.geometry.factors import ElementGeometry, build_geometries
from apps.geometry.mapping import wedge_nodes_batch, tet_nodes_batch
from apps.mesh.connectivity import Connectivity, build_connectivity
from apps.mesh.hybrid import HybridMesh
from apps.operators.lumped import build_all_lumped_wedge_operators
from apps.operators.tet import TetOperators, build_all_tet_operators
from apps.operators.wedge import WedgeOperators, build_all_wedge_operators
from apps.reference.elements import References, build_references
from .enums import QuadratureMode
from .state import DofLayout

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FaceGroup:
    """One local face of every element of a kind."""
    mine: np.ndarray  # (K, Nfp) global node ids of my face nodes
    theirs: np.ndarray  # (K, Nfp) matching neighbor node ids; mine on boundary faces
    boundary: np.ndarray  # (K,) bool
    normals: np.ndarray  # (K, 3) outward
    z_mine: np.ndarray  # (K,) impedance rho c
    z_theirs: np.ndarray

    def __getitem__(self, index: slice) -> 'FaceGroup':
        return replace(self, **{f.name: getattr(self, f.name)[index] for f in fields(self)})


@dataclass(eq=False)
class Discretization:
    mesh: HybridMesh
    refs: References
    quadrature: QuadratureMode
    geometries: list[ElementGeometry]
    connectivity: Connectivity
    wedge_ops: WedgeOperators
    tet_ops: TetOperators
    layout: DofLayout
    wedge_faces: tuple[FaceGroup, ...]
    tet_faces: tuple[FaceGroup, ...]

    @property
    def degree(self) -> int:
        return self.refs.degree

    @property
    def num_wedges(self) -> int:
        return self.mesh.num_wedges

    @property
    def num_tets(self) -> int:
        return self.mesh.num_tets

    @property
    def wedge_rho(self) -> np.ndarray:
        return self.mesh.rho[:self.num_wedges]

    @property
    def wedge_kappa(self) -> np.ndarray:
        return self.mesh.kappa[:self.num_wedges]

    @property
    def tet_rho(self) -> np.ndarray:
        return self.mesh.rho[self.num_wedges:]

    @property
    def tet_kappa(self) -> np.ndarray:
        return self.mesh.kappa[self.num_wedges:]

    @property
    def J_vertices(self) -> np.ndarray:
        """(Kw, 3) wedge Jacobian at the bottom triangle vertices."""
        if not self.num_wedges:
            return np.zeros((0, 3))
        return np.array([g.J_vertices for g in self.geometries[:self.num_wedges]])

    @property
    def tet_J(self) -> np.ndarray:
        return self.tet_ops.J

    def wedge_node_coordinates(self) -> np.ndarray:
        """(Kw, Np_w, 3) physical node coordinates."""
        vertices = self.mesh.vertices[self.mesh.wedges]
        return wedge_nodes_batch(vertices.reshape(-1, 6, 3), self.refs)

    def tet_node_coordinates(self) -> np.ndarray:
        vertices = self.mesh.vertices[self.mesh.tets]
        return tet_nodes_batch(vertices.reshape(-1, 4, 3), self.refs)

    def describe(self) -> dict:
        return {
            'degree': self.degree,
            'wedges': self.num_wedges,
            'tets': self.num_tets,
            'dofs': self.layout.num_dofs,
            'quadrature': self.quadrature.value,
        }


def _node_offsets(layout: DofLayout) -> np.ndarray:
    """Global id of node 0 of every element, in element order."""
    wedge = np.arange(layout.num_wedges) * layout.np_wedge
    tet = layout.wedge_nodes + np.arange(layout.num_tets) * layout.np_tet
    return np.concatenate([wedge, tet]).astype(np.int64)


def _face_group(
    elements: range,
    face: int,
    local_nodes: np.ndarray,
    connectivity: Connectivity,
    geometries: list[ElementGeometry],
    offsets: np.ndarray,
    impedance: np.ndarray,
) -> FaceGroup:
    k, nfp = len(elements), len(local_nodes)
    mine = np.empty((k, nfp), dtype=np.int64)
    theirs = np.empty((k, nfp), dtype=np.int64)
    boundary = np.zeros(k, dtype=bool)
    normals = np.empty((k, 3))
    z_theirs = np.empty(k)
    for row, e in enumerate(elements):
        mine[row] = offsets[e] + local_nodes
        normals[row] = geometries[e].faces.normals[face]
        if connectivity.is_boundary(e, face):
            boundary[row] = True
            theirs[row] = mine[row]
            z_theirs[row] = impedance[e]
        else:
            b, _ = connectivity.partner(e, face)
            theirs[row] = offsets[b] + connectivity.node_maps[(e, face)]
            z_theirs[row] = impedance[b]
    z_mine = np.asarray(impedance[elements.start:elements.stop], dtype=float)
    return FaceGroup(mine, theirs, boundary, normals, z_mine, z_theirs)


def build_discretization(
    mesh: HybridMesh,
    degree: int,
    quadrature: QuadratureMode = QuadratureMode.EXACT,
    threads: int | None = None,
) -> Discretization:
    """Geometry, connectivity, operators and face gathers for a mesh."""
    quadrature = QuadratureMode(quadrature)
    refs = build_references(degree)
    geometries = build_geometries(mesh, refs, threads)
    connectivity = build_connectivity(mesh, refs)

    kw = mesh.num_wedges
    if quadrature is QuadratureMode.LUMPED:
        wedge_ops = build_all_lumped_wedge_operators(geometries[:kw], refs, threads)
    else:
        wedge_ops = build_all_wedge_operators(geometries[:kw], refs, threads)
    tet_ops = build_all_tet_operators(geometries[kw:], refs)

    layout = DofLayout(kw, mesh.num_tets, refs.wedge.num_nodes, refs.tet.num_nodes)
    offsets = _node_offsets(layout)
    impedance = mesh.impedance
    wedges = range(0, kw)
    tets = range(kw, mesh.num_elements)
    wedge_faces = tuple(
        _face_group(wedges, f, refs.wedge.face_nodes[f], connectivity, geometries, offsets, impedance)
        for f in range(5)
    )
    tet_faces = tuple(
        _face_group(tets, f, refs.tet.face_nodes[f], connectivity, geometries, offsets, impedance)
        for f in range(4)
    )

    disc = Discretization(
        mesh=mesh, refs=refs, quadrature=quadrature, geometries=geometries,
        connectivity=connectivity, wedge_ops=wedge_ops, tet_ops=tet_ops, layout=layout,
        wedge_faces=wedge_faces, tet_faces=tet_faces,
    )
    logger.info(
        "Discretization: N=%d, %d wedges, %d tets, %d dofs (%s quadrature)",
        degree, kw, mesh.num_tets, layout.num_dofs, quadrature.value,
    )
    return disc
