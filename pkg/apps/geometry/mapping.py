"""Vertex mappings from reference elements to physical elements."""
import numpy as np

from apps.reference.elements import References, WedgeRef, triangle_barycentrics


def tet_barycentrics(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    r, s, t = points[..., 0], points[..., 1], points[..., 2]
    return np.stack([-(1 + r + s + t) / 2, (1 + r) / 2, (1 + s) / 2, (1 + t) / 2], axis=-1)


def map_wedge_points(vertices: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Physical coordinates of reference wedge points (m, 3)."""
    points = np.asarray(points, dtype=float)
    shape = WedgeRef.vertex_functions(points[..., 0], points[..., 1], points[..., 2])
    return shape @ vertices


def map_tet_points(vertices: np.ndarray, points: np.ndarray) -> np.ndarray:
    return tet_barycentrics(points) @ vertices


def wedge_jacobian_at(vertices: np.ndarray, r, s) -> np.ndarray:
    """J = A2 * h(r, s) / 2 at reference points; constant in t."""
    x, y = vertices[:3, 0], vertices[:3, 1]
    area2 = 0.25 * ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]))
    heights = vertices[3:, 2] - vertices[:3, 2]
    return area2 * (triangle_barycentrics(r, s) @ heights) / 2


def element_nodes(mesh, refs: References, element: int) -> np.ndarray:
    """Physical node coordinates (Np, 3) of one element."""
    vertices = mesh.element_vertices(element)
    if element < mesh.num_wedges:
        return map_wedge_points(vertices, refs.wedge.nodes)
    return map_tet_points(vertices, refs.tet.nodes)


def wedge_nodes_batch(vertices: np.ndarray, refs: References) -> np.ndarray:
    """(K, Np, 3) node coordinates for stacked wedge vertices (K, 6, 3)."""
    shape = WedgeRef.vertex_functions(*refs.wedge.nodes.T)
    return np.einsum('nv,kvd->knd', shape, vertices)


def tet_nodes_batch(vertices: np.ndarray, refs: References) -> np.ndarray:
    return np.einsum('nv,kvd->knd', tet_barycentrics(refs.tet.nodes), vertices)
