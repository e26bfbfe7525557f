"""
Dense per-element operators built by brute-force quadrature.

Used as the reference against which the factored operators are checked, and
by storage_report to count what a dense operator set would cost.
"""
from dataclasses import dataclass

import numpy as np

from apps.geometry.factors import ElementGeometry
from apps.geometry.mapping import wedge_jacobian_at
from apps.reference.elements import TET_FACE_VERTICES, References, mass_from_interpolation
from apps.reference.nodes import TET_VERTICES
from apps.reference.quadrature import gauss_legendre, gauss_lobatto, triangle_cubature, wedge_cubature


@dataclass(frozen=True, eq=False)
class DenseOperators:
    mass: np.ndarray  # (Np, Np)
    Dx: np.ndarray
    Dy: np.ndarray
    Dz: np.ndarray
    lifts: tuple  # per face (Np, Nfp)

    def lift_action(self, fluxes) -> np.ndarray:
        return sum(lift @ np.ravel(f) for lift, f in zip(self.lifts, fluxes))


def _weak_derivatives(mass, weights, values, grads_phys):
    """(M)^-1 int l_i d(l_j) for each physical direction."""
    return tuple(np.linalg.solve(mass, values.T @ (weights[:, None] * g)) for g in grads_phys)


def dense_wedge_operators(geometry: ElementGeometry, refs: References, lumped: bool = False) -> DenseOperators:
    """
    Dense mass, derivative and lift matrices of one wedge.

    With lumped=True the t-direction integrals use the GLL rule at the nodes
    in place of Gauss quadrature.
    """
    n = refs.degree
    wedge = refs.wedge
    vertices = geometry.vertices

    if lumped:
        tri_points, tri_weights = triangle_cubature(n + 2)
        t, wt = gauss_lobatto(n)
        points = np.column_stack([
            np.repeat(tri_points, len(t), axis=0),
            np.tile(t, len(tri_weights)),
        ])
        weights = np.outer(tri_weights, wt).ravel()
    else:
        points, weights = wedge_cubature(n + 2)

    r, s, tq = points[:, 0], points[:, 1], points[:, 2]
    jac = wedge_jacobian_at(vertices, r, s)
    values = wedge.interpolation_matrix(points)
    vr, vs, vt = wedge.gradient_interpolation(points)

    line = refs.interval.interpolation_matrix(tq)
    txj = line @ geometry.txJ_t
    tyj = line @ geometry.tyJ_t

    mass = mass_from_interpolation(values, weights * jac)
    # J * d/dx = J (r_x d/dr + s_x d/ds) + (t_x J) d/dt
    gx = jac[:, None] * (geometry.rx * vr + geometry.sx * vs) + txj[:, None] * vt
    gy = jac[:, None] * (geometry.ry * vr + geometry.sy * vs) + tyj[:, None] * vt
    gz = geometry.tzJ * vt
    dx, dy, dz = _weak_derivatives(mass, weights, values, (gx, gy, gz))

    face_masses = _wedge_face_masses(geometry, refs, lumped)
    lifts = [np.linalg.solve(mass, m[:, nodes]) for m, nodes in zip(face_masses, wedge.face_nodes)]
    return DenseOperators(mass=mass, Dx=dx, Dy=dy, Dz=dz, lifts=tuple(lifts))


def _wedge_face_masses(geometry: ElementGeometry, refs: References, lumped: bool) -> list[np.ndarray]:
    n = refs.degree
    wedge = refs.wedge
    tri_points, tri_weights = triangle_cubature(n + 2)
    masses = []
    for face, t in ((0, -1.0), (1, 1.0)):
        pts = np.column_stack([tri_points, np.full(len(tri_points), t)])
        values = wedge.interpolation_matrix(pts)
        masses.append(mass_from_interpolation(values, tri_weights * geometry.faces.jacobians[face]))

    rho, wr = gauss_legendre(n + 2)
    if lumped:
        t, wt = gauss_lobatto(n)
    else:
        t, wt = gauss_legendre(n + 2)
    for edge in range(3):
        rs = refs.triangle.edge_points(edge, rho)
        jf_nodes = geometry.faces.jacobians[2 + edge]
        jf = jf_nodes[0] * (1 - rho) / 2 + jf_nodes[-1] * (1 + rho) / 2
        pts = np.column_stack([np.repeat(rs, len(t), axis=0), np.tile(t, len(rho))])
        w = np.outer(wr * jf, wt).ravel()
        masses.append(mass_from_interpolation(wedge.interpolation_matrix(pts), w))
    return masses


def dense_tet_operators(geometry: ElementGeometry, refs: References) -> DenseOperators:
    tet = refs.tet
    points, weights = tet.cubature_points, tet.cubature_weights
    values = tet.interpolation_matrix(points)
    grads = tet.gradient_interpolation(points)
    mass = geometry.J * mass_from_interpolation(values, weights)
    f = geometry.factors
    phys = tuple(geometry.J * sum(f[i, d] * grads[i] for i in range(3)) for d in range(3))
    dx, dy, dz = _weak_derivatives(mass, weights, values, phys)

    tri_points, tri_weights = triangle_cubature(refs.degree + 2)
    lifts = []
    for face, (a, b, c) in enumerate(TET_FACE_VERTICES):
        lam_b = (1 + tri_points[:, 0]) / 2
        lam_c = (1 + tri_points[:, 1]) / 2
        lam = np.column_stack([1 - lam_b - lam_c, lam_b, lam_c])
        pts = lam @ TET_VERTICES[[a, b, c]]
        weights_f = tri_weights * geometry.faces.jacobians[face]
        face_mass = mass_from_interpolation(tet.interpolation_matrix(pts), weights_f)
        lifts.append(np.linalg.solve(mass, face_mass[:, tet.face_nodes[face]]))
    return DenseOperators(mass=mass, Dx=dx, Dy=dy, Dz=dz, lifts=tuple(lifts))


def dense_float_count(refs: References) -> int:
    """Floats per wedge for dense D_x, D_y, D_z and five dense face lifts."""
    np_wedge = refs.wedge.num_nodes
    nt, n1 = refs.triangle.num_nodes, refs.degree + 1
    return 3 * np_wedge ** 2 + np_wedge * (2 * nt + 3 * n1 * n1)
