"""
Quadrature rules on the reference interval, triangle and tetrahedron.

Simplex rules are collapsed-coordinate tensor products of Gauss-Jacobi rules;
an order-q rule integrates total-degree 2q-1 polynomials exactly.
"""
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import eval_legendre, roots_jacobi


def gauss_legendre(q: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(q)


def gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre-Lobatto nodes and weights for degree n (n + 1 points)."""
    if n < 1:
        raise ValueError("GLL rule needs degree >= 1")
    if n == 1:
        nodes = np.array([-1.0, 1.0])
    else:
        interior, _ = roots_jacobi(n - 1, 1.0, 1.0)
        nodes = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    # symmetric to round-off; enforce it exactly
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 2.0 / (n * (n + 1) * eval_legendre(n, nodes) ** 2)
    return nodes, weights


def triangle_cubature(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (m, 2) and weights (m,) on the bi-unit triangle; weights sum to 2."""
    a, wa = leggauss(q)
    b, wb = roots_jacobi(q, 1.0, 0.0)
    aa, bb = np.meshgrid(a, b, indexing='ij')
    r = 0.5 * (1 + aa) * (1 - bb) - 1
    s = bb
    w = np.outer(wa, wb) / 2
    return np.column_stack([r.ravel(), s.ravel()]), w.ravel()


def tet_cubature(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (m, 3) and weights (m,) on the bi-unit tetrahedron; weights sum to 4/3."""
    a, wa = leggauss(q)
    b, wb = roots_jacobi(q, 1.0, 0.0)
    c, wc = roots_jacobi(q, 2.0, 0.0)
    aa, bb, cc = np.meshgrid(a, b, c, indexing='ij')
    r = 0.25 * (1 + aa) * (1 - bb) * (1 - cc) - 1
    s = 0.5 * (1 + bb) * (1 - cc) - 1
    t = cc
    w = np.einsum('i,j,k->ijk', wa, wb, wc) / 8
    return np.column_stack([r.ravel(), s.ravel(), t.ravel()]), w.ravel()


def wedge_cubature(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor rule on the reference wedge; weights sum to 4."""
    tri_points, tri_weights = triangle_cubature(q)
    t, wt = leggauss(q)
    points = np.column_stack([
        np.repeat(tri_points, len(t), axis=0),
        np.tile(t, len(tri_weights)),
    ])
    weights = np.outer(tri_weights, wt).ravel()
    return points, weights
