"""
Warp & blend interpolation nodes for the triangle and tetrahedron.

The triangle rule and every tetrahedron face share one barycentric face shift
with one blend parameter per degree, so tetrahedron faces carry exactly the
triangle node set. Edges of both carry Gauss-Legendre-Lobatto points.
"""
import numpy as np

from .polynomials import vandermonde_1d
from .quadrature import gauss_lobatto

# Blend parameter per degree (index N - 1).
ALPHA_OPT = (
    0.0, 0.0, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832,
    1.3648, 1.4773, 1.4959, 1.5743, 1.5770, 1.6223, 1.6258,
)

TRIANGLE_VERTICES = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
TET_VERTICES = np.array([
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
])

NODE_TOL = 1e-10


def blend_parameter(n: int) -> float:
    return ALPHA_OPT[n - 1] if n <= len(ALPHA_OPT) else 5.0 / 3.0


def warp_factor(n: int, rout: np.ndarray) -> np.ndarray:
    """Interpolated GLL-minus-equispaced displacement, divided by (1 - r^2)."""
    rout = np.asarray(rout, dtype=float)
    lgl, _ = gauss_lobatto(n)
    req = np.linspace(-1.0, 1.0, n + 1)
    veq = vandermonde_1d(n, req)
    pmat = vandermonde_1d(n, rout.ravel()).T
    lmat = np.linalg.solve(veq.T, pmat)
    warp = (lmat.T @ (lgl - req)).reshape(rout.shape)

    interior = np.abs(rout) < 1.0 - NODE_TOL
    scaled = np.zeros_like(warp)
    scaled[interior] = warp[interior] / (1.0 - rout[interior] ** 2)
    return scaled


def face_shift(n: int, alpha: float, l1: np.ndarray, l2: np.ndarray, l3: np.ndarray):
    """Barycentric displacement of lattice points on a triangle with barycentrics l1, l2, l3."""
    w1 = 4 * l2 * l3 * warp_factor(n, l3 - l2) * (1 + (alpha * l1) ** 2)
    w2 = 4 * l1 * l3 * warp_factor(n, l1 - l3) * (1 + (alpha * l2) ** 2)
    w3 = 4 * l1 * l2 * warp_factor(n, l2 - l1) * (1 + (alpha * l3) ** 2)
    return 0.5 * (w2 - w3), 0.5 * (w3 - w1), 0.5 * (w1 - w2)


def triangle_lattice(n: int) -> np.ndarray:
    """Equispaced barycentric lattice (Np, 3), r index fastest."""
    rows = []
    for j in range(n + 1):
        for i in range(n + 1 - j):
            l2, l3 = i / n, j / n
            rows.append((1.0 - l2 - l3, l2, l3))
    return np.array(rows)


def tet_lattice(n: int) -> np.ndarray:
    """Equispaced barycentric lattice (Np, 4), r index fastest, then s, then t."""
    rows = []
    for k in range(n + 1):
        for j in range(n + 1 - k):
            for i in range(n + 1 - j - k):
                l2, l3, l4 = i / n, j / n, k / n
                rows.append((1.0 - l2 - l3 - l4, l2, l3, l4))
    return np.array(rows)


def triangle_nodes(n: int) -> np.ndarray:
    """Warp & blend nodes (Np, 2) on the bi-unit triangle."""
    lam = triangle_lattice(n)
    if n > 1:
        d1, d2, d3 = face_shift(n, blend_parameter(n), lam[:, 0], lam[:, 1], lam[:, 2])
        lam = lam + np.column_stack([d1, d2, d3])
    return lam @ TRIANGLE_VERTICES


def tet_nodes(n: int) -> np.ndarray:
    """Warp & blend nodes (Np, 3) on the bi-unit tetrahedron."""
    lam = tet_lattice(n)
    if n == 1:
        return lam @ TET_VERTICES

    alpha = blend_parameter(n)
    shift = np.zeros_like(lam)
    for a in range(4):
        b, c, d = [v for v in range(4) if v != a]
        la, lb, lc, ld = lam[:, a], lam[:, b], lam[:, c], lam[:, d]
        db, dc, dd = face_shift(n, alpha, lb, lc, ld)

        blend = lb * lc * ld
        denom = (lb + 0.5 * la) * (lc + 0.5 * la) * (ld + 0.5 * la)
        ok = denom > NODE_TOL
        blend = np.where(ok, (1 + (alpha * la) ** 2) * blend / np.where(ok, denom, 1.0), 0.0)

        shift[:, b] += blend * db
        shift[:, c] += blend * dc
        shift[:, d] += blend * dd

        # nodes on the boundary of this face take the pure edge warp
        on_edge = (la < NODE_TOL) & (
            (lb > NODE_TOL).astype(int) + (lc > NODE_TOL) + (ld > NODE_TOL) < 3)
        if np.any(on_edge):
            shift[on_edge] = 0.0
            shift[on_edge, b] = db[on_edge]
            shift[on_edge, c] = dc[on_edge]
            shift[on_edge, d] = dd[on_edge]

    return (lam + shift) @ TET_VERTICES
