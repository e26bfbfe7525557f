"""
Orthonormal polynomial bases and Vandermonde matrices on the interval, the
bi-unit triangle and the bi-unit tetrahedron.

Reference domains:
    interval     -1 <= t <= 1
    triangle     r, s >= -1, r + s <= 0
    tetrahedron  r, s, t >= -1, r + s + t <= -1
"""
import numpy as np
from scipy.special import gamma

# Collapsed-coordinate singularities are detected against this.
COLLAPSE_TOL = 1e-12


def jacobi_p(x: np.ndarray, alpha: float, beta: float, n: int) -> np.ndarray:
    """Normalized Jacobi polynomial P_n^(alpha, beta) evaluated at x."""
    x = np.asarray(x, dtype=float)
    pl = np.zeros((n + 1,) + x.shape)

    gamma0 = (2 ** (alpha + beta + 1) / (alpha + beta + 1)
              * gamma(alpha + 1) * gamma(beta + 1) / gamma(alpha + beta + 1))
    pl[0] = 1.0 / np.sqrt(gamma0)
    if n == 0:
        return pl[0]

    gamma1 = (alpha + 1) * (beta + 1) / (alpha + beta + 3) * gamma0
    pl[1] = ((alpha + beta + 2) * x / 2 + (alpha - beta) / 2) / np.sqrt(gamma1)
    if n == 1:
        return pl[1]

    aold = 2 / (2 + alpha + beta) * np.sqrt((alpha + 1) * (beta + 1) / (alpha + beta + 3))
    for i in range(1, n):
        h1 = 2 * i + alpha + beta
        anew = 2 / (h1 + 2) * np.sqrt(
            (i + 1) * (i + 1 + alpha + beta) * (i + 1 + alpha) * (i + 1 + beta)
            / (h1 + 1) / (h1 + 3))
        bnew = -(alpha ** 2 - beta ** 2) / h1 / (h1 + 2)
        pl[i + 1] = (-aold * pl[i - 1] + (x - bnew) * pl[i]) / anew
        aold = anew
    return pl[n]


def grad_jacobi_p(x: np.ndarray, alpha: float, beta: float, n: int) -> np.ndarray:
    """Derivative of the normalized Jacobi polynomial."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros_like(x)
    return np.sqrt(n * (n + alpha + beta + 1)) * jacobi_p(x, alpha + 1, beta + 1, n - 1)


# Interval

def vandermonde_1d(n: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([jacobi_p(x, 0, 0, j) for j in range(n + 1)], axis=-1)


def grad_vandermonde_1d(n: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([grad_jacobi_p(x, 0, 0, j) for j in range(n + 1)], axis=-1)


# Triangle

def rs_to_ab(r: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse the triangle onto the square."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    denom = 1.0 - s
    safe = np.abs(denom) > COLLAPSE_TOL
    a = np.full_like(r, -1.0)
    a[safe] = 2.0 * (1.0 + r[safe]) / denom[safe] - 1.0
    return a, s.copy()


def simplex2d_p(a: np.ndarray, b: np.ndarray, i: int, j: int) -> np.ndarray:
    h1 = jacobi_p(a, 0, 0, i)
    h2 = jacobi_p(b, 2 * i + 1, 0, j)
    return np.sqrt(2.0) * h1 * h2 * (1 - b) ** i


def grad_simplex2d_p(a: np.ndarray, b: np.ndarray, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    fa = jacobi_p(a, 0, 0, i)
    dfa = grad_jacobi_p(a, 0, 0, i)
    gb = jacobi_p(b, 2 * i + 1, 0, j)
    dgb = grad_jacobi_p(b, 2 * i + 1, 0, j)

    half_b = 0.5 * (1 - b)
    dmodedr = dfa * gb
    if i > 0:
        dmodedr = dmodedr * half_b ** (i - 1)

    dmodeds = dfa * (gb * (0.5 * (1 + a)))
    if i > 0:
        dmodeds = dmodeds * half_b ** (i - 1)

    tmp = dgb * half_b ** i
    if i > 0:
        tmp = tmp - 0.5 * i * gb * half_b ** (i - 1)
    dmodeds = dmodeds + fa * tmp

    scale = 2 ** (i + 0.5)
    return dmodedr * scale, dmodeds * scale


def triangle_modes(n: int):
    """Mode indices (i, j) with i + j <= n in Vandermonde column order."""
    return [(i, j) for i in range(n + 1) for j in range(n - i + 1)]


def vandermonde_2d(n: int, r: np.ndarray, s: np.ndarray) -> np.ndarray:
    a, b = rs_to_ab(r, s)
    return np.stack([simplex2d_p(a, b, i, j) for i, j in triangle_modes(n)], axis=-1)


def grad_vandermonde_2d(n: int, r: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a, b = rs_to_ab(r, s)
    grads = [grad_simplex2d_p(a, b, i, j) for i, j in triangle_modes(n)]
    vr = np.stack([g[0] for g in grads], axis=-1)
    vs = np.stack([g[1] for g in grads], axis=-1)
    return vr, vs


# Tetrahedron

def rst_to_abc(r: np.ndarray, s: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collapse the tetrahedron onto the cube."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)

    denom_a = -s - t
    safe_a = np.abs(denom_a) > COLLAPSE_TOL
    a = np.full_like(r, -1.0)
    a[safe_a] = 2.0 * (1.0 + r[safe_a]) / denom_a[safe_a] - 1.0

    denom_b = 1.0 - t
    safe_b = np.abs(denom_b) > COLLAPSE_TOL
    b = np.full_like(s, -1.0)
    b[safe_b] = 2.0 * (1.0 + s[safe_b]) / denom_b[safe_b] - 1.0
    return a, b, t.copy()


def simplex3d_p(a, b, c, i: int, j: int, k: int) -> np.ndarray:
    h1 = jacobi_p(a, 0, 0, i)
    h2 = jacobi_p(b, 2 * i + 1, 0, j)
    h3 = jacobi_p(c, 2 * (i + j) + 2, 0, k)
    return 2.0 * np.sqrt(2.0) * h1 * h2 * (1 - b) ** i * h3 * (1 - c) ** (i + j)


def grad_simplex3d_p(a, b, c, i: int, j: int, k: int):
    fa = jacobi_p(a, 0, 0, i)
    dfa = grad_jacobi_p(a, 0, 0, i)
    gb = jacobi_p(b, 2 * i + 1, 0, j)
    dgb = grad_jacobi_p(b, 2 * i + 1, 0, j)
    hc = jacobi_p(c, 2 * (i + j) + 2, 0, k)
    dhc = grad_jacobi_p(c, 2 * (i + j) + 2, 0, k)

    half_b = 0.5 * (1 - b)
    half_c = 0.5 * (1 - c)

    # r-derivative
    dr = dfa * (gb * hc)
    if i > 0:
        dr = dr * half_b ** (i - 1)
    if i + j > 0:
        dr = dr * half_c ** (i + j - 1)

    # s-derivative
    ds = 0.5 * (1 + a) * dr
    tmp = dgb * half_b ** i
    if i > 0:
        tmp = tmp - 0.5 * i * gb * half_b ** (i - 1)
    if i + j > 0:
        tmp = tmp * half_c ** (i + j - 1)
    tmp = fa * (tmp * hc)
    ds = ds + tmp

    # t-derivative
    dt = 0.5 * (1 + a) * dr + 0.5 * (1 + b) * tmp
    tmp = dhc * half_c ** (i + j)
    if i + j > 0:
        tmp = tmp - 0.5 * (i + j) * hc * half_c ** (i + j - 1)
    tmp = fa * (gb * tmp)
    tmp = tmp * half_b ** i
    dt = dt + tmp

    scale = 2 ** (2 * i + j + 1.5)
    return dr * scale, ds * scale, dt * scale


def tet_modes(n: int):
    return [(i, j, k) for i in range(n + 1) for j in range(n - i + 1) for k in range(n - i - j + 1)]


def vandermonde_3d(n: int, r, s, t) -> np.ndarray:
    a, b, c = rst_to_abc(r, s, t)
    return np.stack([simplex3d_p(a, b, c, i, j, k) for i, j, k in tet_modes(n)], axis=-1)


def grad_vandermonde_3d(n: int, r, s, t):
    a, b, c = rst_to_abc(r, s, t)
    grads = [grad_simplex3d_p(a, b, c, i, j, k) for i, j, k in tet_modes(n)]
    return tuple(np.stack([g[d] for g in grads], axis=-1) for d in range(3))
