"""
Affine tetrahedron operators: constant geometric factors times shared
reference matrices.
"""
import logging
from dataclasses import dataclass, fields, replace

import numpy as np

from apps.geometry.factors import ElementGeometry
from apps.reference.elements import References

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TetOperators:
    refs: References
    factors: np.ndarray  # (K, 3, 3), rows (r, s, t), columns (x, y, z)
    J: np.ndarray  # (K,)
    face_scale: np.ndarray  # (K, 4) J_f / J

    @property
    def degree(self) -> int:
        return self.refs.degree

    @property
    def num_elements(self) -> int:
        return len(self.J)

    def __getitem__(self, index: slice) -> 'TetOperators':
        if not isinstance(index, slice):
            index = slice(index, index + 1)
        return replace(self, **{f.name: getattr(self, f.name)[index] for f in fields(self) if f.name != 'refs'})

    def floats_per_element(self) -> int:
        return 9 + 1 + 4

    def derivative_matrices(self, element: int = 0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense D_x, D_y, D_z of one element, for inspection and tests."""
        tet = self.refs.tet
        f = self.factors[element]
        return tuple(f[0, d] * tet.Dr + f[1, d] * tet.Ds + f[2, d] * tet.Dt for d in range(3))


def _element_arrays(geometry: ElementGeometry) -> tuple:
    jf = np.array(geometry.faces.jacobians, dtype=float)
    return geometry.factors, geometry.J, jf / geometry.J


def _stack(per_element: list[tuple], refs: References) -> TetOperators:
    if not per_element:
        return TetOperators(refs, np.zeros((0, 3, 3)), np.zeros(0), np.zeros((0, 4)))
    factors, jac, scale = zip(*per_element)
    return TetOperators(refs, np.array(factors), np.array(jac, dtype=float), np.array(scale))


def build_tet_operators(geometry: ElementGeometry, refs: References) -> TetOperators:
    return _stack([_element_arrays(geometry)], refs)


def build_all_tet_operators(geometries: list[ElementGeometry], refs: References) -> TetOperators:
    ops = _stack([_element_arrays(g) for g in geometries], refs)
    logger.info("Built operators for %d tets", ops.num_elements)
    return ops


def _rows(u: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """matrix applied to every row of u, one product per element."""
    return np.matmul(u[:, None, :], matrix.T)[:, 0]


def apply_tet_derivatives(ops: TetOperators, u: np.ndarray):
    """(du/dx, du/dy, du/dz) for u of shape (K, Np) or (Np,) when K == 1."""
    shape = np.shape(u)
    u = np.asarray(u, dtype=float).reshape(ops.num_elements, -1)
    tet = ops.refs.tet
    ur, us, ut = (_rows(u, m) for m in (tet.Dr, tet.Ds, tet.Dt))
    f = ops.factors
    return tuple(
        (f[:, 0, d, None] * ur + f[:, 1, d, None] * us + f[:, 2, d, None] * ut).reshape(shape)
        for d in range(3)
    )


def apply_tet_divergence(ops: TetOperators, ux, uy, uz) -> np.ndarray:
    shape = np.shape(ux)
    k = ops.num_elements
    u = np.stack([np.asarray(v, dtype=float).reshape(k, -1) for v in (ux, uy, uz)], axis=1)
    # reference-direction fluxes: sum over physical d of factors[r, d] * u_d
    ref = np.einsum('krd,kdn->krn', ops.factors, u)
    tet = ops.refs.tet
    return (_rows(ref[:, 0], tet.Dr) + _rows(ref[:, 1], tet.Ds) + _rows(ref[:, 2], tet.Dt)).reshape(shape)


def apply_tet_lift(ops: TetOperators, fluxes: np.ndarray) -> np.ndarray:
    """fluxes (K, 4, Nfp) in reference face-node order -> (K, Np)."""
    fluxes = np.asarray(fluxes, dtype=float)
    k = ops.num_elements
    scaled = (fluxes * ops.face_scale[:, :, None]).reshape(k, -1)
    return _rows(scaled, ops.refs.tet.lift)
