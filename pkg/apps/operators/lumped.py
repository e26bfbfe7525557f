"""
Mass-lumped wedge operators: GLL collocation in t.

The mass becomes M_tri kron diag(w), block diagonal with one M_tri-sized block
per t-slice. The derivative operators coincide with the exact ones (the
t-derivative term is a degree-N polynomial in t either way); only the
triangular-face lift profile changes from (M1D)^-1 e to e / w.
"""
import logging
from dataclasses import dataclass

import numpy as np

from apps.core.parallel import map_parallel
from apps.geometry.factors import ElementGeometry
from apps.reference.elements import References
from .wedge import WedgeOperators, _element_arrays, stack_arrays, weighted_triangle_mass

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LumpedWedgeOperators(WedgeOperators):
    mass_tri: np.ndarray = None  # (K, Nt, Nt)

    @property
    def lift_1d(self) -> np.ndarray:
        weights = self.refs.interval.weights
        profiles = np.zeros((2, len(weights)))
        profiles[0, 0] = 1.0 / weights[0]
        profiles[1, -1] = 1.0 / weights[-1]
        return profiles

    @property
    def mass_blocks(self) -> np.ndarray:
        """(K, N+1, Nt, Nt): block j is w_j M_tri."""
        weights = self.refs.interval.weights
        return weights[None, :, None, None] * self.mass_tri[:, None]

    def block_count(self) -> int:
        return self.degree + 1


def _lumped_arrays(geometry: ElementGeometry, refs: References) -> dict:
    arrays = _element_arrays(geometry, refs)
    arrays['mass_tri'] = weighted_triangle_mass(geometry, refs)
    return arrays


def _stack(per_element: list[dict], refs: References) -> LumpedWedgeOperators:
    nt = refs.triangle.num_nodes
    mass = np.array([d.pop('mass_tri') for d in per_element]) if per_element else np.zeros((0, nt, nt))
    return stack_arrays(per_element, refs, cls=LumpedWedgeOperators, mass_tri=mass)


def build_lumped_wedge_operators(geometry: ElementGeometry, refs: References) -> LumpedWedgeOperators:
    return _stack([_lumped_arrays(geometry, refs)], refs)


def build_all_lumped_wedge_operators(geometries, refs: References, threads=None) -> LumpedWedgeOperators:
    per_element = map_parallel(lambda k: _lumped_arrays(geometries[k], refs), len(geometries), threads)
    ops = _stack(per_element, refs)
    logger.info("Built lumped operators for %d wedges", ops.num_elements)
    return ops
