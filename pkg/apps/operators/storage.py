"""Per-element operator storage meter."""
from dataclasses import dataclass

from apps.reference.elements import References
from .dense import dense_float_count
from .tet import TetOperators
from .wedge import WedgeOperators


@dataclass(frozen=True)
class StorageReport:
    degree: int
    num_wedges: int
    num_tets: int
    wedge_floats: int
    tet_floats: int
    dense_wedge_floats: int
    budget: int

    @property
    def total_floats(self) -> int:
        return self.num_wedges * self.wedge_floats + self.num_tets * self.tet_floats

    @property
    def dense_ratio(self) -> float:
        """Factored over dense per-wedge storage."""
        return self.wedge_floats / self.dense_wedge_floats

    @property
    def within_budget(self) -> bool:
        return self.wedge_floats <= self.budget

    def as_row(self) -> list:
        return [
            self.degree, self.num_wedges, self.num_tets, self.wedge_floats, self.tet_floats,
            self.dense_wedge_floats, self.budget, self.total_floats, self.dense_ratio,
        ]


STORAGE_HEADER = [
    'N', 'wedges', 'tets', 'wedge_floats', 'tet_floats',
    'dense_wedge_floats', 'budget', 'total_floats', 'dense_ratio',
]


def wedge_budget(refs: References) -> int:
    """Np_tri^2 + 3 Np_tri (N+1) + 8 (N+1)."""
    nt, n1 = refs.triangle.num_nodes, refs.degree + 1
    return nt * nt + 3 * nt * n1 + 8 * n1


def storage_report(wedge_ops: WedgeOperators, tet_ops: TetOperators) -> StorageReport:
    refs = wedge_ops.refs
    return StorageReport(
        degree=refs.degree,
        num_wedges=wedge_ops.num_elements,
        num_tets=tet_ops.num_elements,
        wedge_floats=wedge_ops.floats_per_element(),
        tet_floats=tet_ops.floats_per_element(),
        dense_wedge_floats=dense_float_count(refs),
        budget=wedge_budget(refs),
    )
