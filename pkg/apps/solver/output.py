"""
Run artifacts: energy log, legacy VTK snapshots and the run summary.

Snapshots subdivide every element linearly at its nodes: the triangle nodes
are Delaunay-triangulated once per degree and stacked between consecutive
t-slices into sub-wedges; tet nodes are Delaunay-tetrahedralized with
zero-volume slivers dropped.
"""
import json
import logging
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from apps.core.formatting import format_float, write_csv
from apps.reference.elements import References, build_references
from .discretization import Discretization
from .enums import VARIABLES
from .state import SolutionState

logger = logging.getLogger(__name__)

VTK_TETRA = 10
VTK_WEDGE = 13
SLIVER_TOL = 1e-10
ENERGY_HEADER = ['time', 'energy']


@lru_cache(maxsize=16)
def _sub_triangles(degree: int) -> np.ndarray:
    nodes = build_references(degree).triangle.nodes
    simplices = Delaunay(nodes).simplices.copy()
    a, b, c = (nodes[simplices[:, i]] for i in range(3))
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = area < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    return simplices[np.abs(area) > SLIVER_TOL]


@lru_cache(maxsize=16)
def _sub_tets(degree: int) -> np.ndarray:
    nodes = build_references(degree).tet.nodes
    simplices = Delaunay(nodes).simplices.copy()
    p = nodes[simplices]
    volume = np.einsum('ki,ki->k', p[:, 1] - p[:, 0], np.cross(p[:, 2] - p[:, 0], p[:, 3] - p[:, 0]))
    flip = volume < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1, 3]]
    return simplices[np.abs(volume) > SLIVER_TOL]


def sub_wedges(refs: References) -> np.ndarray:
    """(m, 6) local node ids of the linear sub-wedges of one wedge."""
    n1 = refs.degree + 1
    cells = []
    for tri in _sub_triangles(refs.degree):
        for j in range(n1 - 1):
            bottom = tri * n1 + j
            cells.append(np.concatenate([bottom, bottom + 1]))
    return np.array(cells, dtype=np.int64)


def subdivided_cells(disc: Discretization) -> tuple[list, np.ndarray]:
    """Cells as (connectivity list, VTK types) over the global node numbering."""
    layout = disc.layout
    local_w = sub_wedges(disc.refs)
    local_t = _sub_tets(disc.degree)
    cells, types = [], []
    for k in range(layout.num_wedges):
        cells.extend(k * layout.np_wedge + local_w)
        types.extend([VTK_WEDGE] * len(local_w))
    for k in range(layout.num_tets):
        cells.extend(layout.wedge_nodes + k * layout.np_tet + local_t)
        types.extend([VTK_TETRA] * len(local_t))
    return cells, np.array(types, dtype=np.int64)


def write_vtk(path: Path | str, disc: Discretization, state: SolutionState) -> Path:
    """Legacy ASCII unstructured grid with point data p, u_x, u_y, u_z."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = np.concatenate([
        disc.wedge_node_coordinates().reshape(-1, 3),
        disc.tet_node_coordinates().reshape(-1, 3),
    ])
    cells, types = subdivided_cells(disc)
    values = state.global_values()
    size = sum(len(c) + 1 for c in cells)

    lines = [
        '# vtk DataFile Version 3.0',
        f'wavedg t={format_float(state.time)}',
        'ASCII',
        'DATASET UNSTRUCTURED_GRID',
        f'POINTS {len(points)} double',
    ]
    lines.extend(' '.join(format_float(v) for v in row) for row in points)
    lines.append(f'CELLS {len(cells)} {size}')
    lines.extend(f'{len(c)} ' + ' '.join(str(int(i)) for i in c) for c in cells)
    lines.append(f'CELL_TYPES {len(types)}')
    lines.extend(str(t) for t in types)
    lines.append(f'POINT_DATA {len(points)}')
    for name, row in zip(VARIABLES, values):
        lines.append(f'SCALARS {name} double 1')
        lines.append('LOOKUP_TABLE default')
        lines.extend(format_float(v) for v in row)
    path.write_text('\n'.join(lines) + '\n')
    logger.debug("Wrote snapshot %s", path)
    return path


def write_energy_log(path: Path | str, samples: list[tuple[float, float]]) -> Path:
    return write_csv(path, ENERGY_HEADER, samples)


def write_summary(path: Path | str, summary: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w') as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
    return path
