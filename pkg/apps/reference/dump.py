"""CSV dump of reference nodes and matrices for debugging."""
import logging
from pathlib import Path

from apps.core.formatting import write_matrix_csv
from .elements import build_references

logger = logging.getLogger(__name__)


def dump_references(n: int, directory: Path | str) -> list[Path]:
    """Write one CSV per reference array at degree n; returns the paths written."""
    refs = build_references(n)
    directory = Path(directory)
    arrays = {
        'interval_nodes': refs.interval.nodes,
        'interval_weights': refs.interval.weights,
        'interval_Dt': refs.interval.Dt,
        'interval_mass': refs.interval.mass,
        'triangle_nodes': refs.triangle.nodes,
        'triangle_Dr': refs.triangle.Dr,
        'triangle_Ds': refs.triangle.Ds,
        'triangle_mass': refs.triangle.mass,
        'triangle_edge_nodes': refs.triangle.edge_nodes,
        'wedge_nodes': refs.wedge.nodes,
        'tet_nodes': refs.tet.nodes,
        'tet_Dr': refs.tet.Dr,
        'tet_Ds': refs.tet.Ds,
        'tet_Dt': refs.tet.Dt,
        'tet_mass': refs.tet.mass,
        'tet_lift': refs.tet.lift,
    }
    paths = [write_matrix_csv(directory / f'N{n}_{name}.csv', value) for name, value in arrays.items()]
    logger.info("Wrote %d reference arrays for N=%d to %s", len(paths), n, directory)
    return paths
