"""
ASCII mesh and surface files.

Mesh file::

    $Vertices
    <count>
    x y z
    $EndVertices
    $Wedges            (v1..v6, 1-based)
    $Tets              (v1..v4, 1-based)
    $Media             (rho kappa region, one line per element, wedges first)
    $Boundary          (element face tag, 1-based element, 0-based face)

Surface file: `$Points` (x y z_bottom z_top) and `$Triangles` (a b c, 1-based).
Sections other than `$Vertices`/`$Points` are optional. Blank lines and lines
starting with `#` are ignored.
"""
import logging
from pathlib import Path

import numpy as np

from apps.core.exceptions import MeshFormatError
from apps.core.formatting import format_float
from .generators import SurfaceTriangulation
from .hybrid import HybridMesh

logger = logging.getLogger(__name__)

MESH_SECTIONS = {
    'Vertices': 3,
    'Wedges': 6,
    'Tets': 4,
    'Media': 3,
    'Boundary': 3,
}
SURFACE_SECTIONS = {
    'Points': 4,
    'Triangles': 3,
}


def _parse_sections(path: Path, schema: dict) -> dict[str, list[tuple[int, list[str]]]]:
    """Section name -> list of (line number, fields)."""
    lines = [
        (number, text.strip())
        for number, text in enumerate(Path(path).read_text().splitlines(), start=1)
        if text.strip() and not text.lstrip().startswith('#')
    ]
    sections = {}
    i = 0
    while i < len(lines):
        number, text = lines[i]
        if not text.startswith('$') or text.startswith('$End'):
            raise MeshFormatError(f"expected a section header, got {text!r}", line=number)
        name = text[1:]
        if name not in schema:
            raise MeshFormatError(f"unknown section ${name}", line=number)
        if name in sections:
            raise MeshFormatError(f"duplicate section ${name}", line=number)
        if i + 1 >= len(lines):
            raise MeshFormatError(f"section ${name} has no count line", line=number)
        count_line, count_text = lines[i + 1]
        try:
            count = int(count_text)
        except ValueError:
            raise MeshFormatError(f"expected a record count, got {count_text!r}", line=count_line)
        if count < 0:
            raise MeshFormatError("record count must be non-negative", line=count_line)

        width = schema[name]
        records = []
        for j in range(count):
            if i + 2 + j >= len(lines):
                raise MeshFormatError(f"section ${name} ends after {j} of {count} records", line=lines[-1][0])
            rec_line, rec_text = lines[i + 2 + j]
            fields = rec_text.split()
            if len(fields) != width:
                raise MeshFormatError(f"${name} record needs {width} fields, got {len(fields)}", line=rec_line)
            records.append((rec_line, fields))

        end_index = i + 2 + count
        if end_index >= len(lines) or lines[end_index][1] != f'$End{name}':
            where = lines[end_index][0] if end_index < len(lines) else lines[-1][0]
            raise MeshFormatError(f"missing $End{name}", line=where)
        sections[name] = records
        i = end_index + 1
    return sections


def _numeric(records, kind, name: str, width: int) -> np.ndarray:
    values = []
    for line, fields in records:
        try:
            values.append([kind(v) for v in fields])
        except ValueError:
            raise MeshFormatError(f"non-numeric value in ${name}", line=line)
    return np.array(values, dtype=kind).reshape(len(records), width)


def _indices(records, name: str, num_vertices: int, width: int) -> np.ndarray:
    if not records:
        return np.zeros((0, width), dtype=np.int64)
    ids = _numeric(records, int, name, width)
    for (line, _), row in zip(records, ids):
        if row.min() < 1 or row.max() > num_vertices:
            raise MeshFormatError(f"${name} index out of range 1..{num_vertices}", line=line)
    return ids - 1


def load_mesh(path: Path | str) -> HybridMesh:
    """Read and validate a mesh file."""
    sections = _parse_sections(Path(path), MESH_SECTIONS)
    if 'Vertices' not in sections:
        raise MeshFormatError("mesh file has no $Vertices section")
    vertices = _numeric(sections['Vertices'], float, 'Vertices', 3)
    wedges = _indices(sections.get('Wedges', []), 'Wedges', len(vertices), 6)
    tets = _indices(sections.get('Tets', []), 'Tets', len(vertices), 4)
    k = len(wedges) + len(tets)

    rho, kappa, regions = np.ones(k), np.ones(k), np.zeros(k, dtype=np.int64)
    media = sections.get('Media')
    if media is not None:
        if len(media) != k:
            raise MeshFormatError(f"$Media needs one record per element ({k}), got {len(media)}")
        for e, (line, fields) in enumerate(media):
            try:
                rho[e], kappa[e], regions[e] = float(fields[0]), float(fields[1]), int(fields[2])
            except ValueError:
                raise MeshFormatError("malformed $Media record", line=line)

    tags = {}
    for line, fields in sections.get('Boundary', []):
        try:
            element, face = int(fields[0]) - 1, int(fields[1])
        except ValueError:
            raise MeshFormatError("malformed $Boundary record", line=line)
        tags[(element, face)] = fields[2]

    mesh = HybridMesh(vertices, wedges, tets, rho, kappa, regions, boundary_tags=tags)
    mesh.validate()
    logger.info("Loaded %s from %s", mesh.summary(), path)
    return mesh


def _section(name: str, rows: list[str]) -> list[str]:
    return [f'${name}', str(len(rows)), *rows, f'$End{name}']


def save_mesh(mesh: HybridMesh, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    lines += _section('Vertices', [' '.join(format_float(v) for v in row) for row in mesh.vertices])
    lines += _section('Wedges', [' '.join(str(v + 1) for v in row) for row in mesh.wedges])
    lines += _section('Tets', [' '.join(str(v + 1) for v in row) for row in mesh.tets])
    lines += _section('Media', [
        f'{format_float(r)} {format_float(k)} {g}' for r, k, g in zip(mesh.rho, mesh.kappa, mesh.regions)
    ])
    lines += _section('Boundary', [
        f'{element + 1} {face} {tag}' for (element, face), tag in sorted(mesh.boundary_tags.items())
    ])
    path.write_text('\n'.join(lines) + '\n')
    logger.info("Saved %s to %s", mesh.summary(), path)
    return path


def load_surface(path: Path | str) -> SurfaceTriangulation:
    sections = _parse_sections(Path(path), SURFACE_SECTIONS)
    if 'Points' not in sections or 'Triangles' not in sections:
        raise MeshFormatError("surface file needs $Points and $Triangles sections")
    points = _numeric(sections['Points'], float, 'Points', 4)
    triangles = _indices(sections['Triangles'], 'Triangles', len(points), 3)
    return SurfaceTriangulation(
        points=points[:, :2], triangles=triangles, z_bottom=points[:, 2], z_top=points[:, 3])


def save_surface(surface: SurfaceTriangulation, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([surface.points, surface.z_bottom, surface.z_top])
    lines = _section('Points', [' '.join(format_float(v) for v in row) for row in rows])
    lines += _section('Triangles', [' '.join(str(v + 1) for v in row) for row in surface.triangles])
    path.write_text('\n'.join(lines) + '\n')
    return path
