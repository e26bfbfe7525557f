"""
Service layer for mesh generation.
Every mesh used by a command is built from a generator spec through
MeshService so that media tables and perturbations are applied the same way.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

from apps.core.exceptions import ConfigurationError, MeshError
from apps.geometry.factors import build_geometries
from apps.reference.elements import build_references
from .generators import (
    Interface,
    MeshFamily,
    extrude_layer,
    family_mesh,
    perturb_vertically,
    structured_hybrid_box,
    wavy_layers,
    wedge_box,
)
from .hybrid import HybridMesh
from .io import load_mesh, load_surface, save_mesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshReport:
    num_wedges: int
    num_tets: int
    num_vertices: int
    min_jacobian: float
    max_jacobian: float

    def line(self) -> str:
        return (f"{self.num_wedges} wedges, {self.num_tets} tets, {self.num_vertices} vertices, "
                f"J in [{self.min_jacobian:.6g}, {self.max_jacobian:.6g}]")


def apply_media(mesh: HybridMesh, media) -> HybridMesh:
    """Overwrite rho and kappa per region from [{region, rho, kappa}, ...]."""
    for entry in media or ():
        selected = mesh.regions == int(entry['region'])
        if not selected.any():
            raise ConfigurationError(f"media: no elements in region {entry['region']}")
        mesh.rho[selected] = float(entry['rho'])
        mesh.kappa[selected] = float(entry['kappa'])
    return mesh.validate()


class MeshService:
    """Service for building, saving and describing meshes."""

    @staticmethod
    def build(spec: dict, media=None, seed: int = 0) -> HybridMesh:
        """
        Mesh from a generator spec, then media and optional vertical
        perturbation. perturb_seed falls back to seed.
        """
        generator = spec.get('generator')
        if generator == 'file':
            mesh = load_mesh(spec['path'])
        elif generator == 'box':
            mesh = wedge_box(spec['nx'], spec['ny'], spec['nz'])
        elif generator == 'hybrid_box':
            mesh = structured_hybrid_box(spec['nx'], spec['ny'], spec['nz_wedge'], spec['nz_tet'])
        elif generator == 'surface':
            mesh = extrude_layer(load_surface(spec['path']), spec['layers'])
        elif generator == 'wavy_layers':
            interfaces = [Interface(**i) for i in spec['interfaces']]
            mesh = wavy_layers(spec['nx'], spec['ny'], interfaces, spec['layers'], spec.get('nz_tet', 0))
        elif generator == 'family':
            mesh = family_mesh(MeshFamily(spec['family']), spec['h'], spec.get('seed', 0))
        else:
            raise ConfigurationError(f"mesh.generator: unknown generator {generator!r}")

        amplitude = spec.get('perturb_amplitude')
        if amplitude:
            mesh = perturb_vertically(mesh, amplitude, spec.get('perturb_seed', seed))
        return apply_media(mesh, media)

    @staticmethod
    def report(mesh: HybridMesh) -> MeshReport:
        geometries = build_geometries(mesh, build_references(1))
        jac = [(g.min_jacobian, g.max_jacobian) for g in geometries]
        lo = min((j[0] for j in jac), default=float('nan'))
        hi = max((j[1] for j in jac), default=float('nan'))
        return MeshReport(mesh.num_wedges, mesh.num_tets, len(mesh.vertices), lo, hi)

    @staticmethod
    def generate(spec: dict, path: Path | str, media=None, seed: int = 0) -> MeshReport:
        """Build, save and reload a mesh; the reloaded copy must be identical."""
        mesh = MeshService.build(spec, media, seed=seed)
        save_mesh(mesh, path)
        reloaded = load_mesh(path)
        if not reloaded.same_as(mesh):
            raise MeshError(f"{path}: mesh did not survive a save/load round trip")
        report = MeshService.report(reloaded)
        logger.info("Generated %s: %s", path, report.line())
        return report
