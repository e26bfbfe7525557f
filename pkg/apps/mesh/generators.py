"""
Mesh generators: layered wedge extrusion, structured hybrid boxes and the
perturbed families used by convergence studies.

Structured grids number surface point (i, j) as j*(nx+1) + i and level k
vertices as k*(number of surface points) + surface id.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from apps.core.exceptions import ConfigurationError, GenerationError
from .hybrid import HybridMesh

logger = logging.getLogger(__name__)

BOX_BOUNDS = (-1.0, 1.0, -1.0, 1.0)
INTERFACE_TOL = 1e-12
MAX_AMPLITUDE = 0.45
MAX_HALVINGS = 5


class MeshFamily(Enum):
    """Mesh families of the convergence study."""
    STRUCTURED = 'structured'
    UNSTRUCTURED = 'unstructured'
    ARNOLD = 'arnold'


def _kuhn_paths() -> np.ndarray:
    """Six positively oriented unit-cube corner paths, (6, 4, 3)."""
    paths = []
    for perm in permutations(range(3)):
        corner = [0, 0, 0]
        path = [tuple(corner)]
        for axis in perm:
            corner[axis] = 1
            path.append(tuple(corner))
        path = np.array(path)
        edges = path[1:] - path[0]
        if np.linalg.det(edges) < 0:
            path[[2, 3]] = path[[3, 2]]
        paths.append(path)
    return np.array(paths)


KUHN_PATHS = _kuhn_paths()


@dataclass(eq=False)
class SurfaceTriangulation:
    """Planar triangulation with optional bottom/top heights per point."""
    points: np.ndarray  # (n, 2)
    triangles: np.ndarray  # (m, 3)
    z_bottom: np.ndarray | None = None
    z_top: np.ndarray | None = None
    # (nx, ny) when the points form a structured grid
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)

    @property
    def num_points(self) -> int:
        return len(self.points)

    def oriented_triangles(self) -> np.ndarray:
        """Triangles reordered counterclockwise."""
        p = self.points[self.triangles]
        area = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) \
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        bad = np.flatnonzero(area == 0)
        if bad.size:
            raise GenerationError(f"surface triangle {bad[0]} is degenerate")
        tris = self.triangles.copy()
        flip = area < 0
        tris[flip, 1], tris[flip, 2] = self.triangles[flip, 2], self.triangles[flip, 1]
        return tris


@dataclass(frozen=True)
class Interface:
    """Surface z = base + amplitude * sin(pi k x) * sin(pi k y)."""
    base: float
    amplitude: float = 0.0
    wavenumber: float = 1.0

    def __call__(self, x, y):
        k = np.pi * self.wavenumber
        return self.base + self.amplitude * np.sin(k * np.asarray(x)) * np.sin(k * np.asarray(y))


@dataclass(frozen=True)
class LayerSpec:
    """One layer between two height functions, split into `layers` wedge layers."""
    z_bottom: Callable
    z_top: Callable
    layers: int
    rho: float = 1.0
    kappa: float = 1.0
    region: int | None = None


def square_surface(
    nx: int,
    ny: int,
    bounds: Sequence[float] = BOX_BOUNDS,
    diagonal: str = 'forward',
    seed: int = 0,
) -> SurfaceTriangulation:
    """
    Structured triangulation of a rectangle.

    diagonal: 'forward' splits every square along (i, j)-(i+1, j+1),
    'backward' along (i+1, j)-(i, j+1), 'random' picks per square.
    """
    if nx < 1 or ny < 1:
        raise GenerationError("surface grid needs nx, ny >= 1")
    x0, x1, y0, y1 = bounds
    x, y = np.meshgrid(np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1))
    points = np.column_stack([x.ravel(), y.ravel()])

    rng = np.random.default_rng(seed)
    if diagonal == 'forward':
        forward = np.ones(nx * ny, dtype=bool)
    elif diagonal == 'backward':
        forward = np.zeros(nx * ny, dtype=bool)
    elif diagonal == 'random':
        forward = rng.random(nx * ny) < 0.5
    else:
        raise ConfigurationError(f"unknown diagonal rule {diagonal!r}")

    jj, ii = np.divmod(np.arange(nx * ny), nx)
    p00 = jj * (nx + 1) + ii
    p10 = p00 + 1
    p01 = p00 + nx + 1
    p11 = p01 + 1
    first = np.where(forward[:, None], np.column_stack([p00, p10, p11]), np.column_stack([p00, p10, p01]))
    second = np.where(forward[:, None], np.column_stack([p00, p11, p01]), np.column_stack([p10, p11, p01]))
    triangles = np.stack([first, second], axis=1).reshape(-1, 3)
    return SurfaceTriangulation(points=points, triangles=triangles, grid_shape=(nx, ny))


def _check_levels(levels: np.ndarray) -> None:
    gaps = np.diff(levels, axis=0)
    bad = np.argwhere(gaps <= 0)
    if bad.size:
        k, v = bad[0]
        raise GenerationError(
            f"vertex {v}: layer top {levels[k + 1, v]:.6g} is not above bottom {levels[k, v]:.6g}")


def _kuhn_tets(nx: int, ny: int, level: int, points_per_level: int) -> np.ndarray:
    jj, ii = np.divmod(np.arange(nx * ny), nx)
    tets = []
    for path in KUHN_PATHS:
        ids = [
            (level + dz) * points_per_level + (jj + dy) * (nx + 1) + (ii + dx)
            for dx, dy, dz in path
        ]
        tets.append(np.column_stack(ids))
    return np.stack(tets, axis=1).reshape(-1, 4)


def _column_mesh(
    surface: SurfaceTriangulation,
    levels: np.ndarray,
    level_media: Sequence[tuple[float, float, int]],
    nz_tet: int = 0,
) -> HybridMesh:
    """Vertices at every (level, surface point); wedges between levels, Kuhn tets below nz_tet."""
    levels = np.asarray(levels, dtype=float)
    _check_levels(levels)
    nvs = surface.num_points
    vertices = np.column_stack([
        np.tile(surface.points, (len(levels), 1)),
        levels.ravel(),
    ])

    tris = surface.oriented_triangles()
    wedges, tets = [], []
    wedge_media, tet_media = [], []
    for k in range(len(levels) - 1):
        if k < nz_tet:
            if surface.grid_shape is None:
                raise GenerationError("tetrahedral layers need a structured surface grid")
            block = _kuhn_tets(*surface.grid_shape, k, nvs)
            tets.append(block)
            tet_media.extend([level_media[k]] * len(block))
        else:
            wedges.append(np.hstack([tris + k * nvs, tris + (k + 1) * nvs]))
            wedge_media.extend([level_media[k]] * len(tris))

    media = np.array(wedge_media + tet_media, dtype=float).reshape(-1, 3)
    mesh = HybridMesh(
        vertices=vertices,
        wedges=np.vstack(wedges) if wedges else np.zeros((0, 6), dtype=np.int64),
        tets=np.vstack(tets) if tets else np.zeros((0, 4), dtype=np.int64),
        rho=media[:, 0],
        kappa=media[:, 1],
        regions=media[:, 2].astype(np.int64),
    )
    return mesh.validate()


def _interpolated_levels(z_bottom: np.ndarray, z_top: np.ndarray, layers: int) -> np.ndarray:
    """(layers + 1, n) heights; the last level is z_top exactly."""
    m = np.arange(layers + 1)[:, None] / layers
    levels = z_bottom[None, :] + m * (z_top - z_bottom)[None, :]
    levels[-1] = z_top
    return levels


def extrude_layer(
    surface: SurfaceTriangulation,
    layers: int,
    rho: float = 1.0,
    kappa: float = 1.0,
    region: int = 0,
) -> HybridMesh:
    """Fill the space between surface.z_bottom and surface.z_top with `layers` wedge layers."""
    if layers < 1:
        raise GenerationError("extrusion needs at least one layer")
    if surface.z_bottom is None or surface.z_top is None:
        raise GenerationError("surface has no bottom/top heights")
    zb = np.asarray(surface.z_bottom, dtype=float)
    zt = np.asarray(surface.z_top, dtype=float)
    bad = np.flatnonzero(~(zt > zb))
    if bad.size:
        raise GenerationError(f"vertex {bad[0]}: inverted layer, z_top {zt[bad[0]]:.6g} <= z_bottom {zb[bad[0]]:.6g}")
    levels = _interpolated_levels(zb, zt, layers)
    mesh = _column_mesh(surface, levels, [(rho, kappa, region)] * layers)
    logger.info("Extruded %d layers: %s", layers, mesh.summary())
    return mesh


def stack_layers(surface: SurfaceTriangulation, specs: Sequence[LayerSpec]) -> HybridMesh:
    """Stack layers bottom to top; consecutive layers must share their interface."""
    if not specs:
        raise GenerationError("no layers to stack")
    x, y = surface.points[:, 0], surface.points[:, 1]
    levels = []
    media = []
    previous_top = None
    for index, spec in enumerate(specs):
        if spec.layers < 1:
            raise GenerationError(f"layer {index}: needs at least one sublayer")
        zb = np.broadcast_to(np.asarray(spec.z_bottom(x, y), dtype=float), x.shape)
        zt = np.broadcast_to(np.asarray(spec.z_top(x, y), dtype=float), x.shape)
        if previous_top is not None:
            scale = max(1.0, np.abs(previous_top).max())
            mismatch = np.abs(zb - previous_top)
            if mismatch.max() > INTERFACE_TOL * scale:
                v = int(np.argmax(mismatch))
                raise GenerationError(
                    f"interface between layers {index - 1} and {index} mismatched at vertex {v}")
            zb = previous_top
        sub = _interpolated_levels(zb, zt, spec.layers)
        levels.extend(sub if previous_top is None else sub[1:])
        region = index if spec.region is None else spec.region
        media.extend([(spec.rho, spec.kappa, region)] * spec.layers)
        previous_top = sub[-1]

    mesh = _column_mesh(surface, np.array(levels), media)
    logger.info("Stacked %d layers: %s", len(specs), mesh.summary())
    return mesh


def structured_hybrid_box(
    nx: int,
    ny: int,
    nz_wedge: int,
    nz_tet: int,
    wedge_media: tuple[float, float] = (1.0, 1.0),
    tet_media: tuple[float, float] = (1.0, 1.0),
) -> HybridMesh:
    """
    Box [-1,1]^3 with Kuhn-split hexes below and extruded wedges above.

    Tets carry region 0 and wedges region 1. Every hex is split along its
    (0,0,0)-(1,1,1) diagonal, which matches the forward surface diagonal.
    """
    nz = nz_wedge + nz_tet
    if min(nx, ny) < 1 or nz_wedge < 0 or nz_tet < 0 or nz < 1:
        raise GenerationError("hybrid box needs positive counts")
    surface = square_surface(nx, ny)
    z = np.linspace(-1.0, 1.0, nz + 1)
    levels = np.repeat(z[:, None], surface.num_points, axis=1)
    media = [(tet_media[0], tet_media[1], 0)] * nz_tet + [(wedge_media[0], wedge_media[1], 1)] * nz_wedge
    mesh = _column_mesh(surface, levels, media, nz_tet=nz_tet)
    logger.info("Built hybrid box %dx%dx(%d+%d): %s", nx, ny, nz_wedge, nz_tet, mesh.summary())
    return mesh


def wedge_box(nx: int, ny: int, nz: int, rho: float = 1.0, kappa: float = 1.0) -> HybridMesh:
    return structured_hybrid_box(nx, ny, nz, 0, wedge_media=(rho, kappa))


def _vertical_columns(mesh: HybridMesh):
    """Per vertex: column id, and the vertices directly below and above (-1 at column ends)."""
    _, column = np.unique(mesh.vertices[:, :2], axis=0, return_inverse=True)
    column = column.ravel()
    order = np.lexsort((mesh.vertices[:, 2], column))
    below = np.full(len(mesh.vertices), -1)
    above = np.full(len(mesh.vertices), -1)
    same = column[order[1:]] == column[order[:-1]]
    below[order[1:][same]] = order[:-1][same]
    above[order[:-1][same]] = order[1:][same]
    return column, below, above


def perturb_vertically(mesh: HybridMesh, amplitude: float, seed: int) -> HybridMesh:
    """
    Shift interior column vertices by uniform random amounts in
    +-amplitude * (local layer height). Column ends and tet vertices stay put.
    """
    if not 0.0 <= amplitude < MAX_AMPLITUDE:
        raise ConfigurationError(f"perturbation amplitude must lie in [0, {MAX_AMPLITUDE}), got {amplitude}")
    if amplitude == 0.0:
        return mesh.with_vertices(mesh.vertices.copy())

    _, below, above = _vertical_columns(mesh)
    movable = (below >= 0) & (above >= 0)
    movable[np.unique(mesh.tets)] = False
    z = mesh.vertices[:, 2]
    height = np.zeros_like(z)
    height[movable] = np.minimum(z[above[movable]] - z[movable], z[movable] - z[below[movable]])

    rng = np.random.default_rng(seed)
    for attempt in range(MAX_HALVINGS + 1):
        scale = amplitude / 2 ** attempt
        shift = rng.uniform(-1.0, 1.0, len(z)) * scale * height
        vertices = mesh.vertices.copy()
        vertices[:, 2] += np.where(movable, shift, 0.0)
        heights = vertices[mesh.wedges[:, 3:], 2] - vertices[mesh.wedges[:, :3], 2]
        if np.all(heights > 0):
            logger.debug("Perturbed %d vertices with amplitude %.3g", movable.sum(), scale)
            return mesh.with_vertices(vertices)
        logger.warning("Perturbation amplitude %.3g inverted a wedge; halving", scale)
    raise GenerationError(f"perturbation still inverts wedges after {MAX_HALVINGS} halvings")


def _levels_for_spacing(h: float) -> int:
    n = int(round(2.0 / h))
    if n < 1 or abs(n * h - 2.0) > 1e-9:
        raise ConfigurationError(f"mesh size h={h} does not divide the box width 2")
    return n


def arnold_box(n: int, amplitude: float = 0.25) -> HybridMesh:
    """
    Wedge box whose interior levels are displaced by +-amplitude*h in a
    checkerboard over (x index, level). The pattern is the same relative to h
    on every refinement, so elements never become affine.
    """
    surface = square_surface(n, n)
    h = 2.0 / n
    i_index = np.arange(surface.num_points) % (n + 1)
    levels = np.repeat(np.linspace(-1.0, 1.0, n + 1)[:, None], surface.num_points, axis=1)
    for k in range(1, n):
        levels[k] += amplitude * h * np.where((i_index + k) % 2 == 0, 1.0, -1.0)
    mesh = _column_mesh(surface, levels, [(1.0, 1.0, 0)] * n)
    logger.info("Built Arnold-type box n=%d: %s", n, mesh.summary())
    return mesh


def unstructured_box(n: int, seed: int = 0, jitter: float = 0.1, amplitude: float = 0.3) -> HybridMesh:
    """Random-diagonal surface with jittered interior points, extruded and vertically perturbed."""
    surface = square_surface(n, n, diagonal='random', seed=seed)
    h = 2.0 / n
    x, y = surface.points[:, 0], surface.points[:, 1]
    interior = (np.abs(np.abs(x) - 1) > 1e-12) & (np.abs(np.abs(y) - 1) > 1e-12)
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-jitter * h, jitter * h, surface.points.shape)
    surface.points[interior] += shift[interior]
    surface.grid_shape = None

    levels = np.repeat(np.linspace(-1.0, 1.0, n + 1)[:, None], surface.num_points, axis=1)
    mesh = _column_mesh(surface, levels, [(1.0, 1.0, 0)] * n)
    mesh = perturb_vertically(mesh, amplitude, seed)
    logger.info("Built unstructured box n=%d: %s", n, mesh.summary())
    return mesh


def family_mesh(family: MeshFamily | str, h: float, seed: int = 0) -> HybridMesh:
    """Box [-1,1]^3 of the given family at mesh size h."""
    family = MeshFamily(family)
    n = _levels_for_spacing(h)
    if family is MeshFamily.STRUCTURED:
        return wedge_box(n, n, n)
    if family is MeshFamily.ARNOLD:
        return arnold_box(n)
    return unstructured_box(n, seed=seed)


def wavy_layers(
    nx: int,
    ny: int,
    interfaces: Sequence[Interface],
    layers: Sequence[int],
    nz_tet: int = 0,
    media: dict | None = None,
) -> HybridMesh:
    """
    Wedge layers between wavy interfaces over [-1,1]^2, optionally on top of
    structured tets filling z in [-1, interfaces[0]].

    Regions: 0 for tets, i + 1 for wedge layer i. `media` maps region to
    (rho, kappa); missing regions get (1, 1).
    """
    if len(interfaces) != len(layers) + 1:
        raise GenerationError("need one more interface than layers")
    media = media or {}
    surface = square_surface(nx, ny)
    x, y = surface.points[:, 0], surface.points[:, 1]

    levels = []
    level_media = []
    if nz_tet:
        floor = interfaces[0]
        if floor.amplitude != 0.0 or not floor.base > -1.0:
            raise GenerationError("tetrahedra need a flat first interface above z=-1")
        z = np.linspace(-1.0, floor.base, nz_tet + 1)
        levels.extend(np.repeat(z[:-1, None], surface.num_points, axis=1))
        rho, kappa = media.get(0, (1.0, 1.0))
        level_media.extend([(rho, kappa, 0)] * nz_tet)

    bottom = np.broadcast_to(interfaces[0](x, y), x.shape).astype(float)
    levels.append(bottom)
    for index, count in enumerate(layers):
        top = np.broadcast_to(interfaces[index + 1](x, y), x.shape).astype(float)
        if count < 1:
            raise GenerationError(f"layer {index}: needs at least one sublayer")
        levels.extend(_interpolated_levels(levels[-1], top, count)[1:])
        rho, kappa = media.get(index + 1, (1.0, 1.0))
        level_media.extend([(rho, kappa, index + 1)] * count)

    mesh = _column_mesh(surface, np.array(levels), level_media, nz_tet=nz_tet)
    logger.info("Built wavy layered mesh: %s", mesh.summary())
    return mesh
