"""
Tests for mesh generation, validation, file IO and connectivity.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import (
    ConfigurationError,
    ConnectivityError,
    GenerationError,
    GeometryError,
    MeshError,
    MeshFormatError,
)
from apps.geometry.factors import build_geometries, mesh_volume
from apps.mesh.connectivity import BOUNDARY, NO_FACE, build_connectivity
from apps.mesh.generators import (
    Interface,
    LayerSpec,
    MeshFamily,
    SurfaceTriangulation,
    arnold_box,
    extrude_layer,
    family_mesh,
    perturb_vertically,
    stack_layers,
    structured_hybrid_box,
    wavy_layers,
    wedge_box,
)
from apps.mesh.hybrid import HybridMesh, is_vertically_mapped
from apps.mesh.io import load_mesh, save_mesh, save_surface
from apps.mesh.services import MeshService
from apps.reference.elements import build_references

UNIT_WEDGE = np.array([
    [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0],
])


def unit_square(z_bottom=0.0, z_top=1.0):
    """Two-triangle surface over the unit square."""
    return SurfaceTriangulation(
        points=[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        triangles=[[0, 1, 2], [0, 2, 3]],
        z_bottom=np.full(4, z_bottom),
        z_top=np.full(4, z_top),
    )


class HybridMeshTests(SimpleTestCase):
    """Test the mesh container and its validation."""

    def test_vertically_mapped_predicate(self):
        """Test that sloped tops pass and tilted side edges fail."""
        sloped = UNIT_WEDGE.copy()
        sloped[3:, 2] = [1.0, 1.5, 2.0]
        self.assertTrue(is_vertically_mapped(sloped))
        tilted = UNIT_WEDGE.copy()
        tilted[4, 0] = 1.2
        self.assertFalse(is_vertically_mapped(tilted))

    def test_validate_rejects_non_vertical_wedge(self):
        """Test that a wedge with a tilted edge is rejected."""
        vertices = UNIT_WEDGE.copy()
        vertices[4, 0] = 1.2
        mesh = HybridMesh(vertices, [range(6)], np.zeros((0, 4)), 1.0, 1.0, 0)
        with self.assertRaises(MeshError):
            mesh.validate()

    def test_validate_rejects_inverted_wedge(self):
        """Test that a clockwise bottom triangle is a geometry error."""
        mesh = HybridMesh(UNIT_WEDGE, [[0, 2, 1, 3, 5, 4]], np.zeros((0, 4)), 1.0, 1.0, 0)
        with self.assertRaises(GeometryError):
            mesh.validate()

    def test_validate_rejects_nonpositive_media(self):
        """Test that rho <= 0 names the offending element."""
        mesh = HybridMesh(UNIT_WEDGE, [range(6)], np.zeros((0, 4)), 0.0, 1.0, 0)
        with self.assertRaisesMessage(MeshError, 'element 0'):
            mesh.validate()

    def test_media_broadcast(self):
        """Test that scalar media expand to one value per element."""
        mesh = wedge_box(2, 2, 1, rho=2.0, kappa=8.0)
        self.assertEqual(mesh.rho.shape, (mesh.num_elements,))
        np.testing.assert_allclose(mesh.wavespeed, 2.0)
        np.testing.assert_allclose(mesh.impedance, 4.0)


class GeneratorTests(SimpleTestCase):
    """Test the built-in mesh generators."""

    def test_wedge_box_counts(self):
        """Test that an n x n x n wedge box has 2 n^3 wedges."""
        mesh = wedge_box(2, 2, 2)
        self.assertEqual(mesh.num_wedges, 16)
        self.assertEqual(mesh.num_tets, 0)
        mesh.validate()

    def test_hybrid_box_counts(self):
        """Test that Kuhn splitting yields six tets per hex."""
        mesh = structured_hybrid_box(2, 2, 1, 1)
        self.assertEqual(mesh.num_wedges, 8)
        self.assertEqual(mesh.num_tets, 24)
        mesh.validate()
        np.testing.assert_array_equal(mesh.regions[:mesh.num_wedges], 1)
        np.testing.assert_array_equal(mesh.regions[mesh.num_wedges:], 0)

    def test_perturbation_is_seeded(self):
        """Test that equal seeds give equal meshes and tets stay put."""
        mesh = structured_hybrid_box(2, 2, 3, 1)
        a = perturb_vertically(mesh, 0.3, seed=7)
        b = perturb_vertically(mesh, 0.3, seed=7)
        c = perturb_vertically(mesh, 0.3, seed=8)
        self.assertTrue(a.same_as(b))
        self.assertFalse(a.same_as(c))
        tet_vertices = np.unique(mesh.tets)
        np.testing.assert_array_equal(a.vertices[tet_vertices], mesh.vertices[tet_vertices])
        np.testing.assert_array_equal(a.vertices[:, :2], mesh.vertices[:, :2])
        a.validate()

    def test_perturbation_amplitude_range(self):
        """Test that amplitudes outside [0, 0.45) are rejected."""
        with self.assertRaises(ConfigurationError):
            perturb_vertically(wedge_box(1, 1, 2), 0.5, seed=0)

    def test_arnold_box_is_not_affine(self):
        """Test that Arnold-type boxes carry non-constant Jacobians."""
        mesh = arnold_box(4)
        mesh.validate()
        tops = mesh.vertices[mesh.wedges[:, 3:], 2] - mesh.vertices[mesh.wedges[:, :3], 2]
        self.assertGreater(np.ptp(tops, axis=1).max(), 0.0)

    def test_family_mesh_spacing(self):
        """Test that h must divide the box width."""
        self.assertEqual(family_mesh(MeshFamily.STRUCTURED, 1.0).num_wedges, 16)
        with self.assertRaises(ConfigurationError):
            family_mesh(MeshFamily.STRUCTURED, 0.3)

    def test_wavy_layers(self):
        """Test that wavy interfaces produce valid per-layer regions."""
        interfaces = [Interface(-1.0), Interface(0.0, 0.1, 1.0), Interface(1.0)]
        mesh = wavy_layers(3, 3, interfaces, [2, 1])
        mesh.validate()
        self.assertEqual(mesh.num_wedges, 18 * 3)
        self.assertEqual(set(np.unique(mesh.regions)), {1, 2})

    def test_extrusion_levels(self):
        """Test that sublayer interfaces interpolate linearly between the surfaces."""
        mesh = extrude_layer(unit_square(), 2)
        self.assertEqual(mesh.num_wedges, 4)
        np.testing.assert_allclose(np.unique(mesh.vertices[:, 2]), [0.0, 0.5, 1.0])

    def test_extrusion_rejects_inverted_layer(self):
        """Test that a top below the bottom names the vertex."""
        surface = unit_square()
        surface.z_top[2] = -0.5
        with self.assertRaisesMessage(GenerationError, 'vertex 2'):
            extrude_layer(surface, 1)

    def test_stack_layers(self):
        """Test that stacked layers share interfaces and carry their own media."""
        specs = [
            LayerSpec(lambda x, y, lo=lo: lo, lambda x, y, hi=lo + 1 / 3: hi, 1, kappa=kappa)
            for lo, kappa in ((0.0, 1.0), (1 / 3, 4.0), (2 / 3, 9.0))
        ]
        mesh = stack_layers(unit_square(), specs)
        self.assertEqual(mesh.num_wedges, 6)
        self.assertEqual(len(mesh.vertices), 16)
        np.testing.assert_array_equal(mesh.regions, [0, 0, 1, 1, 2, 2])
        np.testing.assert_allclose(mesh.wavespeed, [1, 1, 2, 2, 3, 3])
        geometries = build_geometries(mesh, build_references(1), threads=1)
        self.assertAlmostEqual(mesh_volume(geometries), 1.0, places=12)

    def test_stack_layers_mismatch(self):
        """Test that a gap between layers is rejected."""
        specs = [LayerSpec(lambda x, y: 0.0, lambda x, y: 0.5, 1), LayerSpec(lambda x, y: 0.6, lambda x, y: 1.0, 1)]
        with self.assertRaises(GenerationError):
            stack_layers(unit_square(), specs)

    def test_all_tet_box(self):
        """Test that a box without wedge layers is a watertight tet mesh."""
        mesh = structured_hybrid_box(2, 2, 0, 2)
        self.assertEqual(mesh.num_tets, 48)
        self.assertEqual(mesh.num_wedges, 0)
        conn = build_connectivity(mesh, build_references(1))
        # 6 sides x 4 squares x 2 triangles
        self.assertEqual(conn.num_boundary_faces, 48)


class MeshFileTests(SimpleTestCase):
    """Test reading and writing mesh files."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name) / 'box.mesh'

    def tearDown(self):
        self.directory.cleanup()

    def test_save_and_load_are_bitwise(self):
        """Test that a perturbed hybrid mesh survives a file round trip exactly."""
        mesh = perturb_vertically(structured_hybrid_box(2, 1, 2, 1), 0.2, seed=3)
        save_mesh(mesh, self.path)
        self.assertTrue(load_mesh(self.path).same_as(mesh))

    def test_parse_error_carries_line(self):
        """Test that a malformed vertex line is reported with its line number."""
        self.path.write_text('$Vertices\n2\n0 0 0\n1 1\n$EndVertices\n')
        with self.assertRaises(MeshFormatError) as ctx:
            load_mesh(self.path)
        self.assertIn('line 4', str(ctx.exception))

    def test_out_of_range_index(self):
        """Test that a wedge referencing a missing vertex is rejected."""
        self.path.write_text(
            '$Vertices\n1\n0 0 0\n$EndVertices\n$Wedges\n1\n1 2 3 4 5 6\n$EndWedges\n')
        with self.assertRaises(MeshError):
            load_mesh(self.path)

    def test_generate_reports_jacobians(self):
        """Test that the mesh service writes the file and reports J."""
        report = MeshService.generate({'generator': 'box', 'nx': 2, 'ny': 2, 'nz': 2}, self.path)
        self.assertTrue(self.path.exists())
        self.assertEqual(report.num_wedges, 16)
        self.assertAlmostEqual(report.min_jacobian, 1.0 / 8.0, places=12)
        self.assertAlmostEqual(report.max_jacobian, 1.0 / 8.0, places=12)

    def test_surface_generator(self):
        """Test that a saved surface file is extruded by the mesh service."""
        surface_path = Path(self.directory.name) / 'layer.surface'
        save_surface(unit_square(0.0, 2.0), surface_path)
        mesh = MeshService.build({'generator': 'surface', 'path': str(surface_path), 'layers': 3})
        self.assertEqual(mesh.num_wedges, 6)
        self.assertAlmostEqual(mesh.vertices[:, 2].max(), 2.0)


class ConnectivityTests(SimpleTestCase):
    """Test face pairing and node matching."""

    def setUp(self):
        self.refs = build_references(2)

    def test_neighbors_are_symmetric(self):
        """Test that every interior face points back at its partner."""
        mesh = perturb_vertically(structured_hybrid_box(2, 2, 2, 1), 0.2, seed=1)
        conn = build_connectivity(mesh, self.refs)
        for e in range(mesh.num_elements):
            for f in range(mesh.num_faces(e)):
                n, nf = conn.partner(e, f)
                if n >= 0:
                    self.assertEqual(conn.partner(n, nf), (e, f))
        np.testing.assert_array_equal(conn.neighbor[mesh.num_wedges:, 4], NO_FACE)

    def test_boundary_face_count(self):
        """Test that the outer surface of a wedge box is all boundary."""
        mesh = wedge_box(2, 2, 2)
        conn = build_connectivity(mesh, self.refs)
        # 8 triangles top and bottom, 4 sides x 2 squares x 2 levels
        self.assertEqual(conn.num_boundary_faces, 16 + 16)
        self.assertEqual(int((conn.neighbor == BOUNDARY).sum()), conn.num_boundary_faces)
        self.assertTrue(all(tag == 'reflect' for tag in conn.boundary_tags.values()))

    def test_single_wedge_is_all_boundary(self):
        """Test that a lone wedge has five boundary faces."""
        mesh = HybridMesh(UNIT_WEDGE, [range(6)], np.zeros((0, 4)), 1.0, 1.0, 0)
        conn = build_connectivity(mesh, self.refs)
        self.assertEqual(conn.num_boundary_faces, 5)

    def test_node_maps_match_coordinates(self):
        """Test that mapped neighbor nodes sit on the same points."""
        from apps.geometry.mapping import element_nodes

        mesh = structured_hybrid_box(1, 1, 1, 1)
        conn = build_connectivity(mesh, self.refs)
        for (e, f), theirs in conn.node_maps.items():
            n, _ = conn.partner(e, f)
            mine = (self.refs.wedge if e < mesh.num_wedges else self.refs.tet).face_nodes[f]
            np.testing.assert_allclose(
                element_nodes(mesh, self.refs, e)[mine], element_nodes(mesh, self.refs, n)[theirs], atol=1e-12)

    def test_overshared_face(self):
        """Test that a face shared by three elements is rejected."""
        mesh = wedge_box(1, 1, 1)
        doubled = HybridMesh(
            mesh.vertices, np.vstack([mesh.wedges, mesh.wedges[:1]]), mesh.tets, 1.0, 1.0, 0)
        with self.assertRaises(ConnectivityError):
            build_connectivity(doubled, self.refs)
