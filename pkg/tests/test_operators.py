"""
Tests for the factored wedge operators, tet operators and storage meter.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.geometry.factors import tet_geometry, wedge_geometry
from apps.geometry.mapping import map_tet_points, map_wedge_points
from apps.operators.dense import dense_float_count, dense_tet_operators, dense_wedge_operators
from apps.operators.lumped import build_lumped_wedge_operators
from apps.operators.storage import storage_report, wedge_budget
from apps.operators.tet import (
    apply_tet_derivatives,
    apply_tet_divergence,
    apply_tet_lift,
    build_tet_operators,
)
from apps.operators.wedge import (
    apply_wedge_derivatives,
    apply_wedge_divergence,
    apply_wedge_lift,
    build_all_wedge_operators,
    build_wedge_operators,
    weighted_triangle_mass,
)
from apps.reference.elements import build_references
from tests.factories import random_vertical_wedge

SLANTED_WEDGE = np.array([
    [0.1, 0.0, 0.0], [1.2, 0.3, 0.2], [0.2, 0.9, -0.1],
    [0.1, 0.0, 1.0], [1.2, 0.3, 1.6], [0.2, 0.9, 0.7],
])
SKEW_TET = np.array([[0.0, 0.0, 0.0], [1.0, 0.1, 0.0], [0.2, 1.1, 0.1], [0.1, 0.3, 0.9]])


class WedgeOperatorTests(SimpleTestCase):
    """Test factored wedge operators against dense quadrature-built ones."""

    def setUp(self):
        self.refs = build_references(3)
        self.geometry = wedge_geometry(SLANTED_WEDGE, self.refs)
        self.ops = build_wedge_operators(self.geometry, self.refs)
        self.dense = dense_wedge_operators(self.geometry, self.refs)
        self.rng = np.random.default_rng(0)

    def test_derivatives_match_dense(self):
        """Test that factored D_x, D_y, D_z equal the dense matrices."""
        u = self.rng.standard_normal(self.refs.wedge.num_nodes)
        dx, dy, dz = apply_wedge_derivatives(self.ops, u)
        np.testing.assert_allclose(dx, self.dense.Dx @ u, atol=1e-9)
        np.testing.assert_allclose(dy, self.dense.Dy @ u, atol=1e-9)
        np.testing.assert_allclose(dz, self.dense.Dz @ u, atol=1e-9)

    def test_derivatives_of_coordinates(self):
        """Test that the derivative of each coordinate is the unit vector."""
        x, y, z = map_wedge_points(SLANTED_WEDGE, self.refs.wedge.nodes).T
        for coordinate, expected in ((x, (1, 0, 0)), (y, (0, 1, 0)), (z, (0, 0, 1))):
            for derivative, value in zip(apply_wedge_derivatives(self.ops, coordinate), expected):
                np.testing.assert_allclose(derivative, value, atol=1e-10)

    def test_divergence_is_sum_of_derivatives(self):
        """Test the fused divergence against separate derivatives."""
        ux, uy, uz = self.rng.standard_normal((3, self.refs.wedge.num_nodes))
        expected = (apply_wedge_derivatives(self.ops, ux)[0] + apply_wedge_derivatives(self.ops, uy)[1]
                    + apply_wedge_derivatives(self.ops, uz)[2])
        np.testing.assert_allclose(apply_wedge_divergence(self.ops, ux, uy, uz), expected, atol=1e-10)

    def test_lift_matches_dense(self):
        """Test that the factored lift equals the dense face lifts."""
        fluxes = [self.rng.standard_normal(len(nodes)) for nodes in self.refs.wedge.face_nodes]
        lifted = apply_wedge_lift(self.ops, [f[None, :] for f in fluxes])[0]
        np.testing.assert_allclose(lifted, self.dense.lift_action(fluxes), atol=1e-9)

    def test_lumped_lift_matches_dense(self):
        """Test the GLL-collocated lift against dense lumped quadrature."""
        ops = build_lumped_wedge_operators(self.geometry, self.refs)
        dense = dense_wedge_operators(self.geometry, self.refs, lumped=True)
        fluxes = [self.rng.standard_normal(len(nodes)) for nodes in self.refs.wedge.face_nodes]
        lifted = apply_wedge_lift(ops, [f[None, :] for f in fluxes])[0]
        np.testing.assert_allclose(lifted, dense.lift_action(fluxes), atol=1e-9)

    def test_lumped_derivatives_equal_exact(self):
        """Test that lumping leaves the derivative operators unchanged."""
        ops = build_lumped_wedge_operators(self.geometry, self.refs)
        u = self.rng.standard_normal(self.refs.wedge.num_nodes)
        for lumped, exact in zip(apply_wedge_derivatives(ops, u), apply_wedge_derivatives(self.ops, u)):
            np.testing.assert_array_equal(lumped, exact)

    def test_batched_application(self):
        """Test that a stack of wedges applies each element independently."""
        geometries = [self.geometry, wedge_geometry(SLANTED_WEDGE * [1.0, 1.0, 2.0], self.refs)]
        ops = build_all_wedge_operators(geometries, self.refs, threads=1)
        u = self.rng.standard_normal((2, self.refs.wedge.num_nodes))
        stacked = apply_wedge_derivatives(ops, u)[0]
        np.testing.assert_allclose(stacked[1], apply_wedge_derivatives(ops[1:2], u[1])[0], rtol=0, atol=1e-13)


class RandomWedgeOperatorTests(SimpleTestCase):
    """Test factored actions against dense ones on random vertically mapped wedges."""

    TOL = 1e-11

    def assert_relative(self, actual, expected):
        self.assertLessEqual(np.linalg.norm(actual - expected), self.TOL * np.linalg.norm(expected))

    def test_actions_match_dense(self):
        """Test mass, derivative and lift actions for 20 wedges at each N = 1..4."""
        rng = np.random.default_rng(23)
        for n in range(1, 5):
            refs = build_references(n)
            nt, n1 = refs.triangle.num_nodes, n + 1
            for _ in range(20):
                geometry = wedge_geometry(random_vertical_wedge(rng), refs)
                ops = build_wedge_operators(geometry, refs)
                dense = dense_wedge_operators(geometry, refs)
                u = rng.standard_normal(refs.wedge.num_nodes)
                with self.subTest(n=n):
                    mass = weighted_triangle_mass(geometry, refs) @ u.reshape(nt, n1) @ refs.interval.mass
                    self.assert_relative(mass.ravel(), dense.mass @ u)
                    for applied, matrix in zip(apply_wedge_derivatives(ops, u), (dense.Dx, dense.Dy, dense.Dz)):
                        self.assert_relative(applied, matrix @ u)
                    fluxes = [rng.standard_normal(len(nodes)) for nodes in refs.wedge.face_nodes]
                    lifted = apply_wedge_lift(ops, [f[None, :] for f in fluxes])[0]
                    self.assert_relative(lifted, dense.lift_action(fluxes))


class TetOperatorTests(SimpleTestCase):
    """Test affine tet operators."""

    def setUp(self):
        self.refs = build_references(3)
        self.geometry = tet_geometry(SKEW_TET, self.refs)
        self.ops = build_tet_operators(self.geometry, self.refs)
        self.dense = dense_tet_operators(self.geometry, self.refs)
        self.rng = np.random.default_rng(1)

    def test_derivatives_match_dense(self):
        """Test the strong derivatives against the weak dense matrices."""
        u = self.rng.standard_normal(self.refs.tet.num_nodes)
        for applied, matrix in zip(apply_tet_derivatives(self.ops, u), (self.dense.Dx, self.dense.Dy, self.dense.Dz)):
            np.testing.assert_allclose(applied, matrix @ u, atol=1e-9)

    def test_polynomial_derivative(self):
        """Test exact differentiation of a cubic in physical coordinates."""
        x, y, z = map_tet_points(SKEW_TET, self.refs.tet.nodes).T
        dx, dy, dz = apply_tet_derivatives(self.ops, x ** 2 * y + z ** 3)
        np.testing.assert_allclose(dx, 2 * x * y, atol=1e-10)
        np.testing.assert_allclose(dy, x ** 2, atol=1e-10)
        np.testing.assert_allclose(dz, 3 * z ** 2, atol=1e-10)
        np.testing.assert_allclose(apply_tet_divergence(self.ops, x, y, z), 3.0, atol=1e-10)

    def test_lift_matches_dense(self):
        """Test the scaled reference lift against physical face masses."""
        nfp = self.refs.tet.num_face_nodes
        fluxes = self.rng.standard_normal((4, nfp))
        lifted = apply_tet_lift(self.ops, fluxes[None])[0]
        np.testing.assert_allclose(lifted, self.dense.lift_action(list(fluxes)), atol=1e-9)


class StorageTests(SimpleTestCase):
    """Test per-element storage counts."""

    def test_wedge_storage_formula(self):
        """Test that stored floats per wedge follow the factored layout within budget for N = 1..9."""
        for n in range(1, 10):
            refs = build_references(n)
            nt, n1 = refs.triangle.num_nodes, n + 1
            ops = build_wedge_operators(wedge_geometry(SLANTED_WEDGE, refs), refs)
            tet_ops = build_tet_operators(tet_geometry(SKEW_TET, refs), refs)
            with self.subTest(n=n):
                self.assertEqual(ops.floats_per_element(), nt * nt + 3 * nt * n1 + 2 * n1 + 7)
                self.assertLessEqual(ops.floats_per_element(), wedge_budget(refs))
                self.assertEqual(storage_report(ops, tet_ops).tet_floats, 14)

    def test_report_against_dense(self):
        """Test that the factored storage undercuts the dense count."""
        refs = build_references(4)
        wedge_ops = build_wedge_operators(wedge_geometry(SLANTED_WEDGE, refs), refs)
        tet_ops = build_tet_operators(tet_geometry(SKEW_TET, refs), refs)
        report = storage_report(wedge_ops, tet_ops)
        self.assertEqual(report.tet_floats, 14)
        self.assertEqual(report.dense_wedge_floats, dense_float_count(refs))
        self.assertLess(report.dense_ratio, 0.2)
        self.assertTrue(report.within_budget)
        self.assertEqual(report.total_floats, report.wedge_floats + 14)
