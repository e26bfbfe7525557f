"""
Tests for global assembly, spectra, error norms, convergence and benchmarks.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from apps.analysis.assembly import assemble_global, check_dof_cap, global_mass_matrix
from apps.analysis.bench import bench, bench_mesh
from apps.analysis.convergence import (
    ConvergenceLevel,
    ConvergenceRecord,
    check_levels,
    fit_rate,
    run_level,
)
from apps.analysis.errors import l2_error
from apps.analysis.services import BenchService, ConvergenceService, SpectrumService
from apps.analysis.spectrum import spectrum, tolerance_for, verdict
from apps.core.exceptions import AnalysisError, ConfigurationError
from apps.mesh.generators import perturb_vertically, structured_hybrid_box, wedge_box
from apps.solver.discretization import build_discretization
from apps.solver.enums import FluxMode, QuadratureMode
from apps.solver.fields import set_initial_condition, standing_wave
from apps.solver.state import FluxConfig


def perturbed_wedges():
    """16 wedges with a randomly displaced middle level."""
    return perturb_vertically(wedge_box(2, 2, 2), 0.4, seed=1)


class AssemblyTests(SimpleTestCase):
    """Test the dense global operator."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.disc = build_discretization(perturbed_wedges(), 2)

    def test_size(self):
        """Test that 16 wedges at N=2 give a 1152 x 1152 matrix."""
        operator = assemble_global(self.disc, FluxConfig(FluxMode.UPWIND))
        self.assertEqual(operator.size, 1152)
        self.assertEqual(operator.metadata['wedges'], 16)

    def test_columns_match_rhs(self):
        """Test that A times a state equals the rhs of that state."""
        from apps.solver.rhs import compute_rhs

        operator = assemble_global(self.disc)
        rng = np.random.default_rng(2)
        state = self.disc.layout.from_flat(rng.standard_normal(self.disc.layout.num_dofs))
        np.testing.assert_allclose(
            operator.matrix @ state.to_flat(), compute_rhs(state, self.disc).to_flat(), atol=1e-10)

    def test_dof_cap(self):
        """Test that oversized problems are refused before assembly."""
        with self.assertRaises(AnalysisError):
            check_dof_cap(self.disc, max_dofs=1000)

    def test_energy_quadratic_form(self):
        """Test that the symmetric part of M A is negative semidefinite for upwind and zero for central."""
        mass = global_mass_matrix(self.disc)
        np.testing.assert_allclose(mass, mass.T, atol=1e-13)
        upwind = mass @ assemble_global(self.disc, FluxConfig(FluxMode.UPWIND)).matrix
        central = mass @ assemble_global(self.disc, FluxConfig(FluxMode.CENTRAL)).matrix
        sym_upwind = 0.5 * (upwind + upwind.T)
        sym_central = 0.5 * (central + central.T)
        scale = np.abs(upwind).max()
        self.assertLess(np.linalg.eigvalsh(sym_upwind).max(), 1e-11 * scale)
        self.assertLess(np.abs(sym_central).max(), 1e-11 * scale)


class SpectrumTests(SimpleTestCase):
    """Test stability verdicts on a perturbed 16-wedge mesh at N=2."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.mesh = perturbed_wedges()

    def test_exact_upwind_is_stable(self):
        """Test that no eigenvalue has a positive real part beyond roundoff."""
        result = SpectrumService.run(self.mesh, 2, FluxConfig(FluxMode.UPWIND))
        self.assertTrue(result.verdict.stable)
        self.assertTrue(result.verdict.line().startswith('STABLE'))
        self.assertLess(result.eigenvalues.real.min(), 0.0)

    def test_exact_central_is_imaginary(self):
        """Test that central fluxes give a purely imaginary spectrum."""
        result = SpectrumService.run(self.mesh, 2, FluxConfig(FluxMode.CENTRAL))
        self.assertTrue(result.verdict.purely_imaginary)

    def test_lumped_is_unstable(self):
        """Test that lumping in t produces eigenvalues with positive real parts."""
        for mode in (FluxMode.UPWIND, FluxMode.CENTRAL):
            result = SpectrumService.run(self.mesh, 2, FluxConfig(mode), QuadratureMode.LUMPED)
            self.assertGreater(result.verdict.max_real, 0.0)
            self.assertFalse(result.verdict.stable)
            self.assertTrue(result.verdict.line().startswith('UNSTABLE'))

    def test_lumped_and_exact_differ(self):
        """Test that lumping changes the operator on a perturbed mesh."""
        exact = assemble_global(build_discretization(self.mesh, 2))
        lumped = assemble_global(build_discretization(self.mesh, 2, QuadratureMode.LUMPED))
        self.assertGreater(np.linalg.norm(exact.matrix - lumped.matrix), 1e-8)

    def test_spectrum_file(self):
        """Test that eigenvalues are written as re,im rows."""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'spectrum.csv'
            mesh = wedge_box(1, 1, 1)
            result = SpectrumService.run(mesh, 1, output=path)
            lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 're,im')
        self.assertEqual(len(lines) - 1, result.operator.size)

    def test_verdict_tolerances(self):
        """Test tolerance selection and verdicts on hand-made spectra."""
        self.assertEqual(tolerance_for('central'), 1e-8)
        self.assertEqual(tolerance_for(FluxMode.UPWIND), 1e-10)
        good = verdict(np.array([-1.0 + 2j, -1.0 - 2j, 1e-12 + 10j]))
        self.assertTrue(good.stable)
        self.assertFalse(good.purely_imaginary)
        bad = verdict(np.array([1e-3 + 1j, -1.0]))
        self.assertFalse(bad.stable)

    def test_spectrum_sorted(self):
        """Test that eigenvalues come back sorted by real part."""
        values = spectrum(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_array_equal(values.real, [-1.0, 2.0, 3.0])


class ErrorNormTests(SimpleTestCase):
    """Test the cubature L2 error."""

    def setUp(self):
        self.mesh = perturb_vertically(structured_hybrid_box(2, 2, 2, 1), 0.2, seed=5)

    def test_standing_wave_norm(self):
        """Test that the zero state is at unit distance from the standing wave."""
        disc = build_discretization(self.mesh, 3)
        self.assertAlmostEqual(l2_error(disc.layout.zeros(), disc, standing_wave, t=0.0), 1.0, places=6)

    def test_interpolation_error_decreases(self):
        """Test that interpolants converge as the degree grows."""
        errors = []
        for degree in (1, 3, 5):
            disc = build_discretization(self.mesh, degree)
            errors.append(l2_error(set_initial_condition(disc, standing_wave), disc, standing_wave))
        self.assertTrue(errors[0] > errors[1] > errors[2])
        self.assertLess(errors[2], 5e-3)


class ConvergenceTests(SimpleTestCase):
    """Test rate fitting and convergence studies."""

    def test_fit_rate(self):
        """Test that an exact power law gives its exponent."""
        hs = [1.0, 0.5, 0.25]
        self.assertAlmostEqual(fit_rate(hs, [3 * h ** 4 for h in hs]), 4.0, places=12)

    def test_record_uses_last_stable_levels(self):
        """Test that unstable levels are skipped by the fit."""
        levels = [
            ConvergenceLevel(2.0, 1.0),
            ConvergenceLevel(1.0, 0.25),
            ConvergenceLevel(0.5, 0.0625),
            ConvergenceLevel(0.25, float('nan'), stable=False),
        ]
        record = ConvergenceRecord('structured', 1, levels)
        self.assertAlmostEqual(record.rate, 2.0, places=12)
        rates = record.pairwise_rates()
        self.assertTrue(np.isnan(rates[0]))
        self.assertAlmostEqual(rates[1], 2.0, places=12)
        self.assertTrue(np.isnan(rates[3]))

    def test_record_validation(self):
        """Test that unordered sizes and non-positive errors are rejected."""
        with self.assertRaises(AnalysisError):
            ConvergenceRecord('arnold', 1, [ConvergenceLevel(0.5, 1.0), ConvergenceLevel(1.0, 0.5)])
        with self.assertRaises(AnalysisError):
            ConvergenceRecord('arnold', 1, [ConvergenceLevel(1.0, 0.0)])

    def test_check_levels(self):
        """Test that fewer than three sizes are refused and sizes are sorted."""
        with self.assertRaises(AnalysisError):
            check_levels([1.0, 0.5])
        self.assertEqual(check_levels([0.25, 1.0, 0.5]), [1.0, 0.5, 0.25])

    def test_study_through_tasks(self):
        """Test a small structured study dispatched through eager tasks."""
        record = ConvergenceService.study('structured', 1, [1.0, 0.5, 0.25], final_time=0.05)
        self.assertEqual([level.h for level in record.levels], [1.0, 0.5, 0.25])
        self.assertTrue(all(level.stable for level in record.levels))
        self.assertGreater(record.rate, 1.5)
        self.assertLess(record.rate, 3.0)

        table = ConvergenceService.table([record])
        self.assertIn('Structured', table)
        self.assertIn('N = 1', table)
        with tempfile.TemporaryDirectory() as directory:
            path = ConvergenceService.write([record], Path(directory) / 'convergence.csv')
            rows = path.read_text().splitlines()
        self.assertEqual(rows[0], 'family,N,h,error,rate,steps,dt,stable')
        self.assertEqual(len(rows), 4)


class BenchTests(SimpleTestCase):
    """Test per-phase timings."""

    def test_minimum_steps(self):
        """Test that short benchmarks are refused."""
        with self.assertRaises(ConfigurationError):
            bench(bench_mesh(1), 1, steps=10)

    def test_bench_reports_every_phase(self):
        """Test that each phase is timed and storage is attached."""
        results = BenchService.run(bench_mesh(1), [1], steps=100)
        result = results[0]
        self.assertEqual(set(result.ns_per_element), {'wedge_volume', 'wedge_surface', 'tet_volume', 'tet_surface'})
        self.assertTrue(all(v > 0 for v in result.ns_per_dof.values()))
        self.assertEqual(result.storage.tet_floats, 14)
        self.assertEqual(len(result.as_row()), 14)
        self.assertIn('N', BenchService.describe(results))


@tag('slow')
class FamilyConvergenceTests(SimpleTestCase):
    """Test observed rates and absolute errors on every mesh family."""

    SIZES = [1.0, 0.5, 0.25]
    # Reference rates for N = 1, 2, 3.
    EXPECTED_RATES = {
        'structured': (2.01, 3.15, 3.97),
        'arnold': (1.9, 3.13, 3.99),
        'unstructured': (2.0, 3.0, 4.0),
    }

    def test_rates_per_family_and_degree(self):
        """Test that fitted rates lie within 0.3 of the reference rates."""
        for family, expected in self.EXPECTED_RATES.items():
            for degree, rate in zip((1, 2, 3), expected):
                record = ConvergenceService.study(family, degree, self.SIZES)
                with self.subTest(family=family, degree=degree):
                    self.assertTrue(all(level.stable for level in record.levels))
                    self.assertLess(abs(record.rate - rate), 0.3)

    def test_structured_absolute_errors(self):
        """Test the h = 0.125 structured errors against reference values within a factor of 3."""
        for degree, expected in ((2, 6.91e-05), (3, 1.7e-06)):
            level = run_level('structured', degree, 0.125)
            with self.subTest(degree=degree):
                self.assertTrue(level.stable)
                self.assertGreater(level.error, expected / 3)
                self.assertLess(level.error, expected * 3)


@tag('slow')
class BenchTrendTests(SimpleTestCase):
    """Test the per-DOF cost trend of wedges against tets."""

    def test_volume_ratio_decreases(self):
        """Test that wedge over tet volume ns/DOF falls from N = 2 to N = 5."""
        results = BenchService.run(bench_mesh(3), [2, 3, 4, 5], steps=100, threads=1)
        ratios = [result.ratio('volume') for result in results]
        self.assertTrue(all(b < a for a, b in zip(ratios, ratios[1:])), ratios)
