"""
Tests for configuration loading and the management commands.
"""
import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.analysis.convergence import ConvergenceLevel
from apps.cli.config import load_mesh_config, load_run_config, run_options
from apps.cli.serializers import flatten_errors
from apps.core.exceptions import ConfigurationError, InstabilityError
from apps.solver.enums import FluxMode, IntegratorName

MINIMAL_RUN = """\
degree = 1
final_time = 0.05

[mesh]
generator = "box"
nx = 1
ny = 1
nz = 1
"""


class CommandTestCase(SimpleTestCase):
    """Temporary directory plus helpers for writing configs."""

    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()
        self.directory = Path(self._directory.name)

    def tearDown(self):
        self._directory.cleanup()

    def write(self, name: str, text: str) -> Path:
        path = self.directory / name
        path.write_text(text)
        return path

    def call(self, *args, **kwargs) -> str:
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()


class RunConfigTests(CommandTestCase):
    """Test TOML loading and validation."""

    def test_defaults(self):
        """Test that a minimal file is filled in with defaults."""
        config = load_run_config(self.write('run.toml', MINIMAL_RUN))
        self.assertEqual(config['flux'], FluxMode.UPWIND.value)
        self.assertEqual(config['integrator'], IntegratorName.LSRK45.value)
        self.assertEqual(config['output_dir'], 'output')
        self.assertEqual(config['media'], [])
        options = run_options(config, threads=1)
        self.assertEqual(options.degree, 1)
        self.assertEqual(options.flux.penalties(1.0), (0.5, 1.0))
        self.assertEqual(options.output_dir, Path('output'))

    def test_overrides(self):
        """Test that non-None overrides replace file values."""
        config = load_run_config(self.write('run.toml', MINIMAL_RUN), {'degree': 3, 'final_time': None})
        self.assertEqual(config['degree'], 3)
        self.assertEqual(config['final_time'], 0.05)

    def test_missing_file(self):
        """Test that a missing file is a configuration error."""
        with self.assertRaisesMessage(ConfigurationError, 'not found'):
            load_run_config(self.directory / 'absent.toml')

    def test_syntax_error_has_line(self):
        """Test that TOML syntax errors report a line number."""
        path = self.write('bad.toml', 'degree = 2\nfinal_time = \n')
        with self.assertRaisesMessage(ConfigurationError, 'line 2'):
            load_run_config(path)

    def test_unknown_keys(self):
        """Test that unknown keys are refused at the top level and inside [mesh]."""
        with self.assertRaisesMessage(ConfigurationError, 'bogus: Unknown field.'):
            load_run_config(self.write('a.toml', 'bogus = 1\n' + MINIMAL_RUN))
        with self.assertRaisesMessage(ConfigurationError, 'mesh.colour: Unknown field.'):
            load_run_config(self.write('b.toml', MINIMAL_RUN + 'colour = "red"\n'))

    def test_degree_out_of_range(self):
        """Test that the message names the allowed degree range."""
        path = self.write('run.toml', MINIMAL_RUN.replace('degree = 1', 'degree = 12'))
        with self.assertRaisesMessage(ConfigurationError, 'degree: Must be in [1, 9], got 12.'):
            load_run_config(path)

    def test_generator_keys(self):
        """Test that each generator requires its own keys."""
        path = self.write('run.toml', MINIMAL_RUN.replace('generator = "box"', 'generator = "hybrid_box"'))
        with self.assertRaises(ConfigurationError) as ctx:
            load_run_config(path)
        self.assertIn('mesh.nz_wedge', str(ctx.exception))
        self.assertIn('mesh.nz_tet', str(ctx.exception))

    def test_media_must_be_positive(self):
        """Test that non-positive media are rejected per entry."""
        path = self.write('run.toml', MINIMAL_RUN + '\n[[media]]\nregion = 1\nrho = 0.0\nkappa = 1.0\n')
        with self.assertRaisesMessage(ConfigurationError, 'media[0].rho: Must be positive.'):
            load_run_config(path)

    def test_mesh_config(self):
        """Test that mesh-only files skip the run fields."""
        config = load_mesh_config(self.write('mesh.toml', '[mesh]\ngenerator = "family"\nfamily = "arnold"\nh = 0.5\n'))
        self.assertEqual(config['mesh']['family'], 'arnold')

    def test_shipped_configs(self):
        """Test that every sample configuration validates."""
        paths = sorted((Path(settings.BASE_DIR) / 'configs').glob('*.toml'))
        self.assertTrue(paths)
        for path in paths:
            config = load_run_config(path)
            self.assertIn(config['mesh']['generator'], ('hybrid_box', 'wavy_layers'))

    def test_flatten_errors(self):
        """Test that nested error details become dotted paths."""
        detail = {'mesh': {'nx': ['Bad.']}, 'media': [{}, {'rho': ['Low.']}], 'degree': ['Big.']}
        self.assertEqual(
            flatten_errors(detail), ['mesh.nx: Bad.', 'media[1].rho: Low.', 'degree: Big.'])


class RunCommandTests(CommandTestCase):
    """Test the run command end to end."""

    def test_minimal_run(self):
        """Test that a one-hex run writes the energy log and summary."""
        config = self.write('run.toml', MINIMAL_RUN)
        output = self.directory / 'out'
        text = self.call('run', str(config), '--output-dir', str(output), '--threads', '1')
        self.assertIn('N=1 elements=2', text)
        energy = (output / 'energy.csv').read_text().splitlines()
        self.assertEqual(energy[0], 'time,energy')
        self.assertGreater(len(energy), 2)
        summary = json.loads((output / 'summary.json').read_text())
        self.assertEqual(summary['degree'], 1)
        self.assertLessEqual(summary['final_energy'], summary['initial_energy'] * (1 + 1e-9))

    def test_configuration_exit_code(self):
        """Test that configuration errors exit with code 2."""
        config = self.write('run.toml', MINIMAL_RUN)
        with self.assertRaises(CommandError) as ctx:
            self.call('run', str(config), '--degree', '12')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('Must be in [1, 9]', str(ctx.exception))

    def test_mesh_exit_code(self):
        """Test that unreadable mesh files exit with code 4."""
        mesh = self.write('broken.mesh', '$Vertices\n2\n0 0 0\n1 1\n$EndVertices\n')
        config = self.write('run.toml', MINIMAL_RUN.replace(
            'generator = "box"\nnx = 1\nny = 1\nnz = 1', f'generator = "file"\npath = "{mesh}"'))
        with self.assertRaises(CommandError) as ctx:
            self.call('run', str(config), '--output-dir', str(self.directory / 'out'))
        self.assertEqual(ctx.exception.returncode, 4)
        self.assertIn('line 4', str(ctx.exception))

    def test_instability_exit_code(self):
        """Test that the watchdog maps to exit code 3."""
        config = self.write('run.toml', MINIMAL_RUN)
        error = InstabilityError('non-finite solution', element=0, time=0.01)
        with mock.patch('apps.solver.services.SimulationService.run', side_effect=error):
            with self.assertRaises(CommandError) as ctx:
                self.call('run', str(config))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_threads_reach_run_options(self):
        """Test that --threads is handed to the run without changing settings."""
        config = self.write('run.toml', MINIMAL_RUN)
        before = settings.WAVEDG_THREADS
        error = InstabilityError('non-finite solution', element=0, time=0.01)
        with mock.patch('apps.solver.services.SimulationService.run', side_effect=error) as run:
            with self.assertRaises(CommandError):
                self.call('run', str(config), '--threads', '3')
        self.assertEqual(run.call_args.args[1].threads, 3)
        self.assertEqual(settings.WAVEDG_THREADS, before)

    def test_bad_thread_count(self):
        """Test that a non-positive thread count is refused."""
        config = self.write('run.toml', MINIMAL_RUN)
        with self.assertRaises(CommandError) as ctx:
            self.call('run', str(config), '--threads', '0')
        self.assertEqual(ctx.exception.returncode, 2)


class ToolCommandTests(CommandTestCase):
    """Test the mesh, spectrum, converge and reference dump commands."""

    def test_mesh_command(self):
        """Test that a mesh file is generated and summarised."""
        spec = self.write('mesh.toml', '[mesh]\ngenerator = "hybrid_box"\nnx = 1\nny = 1\nnz_wedge = 1\nnz_tet = 1\n')
        output = self.directory / 'box.mesh'
        self.call('mesh', str(spec), str(output))
        self.assertTrue(output.is_file())
        self.assertIn('$Wedges', output.read_text())

    def test_spectrum_command(self):
        """Test that an unperturbed box at N=1 is reported stable."""
        output = self.directory / 'spectrum.csv'
        text = self.call('spectrum', '--nx', '1', '--ny', '1', '--nz', '1', '--degree', '1',
                         '--perturb', '0', '--output', str(output))
        self.assertIn('STABLE', text)
        self.assertNotIn('UNSTABLE', text)
        self.assertEqual(output.read_text().splitlines()[0], 're,im')

    def test_converge_needs_three_sizes(self):
        """Test that a rate fit with two sizes is refused."""
        with self.assertRaises(CommandError) as ctx:
            self.call('converge', '--family', 'structured', '--degrees', '1', '--h', '1', '0.5',
                      '--output', str(self.directory / 'c.csv'))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_converge_command(self):
        """Test that a small study prints its table and writes the CSV."""
        output = self.directory / 'convergence.csv'
        text = self.call('converge', '--family', 'structured', '--degrees', '1', '--h', '1', '0.5', '0.25',
                         '--final-time', '0.05', '--output', str(output))
        self.assertIn('Structured', text)
        self.assertEqual(len(output.read_text().splitlines()), 4)

    def test_converge_passes_threads(self):
        """Test that every convergence level receives the thread count."""
        calls = []

        def fake_level(family, degree, h, **kwargs):
            calls.append(kwargs['threads'])
            return ConvergenceLevel(h=h, error=h ** 2)

        with mock.patch('apps.analysis.tasks.run_level', side_effect=fake_level):
            self.call('converge', '--degrees', '1', '--h', '1', '0.5', '0.25', '--threads', '3',
                      '--output', str(self.directory / 'c.csv'))
        self.assertEqual(calls, [3, 3, 3])

    def test_bench_command(self):
        """Test that the bench command writes one row per degree."""
        output = self.directory / 'bench.csv'
        text = self.call('bench', '--n', '1', '--degrees', '1', '2', '--output', str(output))
        self.assertIn('ns/DOF', text)
        self.assertEqual(len(output.read_text().splitlines()), 3)

    def test_dump_references(self):
        """Test that reference arrays are dumped as CSV files."""
        target = self.directory / 'reference'
        self.call('spectrum', '--dump-ref', '2', '--dump-dir', str(target))
        self.assertTrue((target / 'N2_triangle_Dr.csv').is_file())
        self.assertTrue((target / 'N2_tet_lift.csv').is_file())


class ProjectSettingsTests(SimpleTestCase):
    """Test the project settings module."""

    def test_no_database_or_i18n_settings(self):
        """Test that database, translation and model settings are left at Django defaults."""
        for name in ('DATABASES', 'USE_I18N', 'LANGUAGE_CODE', 'DEFAULT_AUTO_FIELD'):
            self.assertFalse(settings.is_overridden(name), name)
