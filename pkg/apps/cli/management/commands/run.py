"""
Time-domain run from a TOML configuration file.

Usage:
    python manage.py run config.toml [--output-dir DIR] [--final-time T]
"""
from apps.mesh.services import MeshService
from apps.solver.services import SimulationService
from ...config import load_run_config, run_options
from ._base import WaveDGCommand


class Command(WaveDGCommand):
    help = 'Run a simulation and write the energy log, snapshots and summary'

    def add_command_arguments(self, parser):
        parser.add_argument('config', help='Run configuration (TOML)')
        parser.add_argument('--output-dir', default=None)
        parser.add_argument('--final-time', type=float, default=None)
        parser.add_argument('--degree', type=int, default=None)

    def run_command(self, **options):
        config = load_run_config(options['config'], {
            'output_dir': options['output_dir'],
            'final_time': options['final_time'],
            'degree': options['degree'],
        })
        mesh = MeshService.build(config['mesh'], config['media'], seed=config['seed'])
        run = run_options(config, threads=options['threads'])
        result = SimulationService.run(mesh, run)

        self.stdout.write(
            f"N={run.degree} elements={mesh.num_elements} dofs={result.disc.layout.num_dofs} "
            f"dt={result.dt:.6g} steps={result.steps}")
        self.stdout.write(
            f"energy {result.initial_energy:.17g} -> {result.final_energy:.17g} "
            f"wall time {result.wall_time:.2f}s")
        self.stdout.write(self.style.SUCCESS(f"Wrote results to {run.output_dir}"))
