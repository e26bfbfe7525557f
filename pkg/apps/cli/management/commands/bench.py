"""
Right-hand-side phase timings per element and per degree of freedom.

Usage:
    python manage.py bench [--n 4] --degrees 1 2 3 4 5 --steps 100
"""
from apps.analysis.bench import MIN_STEPS, bench_mesh
from apps.analysis.services import BenchService
from apps.mesh.services import MeshService
from apps.operators.storage import STORAGE_HEADER
from ...config import load_mesh_config
from ._base import WaveDGCommand


class Command(WaveDGCommand):
    help = 'Time the four RHS phases on a hybrid box and report storage'

    def add_command_arguments(self, parser):
        parser.add_argument('--mesh-config', default=None)
        parser.add_argument('--n', type=int, default=4, help='Columns per side and layers per kind')
        parser.add_argument('--degrees', nargs='+', type=int, default=[1, 2, 3, 4, 5])
        parser.add_argument('--steps', type=int, default=MIN_STEPS)
        parser.add_argument('--output', default='bench.csv')

    def run_command(self, **options):
        if options['mesh_config']:
            config = load_mesh_config(options['mesh_config'])
            mesh = MeshService.build(config['mesh'], config['media'])
        else:
            mesh = bench_mesh(options['n'])
        results = BenchService.run(mesh, options['degrees'], options['steps'], options['output'], options['threads'])
        self.stdout.write(BenchService.describe(results))
        self.stdout.write(' '.join(STORAGE_HEADER))
        for r in results:
            self.stdout.write(' '.join(str(v) for v in r.storage.as_row()))
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['output']}"))
