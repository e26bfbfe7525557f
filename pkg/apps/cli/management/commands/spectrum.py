"""
Spectrum of the global right-hand-side matrix with a stability verdict.

Usage:
    python manage.py spectrum [--mesh-config mesh.toml | --nx 2 --ny 2 --nz 2]
        [--perturb 0.3] --degree 2 --flux upwind --quadrature exact
"""
from apps.analysis.services import SpectrumService
from apps.mesh.services import MeshService
from apps.solver.enums import FluxMode, QuadratureMode
from apps.solver.state import FluxConfig
from ...config import load_mesh_config
from ._base import WaveDGCommand


class Command(WaveDGCommand):
    help = 'Eigenvalues of the semi-discrete operator and a STABLE/UNSTABLE verdict'

    def add_command_arguments(self, parser):
        parser.add_argument('--mesh-config', default=None, help='TOML file with [mesh] and [[media]]')
        parser.add_argument('--nx', type=int, default=2)
        parser.add_argument('--ny', type=int, default=2)
        parser.add_argument('--nz', type=int, default=2)
        parser.add_argument('--perturb', type=float, default=0.3, help='Vertical perturbation amplitude')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--degree', type=int, default=2)
        parser.add_argument('--flux', default=FluxMode.UPWIND.value, choices=[f.value for f in FluxMode])
        parser.add_argument('--tau-scale', type=float, default=1.0)
        parser.add_argument('--quadrature', default=QuadratureMode.EXACT.value,
                            choices=[q.value for q in QuadratureMode])
        parser.add_argument('--output', default='spectrum.csv')

    def run_command(self, **options):
        if options['mesh_config']:
            config = load_mesh_config(options['mesh_config'])
            mesh = MeshService.build(config['mesh'], config['media'], seed=options['seed'])
        else:
            mesh = MeshService.build({
                'generator': 'box', 'nx': options['nx'], 'ny': options['ny'], 'nz': options['nz'],
                'perturb_amplitude': options['perturb'], 'perturb_seed': options['seed'],
            })
        result = SpectrumService.run(
            mesh,
            options['degree'],
            FluxConfig(FluxMode(options['flux']), options['tau_scale']),
            QuadratureMode(options['quadrature']),
            output=options['output'],
            threads=options['threads'],
        )
        self.stdout.write(f"{result.operator.size} eigenvalues written to {options['output']}")
        self.stdout.write(result.verdict.line())
