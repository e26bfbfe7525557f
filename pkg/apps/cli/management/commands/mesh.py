"""
Generate a mesh file from a generator spec.

Usage:
    python manage.py mesh spec.toml out.mesh
"""
from apps.mesh.services import MeshService
from ...config import load_mesh_config
from ._base import WaveDGCommand


class Command(WaveDGCommand):
    help = 'Build a mesh from a [mesh] spec, validate it and write it to a file'

    def add_command_arguments(self, parser):
        parser.add_argument('spec', help='TOML file with [mesh] and optional [[media]]')
        parser.add_argument('output', help='Mesh file to write')
        parser.add_argument('--seed', type=int, default=0)

    def run_command(self, **options):
        config = load_mesh_config(options['spec'])
        report = MeshService.generate(config['mesh'], options['output'], config['media'], seed=options['seed'])
        self.stdout.write(report.line())
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['output']}"))
