"""
Convergence table for the standing-wave problem.

Usage:
    python manage.py converge --family structured --degrees 1 2 3 \
        --h 2 1 0.5 0.25 0.125 [--output convergence.csv]
"""
from apps.analysis.services import ConvergenceService
from apps.core.exceptions import ConfigurationError
from apps.mesh.generators import MeshFamily
from apps.solver.enums import FluxMode
from apps.solver.state import FluxConfig
from ._base import WaveDGCommand


class Command(WaveDGCommand):
    help = 'Measure L2 convergence rates on a mesh family'

    def add_command_arguments(self, parser):
        parser.add_argument('--family', nargs='+', default=[MeshFamily.STRUCTURED.value],
                            choices=[f.value for f in MeshFamily])
        parser.add_argument('--degrees', nargs='+', type=int, default=[1, 2, 3])
        parser.add_argument('--h', nargs='+', type=float, default=[2.0, 1.0, 0.5, 0.25, 0.125])
        parser.add_argument('--flux', default=FluxMode.UPWIND.value, choices=[f.value for f in FluxMode])
        parser.add_argument('--tau-scale', type=float, default=1.0)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--cfl', type=float, default=None)
        parser.add_argument('--final-time', type=float, default=1.0)
        parser.add_argument('--output', default='convergence.csv')

    def run_command(self, **options):
        if len(options['h']) < 3:
            raise ConfigurationError(f"need at least 3 mesh levels, got {len(options['h'])}")
        flux = FluxConfig(FluxMode(options['flux']), options['tau_scale'])
        records = []
        for family in options['family']:
            for degree in options['degrees']:
                record = ConvergenceService.study(
                    family, degree, options['h'], flux=flux, seed=options['seed'],
                    cfl=options['cfl'], final_time=options['final_time'], threads=options['threads'],
                )
                for level in record.levels:
                    if not level.stable:
                        self.stderr.write(f"{family} N={degree} h={level.h}: unstable, flagged")
                records.append(record)

        path = ConvergenceService.write(records, options['output'])
        self.stdout.write(ConvergenceService.table(records))
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
