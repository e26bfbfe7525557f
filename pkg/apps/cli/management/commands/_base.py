"""
Shared behavior of the wavedg management commands.

Every command accepts --threads and --dump-ref and turns WaveDGError into a
CommandError carrying the error's exit code.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.core.exceptions import WaveDGError
from apps.reference.dump import dump_references
from apps.reference.elements import check_degree

logger = logging.getLogger(__name__)


class WaveDGCommand(BaseCommand):
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker threads (default: WAVEDG_THREADS)')
        parser.add_argument('--dump-ref', type=int, metavar='N', default=None,
                            help='Write reference element arrays for degree N and exit')
        parser.add_argument('--dump-dir', default='reference',
                            help='Directory for --dump-ref output')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            threads = options.get('threads')
            if threads is not None and threads < 1:
                raise CommandError("--threads must be at least 1", returncode=2)
            if options.get('dump_ref') is not None:
                paths = dump_references(check_degree(options['dump_ref']), Path(options['dump_dir']))
                self.stdout.write(f"Wrote {len(paths)} reference arrays to {options['dump_dir']}")
                return
            self.run_command(**options)
        except WaveDGError as exc:
            logger.debug("Command failed", exc_info=True)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def run_command(self, **options):
        raise NotImplementedError
