"""
Service layer for analysis workflows.
Convergence, spectrum and bench runs are orchestrated here and write their
CSV artifacts.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from apps.core.formatting import format_float, write_csv
from apps.mesh.generators import MeshFamily
from apps.mesh.hybrid import HybridMesh
from apps.solver.discretization import build_discretization
from apps.solver.enums import QuadratureMode
from apps.solver.state import FluxConfig
from .assembly import GlobalOperator, assemble_global
from .bench import BENCH_HEADER, BenchResult, bench
from .convergence import CONVERGENCE_HEADER, ConvergenceLevel, ConvergenceRecord, check_levels
from .spectrum import SpectrumVerdict, spectrum, tolerance_for, verdict, write_spectrum
from .tasks import run_convergence_level

logger = logging.getLogger(__name__)


@dataclass
class SpectrumResult:
    operator: GlobalOperator
    eigenvalues: np.ndarray
    verdict: SpectrumVerdict


class ConvergenceService:
    """Service for convergence studies."""

    @staticmethod
    def study(
        family: MeshFamily | str,
        degree: int,
        hs,
        flux: FluxConfig | None = None,
        seed: int = 0,
        cfl: float | None = None,
        final_time: float = 1.0,
        threads: int | None = None,
    ) -> ConvergenceRecord:
        """Dispatch every level as a task and gather the results in h order."""
        family = MeshFamily(family)
        flux = flux or FluxConfig()
        hs = check_levels(hs)
        pending = [
            run_convergence_level.delay({
                'family': family.value,
                'degree': degree,
                'h': h,
                'flux': flux.mode.value,
                'tau_scale': flux.tau_scale,
                'seed': seed,
                'cfl': cfl,
                'final_time': final_time,
                'threads': threads,
            })
            for h in hs
        ]
        levels = [ConvergenceLevel(**result.get()) for result in pending]
        record = ConvergenceRecord(family, degree, levels)
        for level in levels:
            if not level.stable:
                logger.warning("%s N=%d: level h=%g flagged unstable", family.value, degree, level.h)
        logger.info("%s N=%d: fitted rate %.3f", family.value, degree, record.rate)
        return record

    @staticmethod
    def write(records: list[ConvergenceRecord], path: Path | str) -> Path:
        rows = [row for record in records for row in record.rows()]
        return write_csv(path, CONVERGENCE_HEADER, rows)

    @staticmethod
    def table(records: list[ConvergenceRecord]) -> str:
        """Fitted rates with one row per family and one column per degree."""
        degrees = sorted({r.degree for r in records})
        families = list(dict.fromkeys(r.family for r in records))
        rates = {(r.family, r.degree): r.rate for r in records}
        width = 14
        lines = [''.ljust(width) + ''.join(f'N = {n}'.rjust(10) for n in degrees)]
        for family in families:
            cells = []
            for n in degrees:
                rate = rates.get((family, n))
                cells.append(('-' if rate is None or np.isnan(rate) else f'{rate:.2f}').rjust(10))
            lines.append(family.value.capitalize().ljust(width) + ''.join(cells))
        return '\n'.join(lines)


class SpectrumService:
    """Service for eigenvalue studies of the global operator."""

    @staticmethod
    def run(
        mesh: HybridMesh,
        degree: int,
        flux: FluxConfig | None = None,
        quadrature: QuadratureMode = QuadratureMode.EXACT,
        output: Path | str | None = None,
        threads: int | None = None,
    ) -> SpectrumResult:
        flux = flux or FluxConfig()
        disc = build_discretization(mesh, degree, quadrature, threads)
        operator = assemble_global(disc, flux, threads)
        values = spectrum(operator.matrix)
        result = SpectrumResult(operator, values, verdict(values, tolerance_for(flux.mode)))
        if output is not None:
            write_spectrum(output, values)
        logger.info("Spectrum (%s, %s): %s", flux.mode.value, QuadratureMode(quadrature).value,
                    result.verdict.line())
        return result


class BenchService:
    """Service for RHS phase timings across degrees."""

    @staticmethod
    def run(mesh: HybridMesh, degrees, steps: int, output: Path | str | None = None,
            threads: int | None = None) -> list[BenchResult]:
        results = [bench(mesh, n, steps, threads) for n in degrees]
        if output is not None:
            write_csv(output, BENCH_HEADER, (r.as_row() for r in results))
        return results

    @staticmethod
    def describe(results: list[BenchResult]) -> str:
        lines = ['N  wedge/tet volume ns/DOF  wedge/tet surface ns/DOF']
        for r in results:
            lines.append(f"{r.degree}  {format_float(r.ratio('volume'))}  {format_float(r.ratio('surface'))}")
        return '\n'.join(lines)
