"""
Celery tasks for convergence studies.
"""
import logging

from celery import shared_task

from .convergence import flux_from_payload, level_payload, run_level

logger = logging.getLogger(__name__)


@shared_task
def run_convergence_level(cell):
    """
    Run one (family, N, h) cell of a convergence study.

    Args:
        cell: dict with family, degree, h, flux, tau_scale, seed and
            optional cfl, final_time and threads

    Returns:
        dict with h, error, steps, dt, stable
    """
    flux = flux_from_payload(cell.get('flux', 'upwind'), cell.get('tau_scale', 1.0))
    level = run_level(
        cell['family'],
        int(cell['degree']),
        float(cell['h']),
        flux=flux,
        seed=int(cell.get('seed', 0)),
        cfl=cell.get('cfl'),
        final_time=float(cell.get('final_time', 1.0)),
        threads=cell.get('threads'),
    )
    return level_payload(level)
