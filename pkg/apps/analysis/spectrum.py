"""Eigenvalues of the global right-hand-side matrix and stability verdicts."""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError, eigvals

from apps.core.exceptions import AnalysisError
from apps.core.formatting import write_csv
from apps.solver.enums import FluxMode

logger = logging.getLogger(__name__)

UPWIND_TOL = 1e-10
CENTRAL_TOL = 1e-8


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """All eigenvalues, sorted by real part then imaginary part."""
    matrix = np.asarray(matrix, dtype=float)
    try:
        values = eigvals(matrix)
    except LinAlgError as exc:
        raise AnalysisError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise AnalysisError("eigensolver returned non-finite eigenvalues")
    order = np.lexsort((values.imag, values.real))
    return values[order]


@dataclass(frozen=True)
class SpectrumVerdict:
    max_real: float
    max_abs_real: float
    max_modulus: float
    tolerance: float

    @property
    def stable(self) -> bool:
        return self.max_real <= self.tolerance * self.max_modulus

    @property
    def purely_imaginary(self) -> bool:
        return self.max_abs_real <= self.tolerance * self.max_modulus

    def line(self) -> str:
        if self.stable:
            return f"STABLE (max Re = {self.max_real:.3e}, max |lambda| = {self.max_modulus:.3e})"
        return f"UNSTABLE (max Re = {self.max_real:.17g})"


def tolerance_for(mode: FluxMode | str) -> float:
    return CENTRAL_TOL if FluxMode(mode) is FluxMode.CENTRAL else UPWIND_TOL


def verdict(values: np.ndarray, tolerance: float = UPWIND_TOL) -> SpectrumVerdict:
    values = np.asarray(values)
    if values.size == 0:
        return SpectrumVerdict(0.0, 0.0, 0.0, tolerance)
    return SpectrumVerdict(
        max_real=float(values.real.max()),
        max_abs_real=float(np.abs(values.real).max()),
        max_modulus=float(np.abs(values).max()),
        tolerance=tolerance,
    )


def write_spectrum(path: Path | str, values: np.ndarray) -> Path:
    return write_csv(path, ['re', 'im'], ((float(v.real), float(v.imag)) for v in values))
