"""
Exception hierarchy shared by every app.

Each class carries the exit code the management commands report for it.
"""


class WaveDGError(Exception):
    """Base class for all solver errors."""
    exit_code = 1


class ConfigurationError(WaveDGError):
    """Invalid degree, configuration file or command-line flag."""
    exit_code = 2


class InstabilityError(WaveDGError):
    """Non-finite right-hand side or runaway energy growth."""
    exit_code = 3

    def __init__(self, message: str, element: int | None = None, time: float | None = None):
        super().__init__(message)
        self.element = element
        self.time = time


class MeshError(WaveDGError):
    """Invalid mesh data."""
    exit_code = 4


class MeshFormatError(MeshError):
    """Malformed mesh or surface file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationError(MeshError):
    """A mesh generator received inconsistent input."""


class ConnectivityError(MeshError):
    """Faces that should coincide do not."""


class GeometryError(MeshError):
    """Element with non-positive Jacobian or degenerate shape."""

    def __init__(self, message: str, element: int | None = None):
        if element is not None:
            message = f"element {element}: {message}"
        super().__init__(message)
        self.element = element


class OperatorError(WaveDGError):
    """Element operator construction failed."""


class AnalysisError(WaveDGError):
    """Dense assembly, eigensolve or convergence study failed."""
