"""
Solution state, degree-of-freedom layout and flux configuration.

Global flat ordering (dense assembly, diagnostics): element-major, wedges
first, and within an element variable-major (p, u_x, u_y, u_z), each variable
in the element's node order.
"""
from dataclasses import dataclass, field

import numpy as np

from apps.core.exceptions import ConfigurationError
from .enums import FluxMode


@dataclass(frozen=True)
class DofLayout:
    num_wedges: int
    num_tets: int
    np_wedge: int
    np_tet: int

    @property
    def wedge_nodes(self) -> int:
        return self.num_wedges * self.np_wedge

    @property
    def num_nodes(self) -> int:
        return self.wedge_nodes + self.num_tets * self.np_tet

    @property
    def num_dofs(self) -> int:
        return 4 * self.num_nodes

    def zeros(self, time: float = 0.0) -> 'SolutionState':
        return SolutionState(
            wedge=np.zeros((4, self.num_wedges, self.np_wedge)),
            tet=np.zeros((4, self.num_tets, self.np_tet)),
            time=time,
        )

    def from_flat(self, vector: np.ndarray, time: float = 0.0) -> 'SolutionState':
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.num_dofs,):
            raise ValueError(f"expected {self.num_dofs} values, got {vector.shape}")
        split = 4 * self.wedge_nodes
        wedge = vector[:split].reshape(self.num_wedges, 4, self.np_wedge).transpose(1, 0, 2)
        tet = vector[split:].reshape(self.num_tets, 4, self.np_tet).transpose(1, 0, 2)
        return SolutionState(wedge=wedge.copy(), tet=tet.copy(), time=time)


@dataclass(eq=False)
class SolutionState:
    """Nodal p, u_x, u_y, u_z per element: wedge (4, Kw, Np_w), tet (4, Kt, Np_t)."""
    wedge: np.ndarray
    tet: np.ndarray
    time: float = 0.0
    # previous right-hand sides for multistep integrators, newest last
    history: list = field(default_factory=list)

    @property
    def p(self) -> tuple[np.ndarray, np.ndarray]:
        return self.wedge[0], self.tet[0]

    def velocity(self, component: int) -> tuple[np.ndarray, np.ndarray]:
        return self.wedge[1 + component], self.tet[1 + component]

    def copy(self) -> 'SolutionState':
        return SolutionState(self.wedge.copy(), self.tet.copy(), self.time, list(self.history))

    def global_values(self) -> np.ndarray:
        """(4, total nodes): wedge nodes first, element-major."""
        return np.concatenate([
            self.wedge.reshape(4, -1),
            self.tet.reshape(4, -1),
        ], axis=1)

    def to_flat(self) -> np.ndarray:
        return np.concatenate([
            self.wedge.transpose(1, 0, 2).ravel(),
            self.tet.transpose(1, 0, 2).ravel(),
        ])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.wedge)) and np.all(np.isfinite(self.tet)))

    def first_nonfinite_element(self) -> int | None:
        """Element id of the first non-finite value, wedges numbered first."""
        bad_w = np.flatnonzero(~np.isfinite(self.wedge).all(axis=(0, 2)))
        if bad_w.size:
            return int(bad_w[0])
        bad_t = np.flatnonzero(~np.isfinite(self.tet).all(axis=(0, 2)))
        if bad_t.size:
            return self.wedge.shape[1] + int(bad_t[0])
        return None

    def max_abs(self) -> float:
        parts = [np.abs(a).max() for a in (self.wedge, self.tet) if a.size]
        return float(max(parts)) if parts else 0.0

    def __add__(self, other: 'SolutionState') -> 'SolutionState':
        return SolutionState(self.wedge + other.wedge, self.tet + other.tet, self.time)

    def __sub__(self, other: 'SolutionState') -> 'SolutionState':
        return SolutionState(self.wedge - other.wedge, self.tet - other.tet, self.time)

    def __mul__(self, scalar: float) -> 'SolutionState':
        return SolutionState(self.wedge * scalar, self.tet * scalar, self.time)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FluxConfig:
    """
    Penalties tau_p = s / {rho c}, tau_u = s {rho c} with s = 1 (upwind),
    0 (central) or tau_scale (custom).
    """
    mode: FluxMode = FluxMode.UPWIND
    tau_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'mode', FluxMode(self.mode))
        if not self.tau_scale >= 0:
            raise ConfigurationError(f"tau_scale must be non-negative, got {self.tau_scale}")

    @property
    def scale(self) -> float:
        if self.mode is FluxMode.UPWIND:
            return 1.0
        if self.mode is FluxMode.CENTRAL:
            return 0.0
        return float(self.tau_scale)

    def penalties(self, impedance_avg):
        """(tau_p, tau_u) for the face-averaged impedance {rho c}."""
        s = self.scale
        return s / impedance_avg, s * impedance_avg
