"""
TOML configuration loading and conversion to service options.
"""
import logging
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from apps.core.exceptions import ConfigurationError
from apps.solver.enums import FluxMode, InitialCondition, IntegratorName, QuadratureMode
from apps.solver.services import RunOptions
from apps.solver.state import FluxConfig
from .serializers import MeshConfigSerializer, RunConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)


def read_toml(path: Path | str) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"{path}: configuration file not found")
    try:
        with path.open('rb') as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        # the message carries "(at line L, column C)"
        raise ConfigurationError(f"{path}: {exc}") from exc


def validate(data: dict, serializer_class, source: str = 'configuration') -> dict:
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        lines = flatten_errors(serializer.errors)
        raise ConfigurationError(f"{source}: invalid configuration\n  " + '\n  '.join(lines))
    return serializer.validated_data


def load_run_config(path: Path | str, overrides: dict | None = None) -> dict:
    """Validated run configuration; non-None overrides replace file values before validation."""
    data = read_toml(path)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = validate(data, RunConfigSerializer, str(path))
    logger.debug("Loaded run configuration from %s", path)
    return config


def load_mesh_config(path: Path | str) -> dict:
    return validate(read_toml(path), MeshConfigSerializer, str(path))


def run_options(config: dict, threads: int | None = None) -> RunOptions:
    return RunOptions(
        degree=config['degree'],
        final_time=config['final_time'],
        flux=FluxConfig(FluxMode(config['flux']), config['tau_scale']),
        cfl=config.get('cfl'),
        integrator=IntegratorName(config['integrator']),
        quadrature=QuadratureMode(config['quadrature']),
        initial_condition=InitialCondition(config['initial_condition']),
        pulse_center=tuple(config['pulse_center']),
        pulse_width=config['pulse_width'],
        output_dir=Path(config['output_dir']),
        snapshot_interval=config['snapshot_interval'],
        energy_interval=config['energy_interval'],
        threads=threads,
    )
