"""
Serializers for run and mesh configuration files.
Unknown keys are rejected at every nesting level.
"""
from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from apps.mesh.generators import MAX_AMPLITUDE, MeshFamily
from apps.solver.enums import FluxMode, InitialCondition, IntegratorName, QuadratureMode

GENERATOR_KEYS = {
    'file': ['path'],
    'box': ['nx', 'ny', 'nz'],
    'hybrid_box': ['nx', 'ny', 'nz_wedge', 'nz_tet'],
    'surface': ['path', 'layers'],
    'wavy_layers': ['nx', 'ny', 'layers', 'interfaces'],
    'family': ['family', 'h'],
}


def _choices(enum) -> list[str]:
    return [member.value for member in enum]


class StrictSerializer(serializers.Serializer):
    """Serializer that refuses keys it does not declare."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ['Unknown field.'] for key in unknown})
        return super().to_internal_value(data)


class InterfaceSerializer(StrictSerializer):
    base = serializers.FloatField()
    amplitude = serializers.FloatField(default=0.0)
    wavenumber = serializers.FloatField(default=1.0)


class MediaSerializer(StrictSerializer):
    region = serializers.IntegerField(min_value=0)
    rho = serializers.FloatField()
    kappa = serializers.FloatField()

    def validate(self, attrs):
        for name in ('rho', 'kappa'):
            if not attrs[name] > 0:
                raise serializers.ValidationError({name: ['Must be positive.']})
        return attrs


class MeshSpecSerializer(StrictSerializer):
    """Generator spec; which keys are required depends on the generator."""
    generator = serializers.ChoiceField(choices=list(GENERATOR_KEYS))
    path = serializers.CharField(required=False)
    nx = serializers.IntegerField(min_value=1, required=False)
    ny = serializers.IntegerField(min_value=1, required=False)
    nz = serializers.IntegerField(min_value=1, required=False)
    nz_wedge = serializers.IntegerField(min_value=0, required=False)
    nz_tet = serializers.IntegerField(min_value=0, required=False)
    # an int for 'surface', a list of ints for 'wavy_layers'
    layers = serializers.JSONField(required=False)
    interfaces = InterfaceSerializer(many=True, required=False)
    family = serializers.ChoiceField(choices=_choices(MeshFamily), required=False)
    h = serializers.FloatField(required=False)
    seed = serializers.IntegerField(required=False, default=0)
    perturb_amplitude = serializers.FloatField(min_value=0.0, required=False)
    perturb_seed = serializers.IntegerField(required=False)

    def validate(self, attrs):
        generator = attrs['generator']
        missing = [key for key in GENERATOR_KEYS[generator] if key not in attrs]
        if missing:
            raise serializers.ValidationError({key: [f'Required by the {generator} generator.'] for key in missing})

        if 'path' in attrs and not Path(attrs['path']).is_file():
            raise serializers.ValidationError({'path': [f"File not found: {attrs['path']}"]})
        if generator == 'surface' and not (isinstance(attrs['layers'], int) and attrs['layers'] >= 1):
            raise serializers.ValidationError({'layers': ['Must be a positive integer.']})
        if generator == 'wavy_layers':
            layers = attrs['layers']
            if not (isinstance(layers, list) and layers and all(isinstance(n, int) and n >= 1 for n in layers)):
                raise serializers.ValidationError({'layers': ['Must be a list of positive integers.']})
            if len(attrs['interfaces']) != len(layers) + 1:
                raise serializers.ValidationError({'interfaces': ['Need one more interface than layers.']})
        if generator == 'family' and not attrs['h'] > 0:
            raise serializers.ValidationError({'h': ['Must be positive.']})
        if attrs.get('perturb_amplitude', 0.0) >= MAX_AMPLITUDE:
            raise serializers.ValidationError({'perturb_amplitude': [f'Must be below {MAX_AMPLITUDE}.']})
        return attrs


class MeshConfigSerializer(StrictSerializer):
    mesh = MeshSpecSerializer()
    media = MediaSerializer(many=True, required=False, default=list)


class RunConfigSerializer(MeshConfigSerializer):
    degree = serializers.IntegerField()
    final_time = serializers.FloatField()
    flux = serializers.ChoiceField(choices=_choices(FluxMode), default=FluxMode.UPWIND.value)
    tau_scale = serializers.FloatField(min_value=0.0, default=1.0)
    cfl = serializers.FloatField(required=False)
    integrator = serializers.ChoiceField(choices=_choices(IntegratorName), default=IntegratorName.LSRK45.value)
    quadrature = serializers.ChoiceField(choices=_choices(QuadratureMode), default=QuadratureMode.EXACT.value)
    initial_condition = serializers.ChoiceField(
        choices=_choices(InitialCondition), default=InitialCondition.STANDING_WAVE.value)
    pulse_width = serializers.FloatField(default=0.1)
    pulse_center = serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3,
                                         default=[0.0, 0.0, 0.0])
    output_dir = serializers.CharField(default='output')
    snapshot_interval = serializers.IntegerField(min_value=0, default=0)
    energy_interval = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(default=0)

    def validate_degree(self, value):
        max_degree = getattr(settings, 'WAVEDG_MAX_DEGREE', 9)
        if not 1 <= value <= max_degree:
            raise serializers.ValidationError(f'Must be in [1, {max_degree}], got {value}.')
        return value

    def validate_final_time(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate_cfl(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate_pulse_width(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be positive.')
        return value


def flatten_errors(detail, prefix: str = '') -> list[str]:
    """'field.path: message' lines from nested DRF error details."""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            path = f'{prefix}.{key}' if prefix else str(key)
            lines.extend(flatten_errors(value, path))
        return lines
    if isinstance(detail, list):
        if all(not isinstance(item, (dict, list)) for item in detail):
            return [f'{prefix}: {item}' if prefix else str(item) for item in detail]
        lines = []
        for index, item in enumerate(detail):
            lines.extend(flatten_errors(item, f'{prefix}[{index}]'))
        return lines
    return [f'{prefix}: {detail}' if prefix else str(detail)]
