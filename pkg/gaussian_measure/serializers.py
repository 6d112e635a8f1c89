from rest_framework import serializers

from core.exceptions import OrliczError
from .expressions import field_from_json, parse_field
from .integrators import BACKENDS, GaussianIntegrator


class ExpressionField(serializers.Field):
    """A random field given as a preset name, a number or expression JSON."""

    default_error_messages = {
        "invalid": "Invalid field expression: {message}",
    }

    def __init__(self, *args, **kwargs):
        self.dim = kwargs.pop("dim", None)
        super().__init__(*args, **kwargs)

    def _dimension(self):
        if self.dim is not None:
            return self.dim
        parent_data = getattr(self.parent, "initial_data", None) or {}
        return int(parent_data.get("n", parent_data.get("dim", 1)))

    def to_internal_value(self, data):
        try:
            if isinstance(data, str):
                return parse_field(data, self._dimension())
            return field_from_json(data, self._dimension())
        except OrliczError as exc:
            self.fail("invalid", message=str(exc))

    def to_representation(self, value):
        return value.to_json()


class IntegratorSerializer(serializers.Serializer):
    """Integrator settings; omitted values fall back to the ORLICZ_IG defaults."""

    n = serializers.IntegerField(min_value=1, default=1)
    backend = serializers.ChoiceField(choices=BACKENDS, required=False, allow_null=True, default=None)
    order = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)
    samples = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(required=False, allow_null=True, default=None)

    def create(self, validated_data):
        dim = validated_data["n"]
        backend = validated_data.get("backend")
        if backend is None:
            integrator = GaussianIntegrator.default(dim)
            backend = integrator.backend
        return GaussianIntegrator(
            dim=dim,
            backend=backend,
            order=validated_data.get("order"),
            samples=validated_data.get("samples"),
            seed=validated_data.get("seed"),
        )

