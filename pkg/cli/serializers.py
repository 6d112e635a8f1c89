from rest_framework import serializers

from gaussian_measure.integrators import BACKENDS


class RunConfigSerializer(serializers.Serializer):
    """Validates a run configuration file; every key is optional."""

    n = serializers.IntegerField(min_value=1, required=False)
    backend = serializers.ChoiceField(choices=BACKENDS, required=False, allow_null=True)
    order = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    samples = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    seed = serializers.IntegerField(required=False, allow_null=True)
    tolerance = serializers.FloatField(min_value=0.0, required=False, allow_null=True)
    format = serializers.ChoiceField(choices=("json", "csv"), required=False)
    functions = serializers.DictField(child=serializers.JSONField(), required=False)

    def validate_functions(self, value):
        for name, spec in value.items():
            if not isinstance(spec, (str, dict, int, float, list)):
                raise serializers.ValidationError(f'Function "{name}" must be a preset name, number, expression object or a list of them')
        return value
