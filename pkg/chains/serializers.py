from decimal import Decimal

from rest_framework import serializers

from .domain import MAX_COUNT, MODE_CHOICES, CompetitionMode, Config, ModelSpec
from .exceptions import ChainError
from .services.kinetics import validate_spec


def rate_field():
    return serializers.DecimalField(
        max_digits=None, decimal_places=None, required=False, default=Decimal('0')
    )


class ModelSpecSerializer(serializers.Serializer):
    """Serializer for the flat key-value model spec (rates plus mode)"""

    alpha0 = rate_field()
    alpha1 = rate_field()
    beta = rate_field()
    delta = rate_field()
    gamma0 = rate_field()
    gamma1 = rate_field()
    mode = serializers.ChoiceField(choices=MODE_CHOICES, default=CompetitionMode.SELF_DESTRUCTIVE.value)

    def validate(self, data):
        unknown = set(getattr(self, 'initial_data', {}) or {}) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(
                {'non_field_errors': [f"Unknown spec keys: {', '.join(sorted(unknown))}"]}
            )
        try:
            validate_spec(self._build(data))
        except ChainError as exc:
            raise serializers.ValidationError({'rates': [str(exc)]})
        return data

    @staticmethod
    def _build(data) -> ModelSpec:
        rates = {name: float(data.get(name, Decimal('0'))) for name in ModelSpec.RATE_FIELDS}
        return ModelSpec(mode=CompetitionMode(data.get('mode', 'sd')), **rates)

    def to_spec(self) -> ModelSpec:
        return self._build(self.validated_data)


class ConfigSerializer(serializers.Serializer):
    x0 = serializers.IntegerField(min_value=0, max_value=MAX_COUNT)
    x1 = serializers.IntegerField(min_value=0, max_value=MAX_COUNT)

    def to_config(self) -> Config:
        return Config(self.validated_data['x0'], self.validated_data['x1'])


class InitialStateSerializer(ConfigSerializer):
    """A starting configuration; species 0 must be the initial majority."""

    def validate(self, data):
        if data['x0'] < data['x1']:
            raise serializers.ValidationError(
                'x0 must be the initial majority (x0 >= x1); swap the species labels.'
            )
        return data
