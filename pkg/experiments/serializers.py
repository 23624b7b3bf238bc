from django.conf import settings
from rest_framework import serializers

from chains.serializers import InitialStateSerializer, ModelSpecSerializer
from chains.services.simulation import default_max_steps

from .models import ExperimentRun, RunKinds


def max_trials():
    return settings.LV_CONSENSUS['API_MAX_TRIALS']


def max_xmax():
    return settings.LV_CONSENSUS['API_MAX_XMAX']


def max_population():
    return settings.LV_CONSENSUS['API_MAX_POPULATION']


def max_steps():
    return settings.LV_CONSENSUS['API_MAX_STEPS']


def check_population(attrs):
    init = attrs['init']
    if init['x0'] + init['x1'] > max_population():
        raise serializers.ValidationError({'init': [f"x0 + x1 is capped at {max_population()}."]})


class SpecRequestSerializer(serializers.Serializer):
    """Base request: a model spec and an optional save flag"""

    spec = ModelSpecSerializer()
    save = serializers.BooleanField(default=False)

    def validate(self, attrs):
        # nested serializers never see their raw input, so unknown keys are caught here
        raw = self.initial_data.get('spec')
        unknown = set(raw) - set(ModelSpecSerializer().fields) if isinstance(raw, dict) else set()
        if unknown:
            raise serializers.ValidationError({'spec': [f"Unknown spec keys: {', '.join(sorted(unknown))}"]})
        return attrs

    def spec_object(self):
        return ModelSpecSerializer._build(self.validated_data['spec'])


class EstimateRequestSerializer(SpecRequestSerializer):
    init = InitialStateSerializer()
    trials = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, default=0)

    def validate_trials(self, value):
        if value > max_trials():
            raise serializers.ValidationError(f"At most {max_trials()} trials per request.")
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        check_population(attrs)
        return attrs


class ExactRequestSerializer(SpecRequestSerializer):
    xmax = serializers.IntegerField(min_value=1)
    with_mean_t = serializers.BooleanField(default=False)
    both_extinct_value = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)

    def validate_xmax(self, value):
        if value > max_xmax():
            raise serializers.ValidationError(f"xmax is capped at {max_xmax()}.")
        return value


class OdeRequestSerializer(SpecRequestSerializer):
    x0 = serializers.FloatField(min_value=0.0)
    x1 = serializers.FloatField(min_value=0.0)
    dt = serializers.FloatField()
    horizon = serializers.FloatField()

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if attrs['dt'] <= 0 or attrs['horizon'] <= 0:
            raise serializers.ValidationError("dt and horizon must be positive.")
        if attrs['horizon'] / attrs['dt'] > 10 ** 5:
            raise serializers.ValidationError("horizon / dt may not exceed 100000 report points.")
        return attrs


class SimulateRequestSerializer(SpecRequestSerializer):
    init = InitialStateSerializer()
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, default=0)
    gillespie = serializers.BooleanField(default=False)
    max_steps = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    def validate_max_steps(self, value):
        if value is not None and value > max_steps():
            raise serializers.ValidationError(f"max_steps is capped at {max_steps()}.")
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        check_population(attrs)
        if attrs.get('max_steps') is None:
            init = attrs['init']
            attrs['max_steps'] = min(default_max_steps(init['x0'] + init['x1']), max_steps())
        return attrs


class ExperimentRunSerializer(serializers.ModelSerializer):
    kind_display = serializers.SerializerMethodField()

    class Meta:
        model = ExperimentRun
        fields = ['run_id', 'kind', 'kind_display', 'spec', 'parameters', 'seed', 'result', 'created_at']
        read_only_fields = fields

    def get_kind_display(self, obj):
        return dict(RunKinds.CHOICES).get(obj.kind, obj.kind)
