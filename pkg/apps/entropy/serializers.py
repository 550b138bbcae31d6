from rest_framework import serializers

from .types import LOGLOG, PLAIN, EntropyProfile


class ProfileScenarioSerializer(serializers.Serializer):
    """Cenário {"id", "chi", "psi", "delta", "C"} da biblioteca de perfis."""

    id = serializers.CharField(required=False, default="")
    chi = serializers.FloatField(min_value=2)
    psi = serializers.FloatField()
    delta = serializers.FloatField()
    C = serializers.FloatField(required=False, default=1.0)

    def validate_delta(self, value):
        if value <= 0:
            raise serializers.ValidationError("delta deve ser positivo.")
        return value

    def validate_C(self, value):
        if value <= 0:
            raise serializers.ValidationError("C deve ser positivo.")
        return value

    def validate(self, attrs):
        attrs["profile"] = EntropyProfile(chi=attrs["chi"], psi=attrs["psi"])
        return attrs


class EntropyProfileSerializer(serializers.Serializer):
    chi = serializers.FloatField()
    psi = serializers.FloatField()
    form = serializers.ChoiceField(choices=[PLAIN, LOGLOG])


class RatioFunctionSerializer(serializers.Serializer):
    kind = serializers.CharField()
    constant = serializers.FloatField()
    constant_label = serializers.CharField()


class QuadratureStepSerializer(serializers.Serializer):
    eta = serializers.FloatField()
    value = serializers.FloatField()


class IntegrabilityVerdictSerializer(serializers.Serializer):
    converges = serializers.BooleanField(allow_null=True)
    value = serializers.FloatField(allow_null=True)
    reason = serializers.CharField()
    singularity = serializers.FloatField(allow_null=True)
    analytic = serializers.FloatField(allow_null=True)
    quadrature_trace = QuadratureStepSerializer(source="trace", many=True)


class LExistenceReportSerializer(serializers.Serializer):
    profile = EntropyProfileSerializer()
    hull_profile = EntropyProfileSerializer()
    ratio = RatioFunctionSerializer()
    delta = serializers.FloatField()
    verdict = IntegrabilityVerdictSerializer()
    L_exists = serializers.BooleanField(allow_null=True)


def load_scenario(document: dict):
    serializer = ProfileScenarioSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    data = serializer.validated_data
    return data["profile"], data["delta"], data["C"]
