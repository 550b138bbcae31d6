from rest_framework import serializers

from apps.entropy.serializers import load_scenario
from apps.geometry.serializers import load_cloud, load_polytope

from .checks import CHECKS, valid_checks
from .library import load_body, load_named_cloud, load_profiles
from .models import CertificationRecordEntry, SuiteRun
from .types import BODY, CLOUD, PROFILE, Scenario


def _profile_document(reference):
    if isinstance(reference, dict):
        return reference
    for item in load_profiles():
        if item["id"] == reference:
            return item
    raise serializers.ValidationError(f"Perfil desconhecido na biblioteca: {reference}.")


def _resolve(kind: str, reference):
    """Objeto do cenário a partir de um nome da biblioteca ou de um documento inline."""
    if kind == PROFILE:
        return load_scenario(_profile_document(reference))
    if isinstance(reference, str):
        loader = load_body if kind == BODY else load_named_cloud
        try:
            return loader(reference)
        except FileNotFoundError:
            raise serializers.ValidationError(f"Objeto desconhecido na biblioteca: {reference}.")
    if not isinstance(reference, dict):
        raise serializers.ValidationError("Use um nome da biblioteca ou um documento JSON.")
    return load_polytope(reference) if kind == BODY else load_cloud(reference)


class ScenarioSerializer(serializers.Serializer):
    """
    Cenário da suíte:
    {"id", "kind": body|cloud|profile, "object": nome ou documento,
     "checks": [...], "params": {...}}
    """

    id = serializers.CharField(max_length=100)
    kind = serializers.ChoiceField(choices=[BODY, CLOUD, PROFILE])
    object = serializers.JSONField()
    checks = serializers.ListField(
        child=serializers.ChoiceField(choices=sorted(CHECKS)), allow_empty=False
    )
    params = serializers.DictField(required=False, default=dict)

    def validate(self, attrs):
        invalid = sorted(set(attrs["checks"]) - valid_checks(attrs["kind"]))
        if invalid:
            raise serializers.ValidationError(
                {"checks": [f"Verificações inválidas para {attrs['kind']}: {', '.join(invalid)}."]}
            )
        try:
            payload = _resolve(attrs["kind"], attrs["object"])
        except serializers.ValidationError as exc:
            raise serializers.ValidationError({"object": exc.detail})
        attrs["scenario"] = Scenario(
            id=attrs["id"],
            kind=attrs["kind"],
            payload=payload,
            checks=tuple(attrs["checks"]),
            params=dict(attrs["params"]),
        )
        return attrs


class SuiteSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, default="suite")
    seed = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    scenarios = ScenarioSerializer(many=True, allow_empty=False)

    def validate_scenarios(self, value):
        ids = [item["id"] for item in value]
        repeated = sorted({item for item in ids if ids.count(item) > 1})
        if repeated:
            raise serializers.ValidationError(f"Ids de cenário repetidos: {', '.join(repeated)}.")
        return value


class CertificationRecordSerializer(serializers.Serializer):
    scenario = serializers.CharField()
    check = serializers.CharField()
    label = serializers.CharField(allow_blank=True)
    holds = serializers.BooleanField()
    lhs = serializers.FloatField()
    rhs = serializers.FloatField()
    slack = serializers.FloatField()
    constants = serializers.DictField()


class CertificationRecordEntrySerializer(serializers.ModelSerializer):
    check = serializers.CharField(source="check_name")

    class Meta:
        model = CertificationRecordEntry
        fields = [
            "scenario",
            "check",
            "label",
            "holds",
            "lhs",
            "rhs",
            "slack",
            "constants",
            "runtime_ms",
        ]


class SuiteRunSerializer(serializers.ModelSerializer):
    records = CertificationRecordEntrySerializer(many=True, read_only=True)

    class Meta:
        model = SuiteRun
        fields = ["id", "suite", "seed", "started_at", "finished_at", "all_hold", "records"]
