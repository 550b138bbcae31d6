from rest_framework import serializers

CHAINING_CSV_COLUMNS = ("scenario", "alpha", "gamma_T", "gamma_Th", "L_bound", "esup", "L_hat")


class AdmissibleSequenceSerializer(serializers.Serializer):
    partitions = serializers.ListField(
        child=serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
    )


class GammaEstimateSerializer(serializers.Serializer):
    alpha = serializers.FloatField()
    value = serializers.FloatField()
    method = serializers.CharField()
    witness = AdmissibleSequenceSerializer(allow_null=True)


class SupEstimateSerializer(serializers.Serializer):
    mean = serializers.FloatField()
    std_error = serializers.FloatField()
    trials = serializers.IntegerField()
    seed = serializers.IntegerField()


class GammaRatioReportSerializer(serializers.Serializer):
    mode = serializers.CharField()
    alpha = serializers.FloatField()
    dim = serializers.IntegerField()
    R = serializers.FloatField()
    gamma_T = serializers.FloatField()
    gamma_Th = serializers.FloatField()
    gamma_T_method = serializers.CharField()
    L_bound = serializers.FloatField()
    slack = serializers.FloatField()
    holds = serializers.BooleanField()


class MajorizingMeasureRecordSerializer(serializers.Serializer):
    gamma2 = serializers.FloatField()
    esup = serializers.FloatField()
    std_error = serializers.FloatField()
    L_hat = serializers.FloatField()
    trials = serializers.IntegerField()
    seed = serializers.IntegerField()


class GammaCurvePointSerializer(serializers.Serializer):
    size = serializers.IntegerField()
    gamma_greedy = serializers.FloatField()
    entropy = serializers.FloatField()


def chaining_row(scenario: str, gamma_report=None, mm_record=None) -> dict:
    """Linha CSV de um cenário; colunas sem medida ficam vazias."""
    row = dict.fromkeys(CHAINING_CSV_COLUMNS, "")
    row["scenario"] = scenario
    if gamma_report is not None:
        row.update(
            alpha=gamma_report.alpha,
            gamma_T=gamma_report.gamma_T,
            gamma_Th=gamma_report.gamma_Th,
            L_bound=gamma_report.L_bound,
        )
    if mm_record is not None:
        row.update(esup=mm_record.esup, L_hat=mm_record.L_hat)
        if gamma_report is None:
            row.update(alpha=2.0, gamma_T=mm_record.gamma2)
    return row
