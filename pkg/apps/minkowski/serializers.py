from rest_framework import serializers

TRACE_CSV_COLUMNS = ("k", "vol", "gap", "bound")


class ConvexificationTraceSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    vol_Ak = serializers.FloatField()
    hausdorff_to_hull = serializers.FloatField()
    bound_value = serializers.FloatField()
    beta_Ak = serializers.FloatField()


class RevBMReportSerializer(serializers.Serializer):
    lhs_vol = serializers.FloatField()
    rhs_terms = serializers.ListField(child=serializers.FloatField())
    empirical_C1 = serializers.FloatField()
    s = serializers.FloatField()
    t = serializers.FloatField()
    m = serializers.IntegerField()
    beta_A = serializers.FloatField()
    beta_B = serializers.FloatField()


class GeneralRatioReportSerializer(serializers.Serializer):
    ratio = serializers.FloatField()
    bound = serializers.FloatField()
    c2_hat = serializers.FloatField()
    k_h = serializers.IntegerField()
    holds = serializers.BooleanField()
    converged_k = serializers.IntegerField(allow_null=True)


def trace_rows(traces) -> list:
    """Linhas CSV (k, vol, gap, bound) do traço de convexificação."""
    return [
        {
            "k": trace.k,
            "vol": trace.vol_Ak,
            "gap": trace.hausdorff_to_hull,
            "bound": trace.bound_value,
        }
        for trace in traces
    ]
