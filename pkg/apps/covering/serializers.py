from rest_framework import serializers

COVERING_CSV_COLUMNS = ("epsilon", "n_greedy", "n_packing", "n_exact", "vol_lower", "vol_upper")


class CoveringReportSerializer(serializers.Serializer):
    epsilon = serializers.FloatField()
    n_greedy = serializers.IntegerField()
    n_packing = serializers.IntegerField()
    n_exact = serializers.IntegerField(allow_null=True)
    vol_lower = serializers.FloatField(allow_null=True)
    vol_upper = serializers.FloatField(allow_null=True)
    centers = serializers.SerializerMethodField()
    methods = serializers.ListField(child=serializers.CharField())

    def get_centers(self, report):
        return report.centers.tolist()


class VolumeBoundsSerializer(serializers.Serializer):
    lower = serializers.FloatField()
    upper = serializers.FloatField(allow_null=True)
    middle = serializers.FloatField(allow_null=True)
    inradius = serializers.FloatField()


class HullCoverRecordSerializer(serializers.Serializer):
    mode = serializers.CharField()
    epsilon = serializers.FloatField()
    dim = serializers.IntegerField()
    R = serializers.FloatField()
    n_hull = serializers.IntegerField()
    n_T = serializers.IntegerField()
    n_T_method = serializers.CharField()
    n_T_greedy = serializers.IntegerField()
    bound = serializers.FloatField()
    slack = serializers.FloatField()
    holds = serializers.BooleanField()


def report_rows(reports) -> list:
    """Linhas CSV de uma curva de cobertura; campos ausentes ficam vazios."""
    rows = []
    for report in reports:
        row = {column: getattr(report, column) for column in COVERING_CSV_COLUMNS}
        rows.append({key: ("" if value is None else value) for key, value in row.items()})
    return rows
