from apps.covering.serializers import (
    CoveringReportSerializer,
    HullCoverRecordSerializer,
    VolumeBoundsSerializer,
)
from apps.covering.utils import POLY, check_hull_cover_ratio, covering_curve, volume_cover_bounds
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "Números de cobertura: curva gulosa/empacotamento/exata, cotas por volume e lema do fecho."

    def add_arguments(self, parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--body")
        group.add_argument("--cloud")
        parser.add_argument("--eps", type=float, action="append", required=True)
        parser.add_argument("--mode", choices=["poly", "general"], default=POLY)
        parser.add_argument("--R", type=float, default=None, help="Razão de volumes para nuvens.")

    def compute(self, eps, body=None, cloud=None, mode=POLY, R=None, **options):
        limit = self.settings_options()["EXACT_COVER_LIMIT"]
        if body:
            poly = self.body(body)
            return {
                "volume_bounds": [
                    dict(VolumeBoundsSerializer(volume_cover_bounds(poly, value)).data, epsilon=value)
                    for value in eps
                ],
                "hull_cover": HullCoverRecordSerializer(
                    [check_hull_cover_ratio(poly, value, mode, exact_limit=limit) for value in eps],
                    many=True,
                ).data,
            }
        points = self.cloud(cloud)
        document = {"curve": CoveringReportSerializer(covering_curve(points, eps, limit), many=True).data}
        if R is not None:
            document["hull_cover"] = HullCoverRecordSerializer(
                [check_hull_cover_ratio(points, value, POLY, R=R, exact_limit=limit) for value in eps],
                many=True,
            ).data
        return document
