from apps.harness.management.base import RecordCommand
from apps.minkowski.serializers import ConvexificationTraceSerializer
from apps.minkowski.utils import approximate, convexification_gap


class Command(RecordCommand):
    help = "Médias de Minkowski A(k), k = 1..K: volume, distância ao fecho e cota."

    def add_arguments(self, parser):
        self.add_body_argument(parser)
        parser.add_argument("--k", type=int, default=8)
        parser.add_argument("--points-per-axis", type=int, default=None)

    def compute(self, body, k, points_per_axis=None, **options):
        settings = self.settings_options()
        body_approx = approximate(
            self.body(body),
            points_per_axis=points_per_axis or settings["CONVEXIFY_POINTS_PER_AXIS"],
            max_points=settings["MAX_SAMPLE_POINTS"],
        )
        traces = convexification_gap(
            body_approx, k, settings["REVBM_C1"], settings["MAX_SAMPLE_POINTS"]
        )
        return {"kind": body_approx.kind, "trace": ConvexificationTraceSerializer(traces, many=True).data}
