from apps.harness.management.base import RecordCommand
from apps.minkowski.serializers import RevBMReportSerializer
from apps.minkowski.utils import approximate, check_reverse_bm


class Command(RecordCommand):
    help = "Brunn-Minkowski reverso com aplicações identidade: C1 empírico."

    def add_arguments(self, parser):
        self.add_body_argument(parser)
        parser.add_argument("--other", default=None, help="Segundo corpo (padrão: o mesmo).")
        parser.add_argument("--s", type=float, default=1.0)
        parser.add_argument("--t", type=float, default=1.0)
        parser.add_argument("--m", type=int, default=1)

    def compute(self, body, other=None, s=1.0, t=1.0, m=1, **options):
        settings = self.settings_options()

        def load(reference):
            return approximate(
                self.body(reference),
                points_per_axis=settings["GRID_POINTS_PER_AXIS"],
                max_points=settings["MAX_SAMPLE_POINTS"],
            )

        first = load(body)
        second = load(other) if other else first
        report = check_reverse_bm(first, second, s, t, m, settings["MAX_SAMPLE_POINTS"])
        return dict(RevBMReportSerializer(report).data)
