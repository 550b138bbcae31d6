from apps.chaining.serializers import GammaEstimateSerializer
from apps.chaining.utils import entropy_integral, gamma_exact_small, gamma_greedy
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "Funcional gamma_alpha de uma nuvem: exato, guloso ou integral de entropia."

    def add_arguments(self, parser):
        self.add_cloud_argument(parser)
        parser.add_argument("--alpha", type=float, default=2.0)
        parser.add_argument("--method", choices=["exact", "greedy", "entropy"], default="greedy")

    def compute(self, cloud, alpha=2.0, method="greedy", **options):
        settings = self.settings_options()
        points = self.cloud(cloud)
        if method == "exact":
            estimate = gamma_exact_small(points, alpha, settings["EXACT_GAMMA_LIMIT"])
        elif method == "greedy":
            estimate = gamma_greedy(points, alpha, settings["GREEDY_GAMMA_LIMIT"])
        else:
            estimate = entropy_integral(points, alpha)
        return dict(GammaEstimateSerializer(estimate).data)
