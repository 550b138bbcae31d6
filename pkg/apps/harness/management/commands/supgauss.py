from apps.chaining.serializers import SupEstimateSerializer
from apps.chaining.utils import gaussian_sup_mc
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "E sup_t <t, g> por Monte Carlo com semente fixa."

    def add_arguments(self, parser):
        self.add_cloud_argument(parser)
        parser.add_argument("--trials", type=int, default=100_000)
        parser.add_argument("--seed", type=int, default=None)

    def compute(self, cloud, trials=100_000, seed=None, **options):
        settings = self.settings_options(seed)
        estimate = gaussian_sup_mc(self.cloud(cloud), trials, settings["seed"], settings["MC_BLOCK"])
        return dict(SupEstimateSerializer(estimate).data)
