from apps.entropy.serializers import LExistenceReportSerializer, load_scenario
from apps.entropy.utils import l_existence_report
from apps.harness.management.base import RecordCommand


class Command(RecordCommand):
    help = "Decide a existência de L para um perfil de entropia (chi, psi)."

    def add_arguments(self, parser):
        parser.add_argument("--chi", type=float, required=True)
        parser.add_argument("--psi", type=float, required=True)
        parser.add_argument("--delta", type=float, default=1.0)
        parser.add_argument("--C", type=float, default=1.0)

    def compute(self, chi, psi, delta=1.0, C=1.0, **options):
        profile, delta, constant = load_scenario({"chi": chi, "psi": psi, "delta": delta, "C": C})
        return dict(LExistenceReportSerializer(l_existence_report(profile, delta, constant)).data)
