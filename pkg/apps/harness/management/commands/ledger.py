from apps.harness.management.base import RecordCommand
from apps.harness.models import SuiteRun
from apps.harness.utils import ledger_summary


class Command(RecordCommand):
    help = "Resumo das execuções guardadas: falhas e maiores C1 e L̂ por verificação."

    def add_arguments(self, parser):
        parser.add_argument("--suite", default=None)

    def compute(self, suite=None, **options):
        runs = SuiteRun.objects.all()
        if suite:
            runs = runs.filter(suite=suite)
        return {"runs": runs.count(), "checks": ledger_summary(suite)}
