from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from apps.harness.management.base import FAILED_CERTIFICATION, USAGE_ERROR
from apps.harness.utils import run_suite
from shared.exceptions import HullmetryError


class Command(BaseCommand):
    help = "Executa uma suíte de certificação e grava os relatórios em --out."

    def add_arguments(self, parser):
        parser.add_argument("suite", help="Arquivo JSON da suíte ou nome da biblioteca (ex.: default).")
        parser.add_argument("--out", required=True, help="Diretório dos relatórios.")
        parser.add_argument("--seed", type=int, default=None, help="Semente mestre.")
        parser.add_argument("--jobs", type=int, default=1, help="Cenários em paralelo.")
        parser.add_argument("--store", action="store_true", help="Guarda a execução no banco.")

    def handle(self, *args, **options):
        if options["seed"] is not None and options["seed"] < 0:
            raise CommandError("--seed deve ser não negativa.", returncode=USAGE_ERROR)
        try:
            outcome = run_suite(
                options["suite"],
                out_dir=options["out"],
                seed=options["seed"],
                jobs=options["jobs"],
                store=options["store"],
            )
        except ValidationError as exc:
            raise CommandError(f"Suíte inválida: {exc.detail}", returncode=USAGE_ERROR)
        except (HullmetryError, FileNotFoundError, ValueError) as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=USAGE_ERROR)

        for record in outcome.failures:
            self.stderr.write(
                f"FALHOU {record.scenario}/{record.check} {record.label}: "
                f"lhs={record.lhs:.6g} rhs={record.rhs:.6g}"
            )
        self.stdout.write(
            f"{outcome.name}: {len(outcome.records)} registros, "
            f"{len(outcome.failures)} falhas, semente {outcome.seed}"
        )
        if not outcome.all_hold:
            raise CommandError(
                f"{len(outcome.failures)} certificações falharam.", returncode=FAILED_CERTIFICATION
            )
