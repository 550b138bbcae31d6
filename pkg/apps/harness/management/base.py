import json

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from apps.harness.reports import json_safe
from apps.harness.utils import options_from_settings, resolve_body, resolve_cloud
from shared.exceptions import HullmetryError

USAGE_ERROR = 2
FAILED_CERTIFICATION = 1


class RecordCommand(BaseCommand):
    """
    Base dos comandos de verificação única: `compute` devolve um documento
    JSON que vai para a saída padrão. Erros de entrada viram CommandError
    com código 2.
    """

    def add_body_argument(self, parser, required=True):
        parser.add_argument(
            "--body", required=required, help="Arquivo JSON do poliedro ou nome da biblioteca."
        )

    def add_cloud_argument(self, parser, required=True):
        parser.add_argument(
            "--cloud", required=required, help="Arquivo JSON da nuvem ou nome da biblioteca."
        )

    def body(self, reference):
        return resolve_body(reference)

    def cloud(self, reference):
        return resolve_cloud(reference)

    def settings_options(self, seed=None):
        return options_from_settings(seed)

    def compute(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            document = self.compute(**options)
        except ValidationError as exc:
            raise CommandError(f"Entrada inválida: {exc.detail}", returncode=USAGE_ERROR)
        except (HullmetryError, FileNotFoundError, json.JSONDecodeError) as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=USAGE_ERROR)
        self.stdout.write(json.dumps(json_safe(document), indent=2, sort_keys=True))
