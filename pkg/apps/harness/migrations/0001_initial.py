import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="SuiteRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("suite", models.CharField(max_length=200, verbose_name="Suíte")),
                ("seed", models.BigIntegerField(verbose_name="Semente")),
                (
                    "started_at",
                    models.DateTimeField(
                        default=django.utils.timezone.now, verbose_name="Início"
                    ),
                ),
                (
                    "finished_at",
                    models.DateTimeField(blank=True, null=True, verbose_name="Fim"),
                ),
                (
                    "all_hold",
                    models.BooleanField(
                        default=False, verbose_name="Todas as certificações valem"
                    ),
                ),
            ],
            options={
                "verbose_name": "Execução de Suíte",
                "verbose_name_plural": "Execuções de Suítes",
                "ordering": ["-started_at"],
            },
        ),
        migrations.CreateModel(
            name="CertificationRecordEntry",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("scenario", models.CharField(max_length=100, verbose_name="Cenário")),
                ("check_name", models.CharField(max_length=50, verbose_name="Verificação")),
                (
                    "label",
                    models.CharField(
                        blank=True, default="", max_length=100, verbose_name="Rótulo"
                    ),
                ),
                ("holds", models.BooleanField(verbose_name="Vale")),
                ("lhs", models.FloatField(null=True, verbose_name="Lado esquerdo")),
                ("rhs", models.FloatField(null=True, verbose_name="Lado direito")),
                ("slack", models.FloatField(null=True, verbose_name="Folga")),
                (
                    "constants",
                    models.JSONField(blank=True, default=dict, verbose_name="Constantes"),
                ),
                ("runtime_ms", models.FloatField(default=0.0, verbose_name="Tempo (ms)")),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="records",
                        to="harness.suiterun",
                        verbose_name="Execução",
                    ),
                ),
            ],
            options={
                "verbose_name": "Registro de Certificação",
                "verbose_name_plural": "Registros de Certificação",
                "ordering": ["run", "scenario", "check_name", "id"],
            },
        ),
    ]
