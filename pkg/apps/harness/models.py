from django.db import models
from django.db.models import JSONField
from django.utils import timezone


class SuiteRun(models.Model):
    """
    Uma execução de suíte de certificação guardada com `run --store`.
    """

    suite = models.CharField(max_length=200, verbose_name="Suíte")
    seed = models.BigIntegerField(verbose_name="Semente")
    started_at = models.DateTimeField(default=timezone.now, verbose_name="Início")
    finished_at = models.DateTimeField(null=True, blank=True, verbose_name="Fim")
    all_hold = models.BooleanField(default=False, verbose_name="Todas as certificações valem")

    class Meta:
        verbose_name = "Execução de Suíte"
        verbose_name_plural = "Execuções de Suítes"
        ordering = ["-started_at"]

    def __str__(self):
        status = "ok" if self.all_hold else "falhou"
        return f"{self.suite} (semente {self.seed}, {status})"


class CertificationRecordEntry(models.Model):
    """
    Registro persistido de uma desigualdade certificada (lhs <= rhs) com as
    constantes empíricas observadas (R, beta, L, C1, L̂...).
    """

    run = models.ForeignKey(
        SuiteRun,
        on_delete=models.CASCADE,
        related_name="records",
        verbose_name="Execução",
    )
    scenario = models.CharField(max_length=100, verbose_name="Cenário")
    check_name = models.CharField(max_length=50, verbose_name="Verificação")
    label = models.CharField(max_length=100, blank=True, default="", verbose_name="Rótulo")
    holds = models.BooleanField(verbose_name="Vale")
    lhs = models.FloatField(null=True, verbose_name="Lado esquerdo")
    rhs = models.FloatField(null=True, verbose_name="Lado direito")
    slack = models.FloatField(null=True, verbose_name="Folga")
    constants = JSONField(default=dict, blank=True, verbose_name="Constantes")
    runtime_ms = models.FloatField(default=0.0, verbose_name="Tempo (ms)")

    class Meta:
        verbose_name = "Registro de Certificação"
        verbose_name_plural = "Registros de Certificação"
        ordering = ["run", "scenario", "check_name", "id"]

    def __str__(self):
        verdict = "vale" if self.holds else "falha"
        slack = "indefinida" if self.slack is None else f"{self.slack:.3g}"
        return f"{self.scenario}/{self.check_name} {self.label}: {verdict} (folga {slack})"
