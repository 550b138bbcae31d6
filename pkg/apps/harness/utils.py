import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from django.conf import settings
from django.db import transaction
from django.db.models import Count, FloatField, Max, Min, Q
from django.db.models.fields.json import KeyTextTransform
from django.db.models.functions import Cast
from django.utils import timezone

from apps.geometry.serializers import load_cloud, load_polytope

from .checks import run_check
from .library import load_body, load_named_cloud, suite_path
from .models import CertificationRecordEntry, SuiteRun
from .reports import json_safe, write_reports
from .serializers import SuiteSerializer
from .types import CertificationRecord, CheckOutput, Scenario, SuiteOutcome

logger = logging.getLogger(__name__)


def options_from_settings(seed: Optional[int] = None) -> dict:
    """Constantes numéricas do settings HULLMETRY mais a semente mestre da execução."""
    options = dict(settings.HULLMETRY)
    options["seed"] = int(options["DEFAULT_SEED"] if seed is None else seed)
    return options


def _read_json(path) -> dict:
    with Path(path).open(encoding="utf-8") as handle:
        return json.load(handle)


def _suite_file(reference) -> Path:
    path = Path(reference)
    if path.exists():
        return path
    return suite_path(str(reference))


def load_suite(reference) -> Tuple[str, Optional[int], List[Scenario]]:
    """
    Lê e valida uma suíte (caminho ou nome da biblioteca).
    Devolve (nome, semente do arquivo ou None, cenários).
    """
    serializer = SuiteSerializer(data=_read_json(_suite_file(reference)))
    serializer.is_valid(raise_exception=True)
    data = serializer.validated_data
    scenarios = [item["scenario"] for item in data["scenarios"]]
    return data["name"], data["seed"], scenarios


def resolve_body(reference):
    """Poliedro a partir de um arquivo JSON ou de um nome da biblioteca."""
    path = Path(reference)
    if path.suffix == ".json" or path.exists():
        return load_polytope(_read_json(path))
    return load_body(reference)


def resolve_cloud(reference):
    path = Path(reference)
    if path.suffix == ".json" or path.exists():
        return load_cloud(_read_json(path))
    return load_named_cloud(reference)


def _failure(scenario: Scenario, check: str, error: Exception) -> CertificationRecord:
    return CertificationRecord(
        scenario=scenario.id,
        check=check,
        holds=False,
        lhs=float("nan"),
        rhs=float("nan"),
        slack=float("nan"),
        constants={"error": f"{type(error).__name__}: {error}"},
    )


def _run_scenario(scenario: Scenario, options: dict) -> CheckOutput:
    output = CheckOutput()
    for check in scenario.checks:
        started = time.perf_counter()
        try:
            partial = run_check(check, scenario, options)
        except Exception as error:
            logger.exception("Verificação %s falhou no cenário %s", check, scenario.id)
            partial = CheckOutput(records=[_failure(scenario, check, error)])
        elapsed = (time.perf_counter() - started) * 1000
        share = elapsed / max(len(partial.records), 1)
        partial.records = [replace(record, runtime_ms=share) for record in partial.records]
        output.extend(_prefixed(scenario, partial))
    logger.info("Cenário %s: %d registros", scenario.id, len(output.records))
    return output


def _prefixed(scenario: Scenario, output: CheckOutput) -> CheckOutput:
    output.plots = {f"{scenario.id}__{series}": data for series, data in output.plots.items()}
    return output


def run_suite(
    reference,
    out_dir=None,
    seed: Optional[int] = None,
    jobs: int = 1,
    store: bool = False,
) -> SuiteOutcome:
    """
    Executa todas as verificações da suíte. A semente vem do argumento, depois
    do arquivo da suíte, depois de HULLMETRY_SEED. Cenários rodam em paralelo
    com `jobs` threads; a ordem dos registros independe disso.
    """
    name, suite_seed, scenarios = load_suite(reference)
    options = options_from_settings(seed if seed is not None else suite_seed)
    logger.info("Suíte %s: %d cenários, semente %d", name, len(scenarios), options["seed"])

    with ThreadPoolExecutor(max_workers=max(int(jobs), 1)) as pool:
        outputs = list(pool.map(lambda scenario: _run_scenario(scenario, options), scenarios))

    merged = CheckOutput()
    for output in outputs:
        merged.extend(output)
    records = sorted(merged.records, key=lambda record: (record.scenario, record.check))
    outcome = SuiteOutcome(
        name=name,
        seed=options["seed"],
        records=tuple(records),
        out_dir=str(out_dir) if out_dir is not None else None,
    )
    if out_dir is not None:
        write_reports(outcome, merged, Path(out_dir))
    if store:
        store_outcome(outcome)
    if not outcome.all_hold:
        logger.warning("Suíte %s: %d certificações falharam", name, len(outcome.failures))
    return outcome


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


@transaction.atomic
def store_outcome(outcome: SuiteOutcome, started_at=None) -> SuiteRun:
    run = SuiteRun.objects.create(
        suite=outcome.name,
        seed=outcome.seed,
        started_at=started_at or timezone.now(),
        finished_at=timezone.now(),
        all_hold=outcome.all_hold,
    )
    CertificationRecordEntry.objects.bulk_create(
        [
            CertificationRecordEntry(
                run=run,
                scenario=record.scenario,
                check_name=record.check,
                label=record.label,
                holds=record.holds,
                lhs=_finite(record.lhs),
                rhs=_finite(record.rhs),
                slack=_finite(record.slack),
                constants=json_safe(record.constants),
                runtime_ms=record.runtime_ms,
            )
            for record in outcome.records
        ]
    )
    return run


def _constant(key: str):
    return Cast(KeyTextTransform(key, "constants"), FloatField())


def ledger_summary(suite: Optional[str] = None) -> List[Dict]:
    """
    Resumo por verificação das execuções guardadas: registros, falhas,
    pior folga e maiores constantes empíricas C1 e L̂ observadas.
    """
    entries = CertificationRecordEntry.objects.all()
    if suite:
        entries = entries.filter(run__suite=suite)
    rows = (
        entries.values("check_name")
        .annotate(
            records=Count("id"),
            failures=Count("id", filter=Q(holds=False)),
            runs=Count("run", distinct=True),
            min_slack=Min("slack"),
            max_C1=Max(_constant("C1")),
            max_L_hat=Max(_constant("L_hat")),
        )
        .order_by("check_name")
    )
    return [dict(row) for row in rows]
