import csv
import json
import logging
import math
from collections import Counter
from pathlib import Path

from apps.chaining.serializers import CHAINING_CSV_COLUMNS
from apps.covering.serializers import COVERING_CSV_COLUMNS
from apps.minkowski.serializers import TRACE_CSV_COLUMNS

from .serializers import CertificationRecordSerializer
from .types import CheckOutput, SuiteOutcome

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ("scenario", "check", "label", "holds", "lhs", "rhs", "slack", "constants")


def json_safe(value):
    """Troca NaN/inf por None para manter o JSON válido."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value


def _write_json(path: Path, document):
    with path.open("w", encoding="utf-8") as handle:
        json.dump(json_safe(document), handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_csv(path: Path, columns, rows):
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def record_documents(outcome: SuiteOutcome) -> list:
    return [dict(CertificationRecordSerializer(record).data) for record in outcome.records]


def summary_document(outcome: SuiteOutcome) -> dict:
    by_check = Counter(record.check for record in outcome.records)
    failed = Counter(record.check for record in outcome.failures)

    def running_max(key):
        values = [
            record.constants[key]
            for record in outcome.records
            if isinstance(record.constants.get(key), (int, float))
        ]
        return max(values) if values else None

    slacks = [record.slack for record in outcome.records if math.isfinite(record.slack)]
    return {
        "suite": outcome.name,
        "seed": outcome.seed,
        "all_hold": outcome.all_hold,
        "records": len(outcome.records),
        "failures": len(outcome.failures),
        "by_check": {
            check: {"records": count, "failures": failed.get(check, 0)}
            for check, count in sorted(by_check.items())
        },
        "max_C1": running_max("C1"),
        "max_L_hat": running_max("L_hat"),
        "max_R": running_max("R"),
        "min_slack": min(slacks) if slacks else None,
    }


def write_reports(outcome: SuiteOutcome, output: CheckOutput, out_dir: Path):
    """
    Grava os relatórios da suíte em `out_dir`. results.json não leva runtime_ms,
    que vai para timings.csv, para ser idêntico entre execuções com a mesma semente.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    records = record_documents(outcome)

    _write_json(
        out_dir / "results.json",
        {"suite": outcome.name, "seed": outcome.seed, "all_hold": outcome.all_hold, "records": records},
    )
    _write_csv(
        out_dir / "results.csv",
        RESULT_COLUMNS,
        [dict(row, constants=json.dumps(json_safe(row["constants"]), sort_keys=True)) for row in records],
    )
    _write_csv(
        out_dir / "timings.csv",
        ("scenario", "check", "label", "runtime_ms"),
        [
            {
                "scenario": record.scenario,
                "check": record.check,
                "label": record.label,
                "runtime_ms": f"{record.runtime_ms:.3f}",
            }
            for record in outcome.records
        ],
    )
    _write_json(out_dir / "summary.json", summary_document(outcome))

    covering = sorted(output.covering_rows, key=lambda row: (row["scenario"], row["epsilon"]))
    _write_csv(out_dir / "covering.csv", ("scenario",) + COVERING_CSV_COLUMNS, covering)
    chaining = sorted(output.chaining_rows, key=lambda row: (row["scenario"], row["alpha"]))
    _write_csv(out_dir / "chaining.csv", CHAINING_CSV_COLUMNS, chaining)
    convexification = sorted(output.convexification_rows, key=lambda row: (row["scenario"], row["k"]))
    _write_csv(out_dir / "convexification.csv", ("scenario",) + TRACE_CSV_COLUMNS, convexification)

    plots = out_dir / "plots"
    plots.mkdir(exist_ok=True)
    for name, (columns, rows) in sorted(output.plots.items()):
        with (plots / f"{name}.csv").open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(columns)
            writer.writerows(rows)
    logger.info("Relatórios gravados em %s", out_dir)
