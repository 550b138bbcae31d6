from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

BODY = "body"
CLOUD = "cloud"
PROFILE = "profile"


@dataclass(frozen=True)
class Scenario:
    """
    Um item da suíte: o objeto (`payload`, já carregado), o tipo e as
    verificações pedidas, com parâmetros opcionais (listas de eps, alpha,
    faixas de k, tentativas, R...).
    """

    id: str
    kind: str
    payload: Any
    checks: Tuple[str, ...]
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class CertificationRecord:
    """Uma desigualdade lhs <= rhs certificada; holds equivale a slack >= -tau_vol."""

    scenario: str
    check: str
    holds: bool
    lhs: float
    rhs: float
    slack: float
    label: str = ""
    constants: Dict[str, Any] = field(default_factory=dict)
    runtime_ms: float = 0.0


@dataclass
class CheckOutput:
    records: List[CertificationRecord] = field(default_factory=list)
    plots: Dict[str, Tuple[Tuple[str, str], List[Tuple[float, float]]]] = field(default_factory=dict)
    covering_rows: List[dict] = field(default_factory=list)
    chaining_rows: List[dict] = field(default_factory=list)
    convexification_rows: List[dict] = field(default_factory=list)

    def extend(self, other: "CheckOutput"):
        self.records.extend(other.records)
        self.plots.update(other.plots)
        self.covering_rows.extend(other.covering_rows)
        self.chaining_rows.extend(other.chaining_rows)
        self.convexification_rows.extend(other.convexification_rows)


@dataclass(frozen=True)
class SuiteOutcome:
    name: str
    seed: int
    records: Tuple[CertificationRecord, ...]
    out_dir: Optional[str] = None

    @property
    def all_hold(self) -> bool:
        return all(record.holds for record in self.records)

    @property
    def failures(self) -> List[CertificationRecord]:
        return [record for record in self.records if not record.holds]
