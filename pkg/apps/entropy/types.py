import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from shared.exceptions import ParamOutOfRange

PLAIN = "plain"
LOGLOG = "loglog"

CONSTANT = "constant"
LOGSQ = "logsq"
LOG3_OVER_LOGLOG = "log3_over_loglog"

CONSTANT_LABELS = {CONSTANT: "C3", LOGSQ: "C4", LOG3_OVER_LOGLOG: "C5"}


@dataclass(frozen=True)
class EntropyProfile:
    """
    Crescimento de log N(T, eps):
      - plain:  O(eps^-chi · |log eps|^psi)
      - loglog: O(eps^-2 · |log|log eps||^psi), só como saída de hull_profile
    """

    chi: float
    psi: float
    form: str = PLAIN

    def __post_init__(self):
        if not (math.isfinite(self.chi) and math.isfinite(self.psi)):
            raise ParamOutOfRange("chi e psi devem ser finitos.")
        if self.chi < 2:
            raise ParamOutOfRange(f"chi deve ser >= 2 (recebido {self.chi}).")
        if self.form not in (PLAIN, LOGLOG):
            raise ParamOutOfRange(f"Forma desconhecida: {self.form}.")


@dataclass(frozen=True)
class RatioFunction:
    """Cota f(eps) para log N(T_h, eps) / log N(T, eps) no domínio (0, Δ]."""

    kind: str
    constant: float = 1.0

    def __post_init__(self):
        if self.kind not in CONSTANT_LABELS:
            raise ParamOutOfRange(f"Tipo de função desconhecido: {self.kind}.")
        if not (math.isfinite(self.constant) and self.constant > 0):
            raise ParamOutOfRange(f"Constante deve ser positiva (recebido {self.constant}).")

    @property
    def constant_label(self) -> str:
        return CONSTANT_LABELS[self.kind]

    def __call__(self, epsilon):
        eps = np.asarray(epsilon, dtype=float)
        if self.kind == CONSTANT:
            value = np.ones_like(eps)
        elif self.kind == LOGSQ:
            value = np.log(eps) ** 2
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                magnitude = np.abs(np.log(eps))
                value = magnitude**3 / np.abs(np.log(magnitude))
            # em eps = 1 o numerador zera antes do denominador explodir
            value = np.where(magnitude == 0, 0.0, value)
        value = self.constant * value
        return float(value) if value.ndim == 0 else value

    def singular_points(self, delta: float) -> Tuple[float, ...]:
        """Pontos em (0, Δ] onde o integrando não é integrável."""
        if self.kind != LOG3_OVER_LOGLOG:
            return ()
        return tuple(point for point in (math.exp(-1), math.e) if point <= delta)


@dataclass(frozen=True)
class QuadratureStep:
    eta: float
    value: float


@dataclass(frozen=True)
class IntegrabilityVerdict:
    """`converges` fica None quando o orçamento de refinamentos acaba sem decisão."""

    converges: Optional[bool]
    value: Optional[float]
    reason: str
    singularity: Optional[float] = None
    analytic: Optional[float] = None
    trace: Tuple[QuadratureStep, ...] = ()


@dataclass(frozen=True)
class LExistenceReport:
    profile: EntropyProfile
    hull_profile: EntropyProfile
    ratio: RatioFunction
    delta: float
    verdict: IntegrabilityVerdict

    @property
    def L_exists(self) -> Optional[bool]:
        return self.verdict.converges
