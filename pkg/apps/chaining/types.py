from dataclasses import dataclass
from typing import Optional, Tuple

# Uma partição é uma tupla de células; cada célula, uma tupla ordenada de índices.
Partition = Tuple[Tuple[int, ...], ...]

EXACT = "exact"
GREEDY = "greedy"
ENTROPY_INTEGRAL = "entropy_integral"


@dataclass(frozen=True)
class AdmissibleSequence:
    """
    Sequência de partições encaixadas (A_m) do conjunto de índices, com
    |A_0| = 1 e |A_m| <= 2^(2^m). Termina quando todas as células têm
    diâmetro nulo; os termos seguintes não contribuem.
    """

    partitions: Tuple[Partition, ...]


@dataclass(frozen=True)
class GammaEstimate:
    alpha: float
    value: float
    method: str
    witness: Optional[AdmissibleSequence] = None


@dataclass(frozen=True)
class SupEstimate:
    """Média Monte Carlo de sup_t <t, g>, com erro padrão = desvio / sqrt(trials)."""

    mean: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class GammaRatioReport:
    mode: str
    alpha: float
    dim: int
    R: float
    gamma_T: float
    gamma_Th: float
    gamma_T_method: str
    L_bound: float
    slack: float
    holds: bool


@dataclass(frozen=True)
class MajorizingMeasureRecord:
    gamma2: float
    esup: float
    std_error: float
    L_hat: float
    trials: int
    seed: int


@dataclass(frozen=True)
class GammaCurvePoint:
    size: int
    gamma_greedy: float
    entropy: float
