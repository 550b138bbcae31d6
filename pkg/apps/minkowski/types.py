from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from apps.geometry.types import LatticeSample, Polytope
from shared.exceptions import DegenerateInput

CONVEX = "convex"
SAMPLED = "sampled"


@dataclass(frozen=True)
class BodyApprox:
    """
    Aproximação de um corpo compacto de R^n.

    Dois caminhos:
      - convexo exato: o corpo é conv(`vertices`), sem amostragem;
      - amostrado: `sample` é uma amostra em grade (densidade 1/spacing^n),
        com `source` guardando o poliedro original quando existe.
    """

    dim: int
    vertices: Optional[np.ndarray] = None
    sample: Optional[LatticeSample] = None
    source: Optional[Polytope] = None

    def __post_init__(self):
        if (self.vertices is None) == (self.sample is None):
            raise DegenerateInput("BodyApprox exige vértices convexos ou amostra, não ambos.")
        if self.vertices is not None:
            vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            object.__setattr__(self, "vertices", vertices)
        elif self.sample.count == 0:
            raise DegenerateInput("Amostra vazia: o corpo não tem pontos na grade.")

    @property
    def kind(self) -> str:
        return CONVEX if self.sample is None else SAMPLED

    @property
    def points(self) -> np.ndarray:
        return self.vertices if self.sample is None else self.sample.points


@dataclass(frozen=True)
class RevBMReport:
    lhs_vol: float
    rhs_terms: Tuple[float, float]
    empirical_C1: float
    s: float
    t: float
    m: int
    beta_A: float
    beta_B: float


@dataclass(frozen=True)
class ConvexificationTrace:
    """Um passo k da convexificação: volume de A(k), distância ao fecho e a cota."""

    k: int
    vol_Ak: float
    hausdorff_to_hull: float
    bound_value: float
    beta_Ak: float = 0.0


@dataclass(frozen=True)
class GeneralRatioReport:
    ratio: float
    bound: float
    c2_hat: float
    k_h: int
    holds: bool
    converged_k: Optional[int] = None
