from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class CoveringReport:
    """
    Estimativas de N(T, d, epsilon) para uma nuvem, com a origem de cada número:
    `n_greedy` é cota superior (cobertura gulosa), `n_packing` é o tamanho de
    um conjunto 2-epsilon-separado (cota inferior certificada), `n_exact` vem
    da cobertura mínima quando a nuvem é pequena.
    """

    epsilon: float
    n_greedy: int
    n_packing: int
    n_exact: Optional[int] = None
    vol_lower: Optional[float] = None
    vol_upper: Optional[float] = None
    centers: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    methods: Tuple[str, ...] = ()

    @property
    def lower(self) -> int:
        return self.n_exact if self.n_exact is not None else self.n_packing


@dataclass(frozen=True)
class VolumeBounds:
    lower: float
    upper: Optional[float] = None
    middle: Optional[float] = None
    inradius: float = 0.0


@dataclass(frozen=True)
class HullCoverRecord:
    mode: str
    epsilon: float
    dim: int
    R: float
    n_hull: int
    n_T: int
    n_T_method: str
    n_T_greedy: int
    bound: float
    slack: float
    holds: bool
