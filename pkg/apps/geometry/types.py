from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from shared.exceptions import DegenerateInput, DimensionMismatch

# Um ponto é um vetor numpy de n coordenadas.
Point = np.ndarray


def _as_points(points) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[0] == 0:
        raise DegenerateInput("Nuvem de pontos vazia ou mal formada.")
    if not np.all(np.isfinite(array)):
        raise DegenerateInput("Coordenadas não finitas na nuvem de pontos.")
    return array


@dataclass(frozen=True)
class PointCloud:
    """
    Conjunto finito T de pontos em R^n com uma métrica.
    Suporte comum das operações de cobertura, chaining e supremo gaussiano.
    """

    points: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.size

    def distances(self) -> np.ndarray:
        return cdist(self.points, self.points, metric=self.metric)

    def diameter(self) -> float:
        if self.size < 2:
            return 0.0
        return float(self.distances().max())

    def scaled(self, factor: float) -> "PointCloud":
        return PointCloud(self.points * factor, metric=self.metric)


@dataclass(frozen=True)
class SimplicialBoundary:
    """
    Fronteira triangulada: `faces[i]` lista, na ordem da orientação, os índices
    em `vertices` do i-ésimo simplexo.
    """

    vertices: np.ndarray
    faces: np.ndarray
    dim: int

    def __post_init__(self):
        faces = np.asarray(self.faces, dtype=int).reshape(-1, self.dim)
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))

    def __len__(self) -> int:
        return int(self.faces.shape[0])

    @property
    def simplices(self) -> np.ndarray:
        """Coordenadas empilhadas, formato (s, n, n)."""
        return self.vertices[self.faces]

    def ridge_orientations(self) -> dict:
        """
        Mapeia cada (n-2)-face (índices ordenados) para a lista de sinais
        induzidos pelos simplexos que a contêm.
        """
        ridges: dict = {}
        for face in self.faces:
            for position in range(self.dim):
                ridge = tuple(np.delete(face, position))
                sign = (-1) ** position * _permutation_parity(ridge)
                ridges.setdefault(tuple(sorted(ridge)), []).append(sign)
        return ridges

    def is_closed(self) -> bool:
        for signs in self.ridge_orientations().values():
            if len(signs) != 2 or signs[0] != -signs[1]:
                return False
        return True


def _permutation_parity(sequence: Tuple[int, ...]) -> int:
    items = list(sequence)
    parity = 1
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                parity = -parity
    return parity


@dataclass(frozen=True)
class Polytope:
    """
    Poliedro fechado e limitado em R^n (convexo ou não).
    `facets` guarda as facetas de entrada (ciclos orientados em R^3, arestas em
    R^2, simplexos a partir de R^4); `boundary` é a triangulação orientada.
    """

    vertices: np.ndarray
    boundary: SimplicialBoundary
    dim: int
    facets: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)

    @property
    def cloud(self) -> PointCloud:
        return PointCloud(self.vertices)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    support: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.radius < 0:
            raise DegenerateInput("Raio negativo.")

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        gaps = np.linalg.norm(np.atleast_2d(points) - self.center, axis=1)
        return gaps <= self.radius + tol


@dataclass(frozen=True)
class LatticeSample:
    """
    Amostra de um corpo em uma grade regular: o ponto de índice `i` fica em
    `origin + spacing * i`; `mask` marca os pontos que pertencem ao corpo.
    Cada ponto representa uma célula de volume spacing^n.
    """

    origin: np.ndarray
    spacing: float
    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))
        if self.mask.ndim != self.origin.shape[0]:
            raise DimensionMismatch("Máscara e origem com dimensões diferentes.")

    @property
    def dim(self) -> int:
        return int(self.mask.ndim)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def volume(self) -> float:
        return self.count * self.spacing**self.dim

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.argwhere(self.mask)

    def lattice_points(self) -> np.ndarray:
        """Todos os nós da grade, pertencentes ou não ao corpo."""
        axes = [np.arange(size) for size in self.mask.shape]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return self.origin + self.spacing * grid.reshape(-1, self.dim)
