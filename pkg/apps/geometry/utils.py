import logging
import math
from collections import deque
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError
from scipy.special import gamma as gamma_fn

from shared.exceptions import (
    DegenerateInput,
    DimensionMismatch,
    NonOrientable,
    ParamOutOfRange,
    TooLarge,
    Unsupported,
)

from .types import Ball, LatticeSample, PointCloud, Polytope, SimplicialBoundary

logger = logging.getLogger(__name__)

EXACT_BALL_DIM = 10


def tau_geom() -> float:
    """Tolerância geométrica relativa (settings.HULLMETRY["TAU_GEOM"])."""
    return float(settings.HULLMETRY["TAU_GEOM"])


def tau_vol() -> float:
    return float(settings.HULLMETRY["TAU_VOL"])


def max_hull_dim() -> int:
    return int(settings.HULLMETRY["MAX_HULL_DIM"])


def n_ball_volume(n: int, radius: float = 1.0) -> float:
    return float(math.pi ** (n / 2) / gamma_fn(n / 2 + 1) * radius**n)


def _normalization(points: np.ndarray) -> Tuple[np.ndarray, float]:
    center = points.mean(axis=0)
    extent = float(np.max(np.linalg.norm(points - center, axis=1))) * 2
    return center, extent if extent > 0 else 1.0


def affine_rank(points: np.ndarray, tol: Optional[float] = None) -> int:
    """Posto afim dos pontos, medido após reescalar para diâmetro 1."""
    if points.shape[0] < 2:
        return 0
    tol = tau_geom() if tol is None else tol
    center, extent = _normalization(points)
    singular = np.linalg.svd((points - center) / extent, compute_uv=False)
    return int(np.sum(singular > tol))


def _check_hull_dim(dim: int):
    if dim < 2:
        raise ParamOutOfRange("Fecho convexo exige dimensão n >= 2.")
    limit = max_hull_dim()
    if dim > limit:
        raise TooLarge(f"Fecho convexo limitado a n <= {limit} (recebido {dim}).")


def _orient_outward(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Ordena cada simplexo para que o cone a partir do centróide seja positivo."""
    interior = vertices.mean(axis=0)
    faces = faces.copy()
    dets = np.linalg.det(vertices[faces] - interior)
    flip = dets < 0
    faces[flip, 0], faces[flip, 1] = faces[flip, 1], faces[flip, 0].copy()
    return faces


def _qhull(points: np.ndarray, tol: float) -> ConvexHull:
    dim = points.shape[1]
    _check_hull_dim(dim)
    if points.shape[0] < dim + 1 or affine_rank(points, tol) < dim:
        raise DegenerateInput(
            f"Pontos afimmente dependentes: fecho sem interior em R^{dim}."
        )
    center, extent = _normalization(points)
    try:
        return ConvexHull((points - center) / extent)
    except QhullError as exc:
        raise DegenerateInput(f"Qhull rejeitou a entrada: {exc}") from exc


def hull_indices(points: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Índices (ordenados) dos pontos extremos."""
    return np.sort(_qhull(np.asarray(points, dtype=float), tol).vertices)


def quickhull(cloud: PointCloud, tol: Optional[float] = None) -> Polytope:
    """
    Fecho convexo T_h via Qhull (implementação de referência do Quickhull).
    A fronteira sai triangulada e orientada para fora; os vértices são os
    pontos extremos, na ordem de índice da entrada.
    """
    points = cloud.points
    dim = cloud.dim
    hull = _qhull(points, tol)

    extreme = np.sort(hull.vertices)
    remap = {int(old): new for new, old in enumerate(extreme)}
    vertices = points[extreme]
    faces = np.vectorize(remap.__getitem__)(hull.simplices)
    faces = _orient_outward(vertices, np.asarray(faces, dtype=int))

    boundary = SimplicialBoundary(vertices=vertices, faces=faces, dim=dim)
    logger.debug(
        "quickhull: %d pontos -> %d vértices, %d simplexos",
        points.shape[0],
        len(vertices),
        len(faces),
    )
    return Polytope(
        vertices=vertices,
        boundary=boundary,
        dim=dim,
        facets=tuple(tuple(int(i) for i in face) for face in faces),
    )


def _fan(facet: Sequence[int], dim: int) -> List[Tuple[int, ...]]:
    facet = [int(i) for i in facet]
    if dim == 2:
        if len(facet) != 2:
            raise DegenerateInput("Em R^2 cada faceta é uma aresta com 2 vértices.")
        return [tuple(facet)]
    if dim == 3:
        if len(facet) < 3:
            raise DegenerateInput("Faceta poligonal com menos de 3 vértices.")
        start = facet.index(min(facet))
        cycle = facet[start:] + facet[:start]
        return [(cycle[0], cycle[i], cycle[i + 1]) for i in range(1, len(cycle) - 1)]
    if len(facet) != dim:
        raise Unsupported(f"Em R^{dim} as facetas de entrada devem ser simplexos.")
    return [tuple(facet)]


def _flip(face: Tuple[int, ...]) -> Tuple[int, ...]:
    return (face[1], face[0]) + tuple(face[2:])


def _induced(face: Tuple[int, ...]) -> List[Tuple[Tuple[int, ...], int]]:
    out = []
    for position in range(len(face)):
        ridge = face[:position] + face[position + 1 :]
        parity = 1
        for i in range(len(ridge)):
            for j in range(i + 1, len(ridge)):
                if ridge[i] > ridge[j]:
                    parity = -parity
        out.append((tuple(sorted(ridge)), (-1) ** position * parity))
    return out


def triangulate_boundary(poly: Polytope) -> SimplicialBoundary:
    """
    Triangula cada faceta em leque a partir do vértice de menor índice e
    propaga uma orientação coerente entre simplexos vizinhos; ao final a
    fronteira toda é virada, se preciso, para ficar orientada para fora.
    """
    dim = poly.dim
    faces: List[Tuple[int, ...]] = []
    for facet in poly.facets:
        faces.extend(_fan(facet, dim))
    if not faces:
        raise NonOrientable("Poliedro sem facetas.")

    incidence: dict = {}
    for index, face in enumerate(faces):
        for ridge, _ in _induced(face):
            incidence.setdefault(ridge, []).append(index)
    for ridge, owners in incidence.items():
        if len(owners) != 2:
            raise NonOrientable(
                f"Fronteira não fechada: a face {ridge} pertence a {len(owners)} simplexos."
            )

    oriented: List[Optional[Tuple[int, ...]]] = [None] * len(faces)
    for seed in range(len(faces)):
        if oriented[seed] is not None:
            continue
        oriented[seed] = faces[seed]
        queue = deque([seed])
        while queue:
            current = queue.popleft()
            signs = dict(_induced(oriented[current]))
            for ridge, sign in signs.items():
                for neighbour in incidence[ridge]:
                    if neighbour == current:
                        continue
                    if oriented[neighbour] is None:
                        candidate = faces[neighbour]
                        if dict(_induced(candidate))[ridge] == sign:
                            candidate = _flip(candidate)
                        oriented[neighbour] = candidate
                        queue.append(neighbour)
                    elif dict(_induced(oriented[neighbour]))[ridge] == sign:
                        raise NonOrientable(
                            "Orientação inconsistente entre simplexos vizinhos."
                        )

    boundary = SimplicialBoundary(
        vertices=poly.vertices, faces=np.array(oriented, dtype=int), dim=dim
    )
    if volume_det(boundary) < 0:
        boundary = SimplicialBoundary(
            vertices=poly.vertices,
            faces=np.array([_flip(face) for face in oriented], dtype=int),
            dim=dim,
        )
    return boundary


def volume_det(boundary: SimplicialBoundary) -> float:
    """Soma de det(v_1, ..., v_n) / n! sobre os simplexos da fronteira."""
    if len(boundary) == 0:
        return 0.0
    dets = np.linalg.det(boundary.simplices)
    return float(dets.sum() / math.factorial(boundary.dim))


def volume_projected(boundary: SimplicialBoundary) -> float:
    """
    Fórmula por projeção: média da n-ésima coordenada vezes o volume
    orientado da projeção que apaga essa coordenada. O sinal global é
    (-1)^(n-1).
    """
    n = boundary.dim
    if len(boundary) == 0:
        return 0.0
    simplices = boundary.simplices
    heights = simplices[:, :, n - 1].mean(axis=1)
    projected = simplices[:, :, : n - 1].transpose(0, 2, 1)
    ones = np.ones((simplices.shape[0], 1, n))
    dets = np.linalg.det(np.concatenate([ones, projected], axis=1))
    total = float(np.sum(heights * dets) / math.factorial(n - 1))
    return (-1) ** (n - 1) * total


def make_polytope(vertices, facets: Iterable[Sequence[int]]) -> Polytope:
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 2:
        raise DegenerateInput("Lista de vértices mal formada.")
    dim = int(vertices.shape[1])
    _check_hull_dim(dim)
    facets = tuple(tuple(int(i) for i in facet) for facet in facets)
    for facet in facets:
        if any(i < 0 or i >= len(vertices) for i in facet):
            raise DegenerateInput("Faceta referencia vértice inexistente.")
    draft = Polytope(
        vertices=vertices,
        boundary=SimplicialBoundary(vertices, np.zeros((0, dim)), dim),
        dim=dim,
        facets=facets,
    )
    boundary = triangulate_boundary(draft)
    poly = Polytope(vertices=vertices, boundary=boundary, dim=dim, facets=facets)
    if volume_det(boundary) <= tau_vol() * _normalization(vertices)[1] ** dim:
        raise DegenerateInput("Poliedro com volume nulo.")
    return poly


def polytope_volume(poly: Polytope) -> float:
    return volume_det(poly.boundary)


def _circumball(support: np.ndarray) -> Tuple[np.ndarray, float]:
    """Menor bola com todos os pontos de `support` na superfície."""
    if len(support) == 0:
        return None, -1.0
    if len(support) == 1:
        return support[0].copy(), 0.0
    base = support[0]
    span = support[1:] - base
    gram = span @ span.T
    rhs = 0.5 * np.sum(span**2, axis=1)
    coeffs = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = base + coeffs @ span
    radius = float(np.max(np.linalg.norm(support - center, axis=1)))
    return center, radius


def _welzl(points: np.ndarray, tol: float) -> Tuple[np.ndarray, float, np.ndarray]:
    dim = points.shape[1]

    def inside(center, radius, p):
        return center is not None and np.linalg.norm(p - center) <= radius + tol

    def solve(limit: int, support: List[int]):
        center, radius = _circumball(points[support]) if support else (None, -1.0)
        if len(support) == dim + 1:
            return center, radius, support
        chosen = list(support)
        for i in range(limit):
            if not inside(center, radius, points[i]):
                center, radius, chosen = solve(i, support + [i])
        return center, radius, chosen

    center, radius, support = solve(len(points), [])
    return center, radius, np.array(sorted(support), dtype=int)


def _farthest(points: np.ndarray, center: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(points - center, axis=1)))


def _dual_ball(points: np.ndarray, tol: float) -> Tuple[np.ndarray, float, np.ndarray]:
    """
    Bola mínima pelo problema dual no simplexo:
    max sum_i l_i |p_i|^2 - |sum_i l_i p_i|^2. O centro é depois polido como
    circuncentro dos pontos de peso positivo, no span afim deles.
    """
    origin = points.mean(axis=0)
    scale = _farthest(points, origin) or 1.0
    shifted = (points - origin) / scale
    norms = np.sum(shifted**2, axis=1)
    count = len(points)

    def objective(weights):
        center = weights @ shifted
        return center @ center - weights @ norms

    def gradient(weights):
        return 2 * shifted @ (weights @ shifted) - norms

    result = minimize(
        objective,
        np.full(count, 1 / count),
        jac=gradient,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * count,
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1, "jac": lambda w: np.ones(count)}],
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    weights = np.clip(result.x, 0.0, None)
    support = np.flatnonzero(weights > max(tol, 1e-6) * weights.max())
    polished, _ = _circumball(points[support])
    center = min((weights / weights.sum()) @ points, polished, key=lambda c: _farthest(points, c))
    return center, _farthest(points, center), support


def min_enclosing_ball(cloud: PointCloud, tol: Optional[float] = None) -> Ball:
    """
    Menor bola que contém a nuvem (bola circunscrita S_D).
    Welzl exato até n = 10, com permutação determinística; acima disso,
    o dual quadrático (SLSQP) com o centro polido sobre os pontos de suporte.
    """
    tol = tau_geom() if tol is None else tol
    points = cloud.points
    dim = cloud.dim
    if points.shape[0] == 1:
        return Ball(center=points[0].copy(), radius=0.0, support=np.array([0]))

    # A bola mínima de um conjunto é a bola mínima dos seus pontos extremos.
    candidates = np.arange(points.shape[0])
    if 2 <= dim <= max_hull_dim() and points.shape[0] > dim + 1:
        try:
            candidates = hull_indices(points, tol)
        except DegenerateInput:
            pass

    subset = points[candidates]
    if dim <= EXACT_BALL_DIM:
        order = np.random.default_rng(0).permutation(len(subset))
        center, radius, support = _welzl(subset[order], tol)
        support_idx = candidates[order[support]]
    else:
        center, radius, support = _dual_ball(subset, tol)
        support_idx = candidates[support]

    radius = float(max(radius, np.max(np.linalg.norm(points - center, axis=1))))
    return Ball(center=np.asarray(center, dtype=float), radius=radius, support=support_idx)


def beta_ratio(poly: Polytope) -> float:
    """beta_D = Vol(S_D) / Vol(D)."""
    volume = polytope_volume(poly)
    if volume <= 0:
        raise DegenerateInput("beta indefinido para volume nulo.")
    ball = min_enclosing_ball(poly.cloud)
    return n_ball_volume(poly.dim, ball.radius) / volume


def volume_ratio_poly(poly: Polytope) -> float:
    """R_Poly,n = Vol(T_h) / Vol(T)."""
    volume = polytope_volume(poly)
    if volume <= 0:
        raise DegenerateInput("Razão de volumes indefinida para volume nulo.")
    hull = quickhull(poly.cloud)
    return polytope_volume(hull) / volume


def is_convex(poly: Polytope, tol: Optional[float] = None) -> bool:
    tol = tau_vol() if tol is None else tol
    return abs(volume_ratio_poly(poly) - 1.0) <= tol * 10


def _ray_direction(dim: int) -> np.ndarray:
    direction = np.sqrt(np.arange(2, dim + 2, dtype=float)) % 1.0 + 0.1
    return direction / np.linalg.norm(direction)


def point_in_body(poly: Polytope, points: np.ndarray, chunk: int = 200_000) -> np.ndarray:
    """
    Pertinência por paridade de raio contra a fronteira orientada; vale para
    poliedros não convexos. O raio segue uma direção genérica fixa.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != poly.dim:
        raise DimensionMismatch("Pontos e poliedro em dimensões diferentes.")
    direction = _ray_direction(poly.dim)
    inverses, anchors = [], []
    for simplex in poly.boundary.simplices:
        system = np.column_stack([(simplex[1:] - simplex[0]).T, -direction])
        if abs(np.linalg.det(system)) < 1e-14:
            continue
        inverses.append(np.linalg.inv(system))
        anchors.append(simplex[0])

    inside = np.zeros(points.shape[0], dtype=bool)
    for start in range(0, points.shape[0], chunk):
        block = points[start : start + chunk]
        crossings = np.zeros(block.shape[0], dtype=int)
        for inverse, anchor in zip(inverses, anchors):
            solution = (block - anchor) @ inverse.T
            weights, distance = solution[:, :-1], solution[:, -1]
            hit = (
                np.all(weights >= 0, axis=1)
                & (weights.sum(axis=1) <= 1)
                & (distance > 0)
            )
            crossings += hit
        inside[start : start + chunk] = crossings % 2 == 1
    return inside


def point_in_hull(hull: Polytope, points: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Pertinência em politopo convexo pelas desigualdades das facetas."""
    tol = tau_geom() if tol is None else tol
    points = np.atleast_2d(np.asarray(points, dtype=float))
    normals, offsets = facet_inequalities(hull)
    return np.all(points @ normals.T + offsets <= tol, axis=1)


def affine_frame(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Centro, base ortonormal (linhas) do span afim e escala dos pontos."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center = points.mean(axis=0)
    extent = float(np.max(np.linalg.norm(points - center, axis=1))) * 2 or 1.0
    _, singular, vh = np.linalg.svd((points - center) / extent, full_matrices=False)
    rank = int(np.sum(singular > tau_geom()))
    return center, vh[:rank], extent


def extreme_points(points: np.ndarray) -> np.ndarray:
    """Pontos extremos de conv(points), também quando o fecho é degenerado."""
    points = np.unique(np.atleast_2d(np.asarray(points, dtype=float)), axis=0)
    if len(points) <= 2:
        return points
    center, basis, _ = affine_frame(points)
    rank = basis.shape[0]
    if rank == 0:
        return points[:1]
    coords = (points - center) @ basis.T
    if rank == 1:
        return points[[int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))]]
    if rank > max_hull_dim():
        return points
    return points[hull_indices(coords)]


def hull_membership(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Pertinência em conv(points) medida no span afim dos pontos."""
    center, basis, extent = affine_frame(points)
    tol = tau_geom() * extent
    query = np.atleast_2d(np.asarray(query, dtype=float))
    coords = (query - center) @ basis.T
    residual = np.linalg.norm((query - center) - coords @ basis, axis=1)
    inside = residual <= tol
    rank = basis.shape[0]
    if rank == 0:
        return inside
    projected = (np.asarray(points, dtype=float) - center) @ basis.T
    if rank == 1:
        return (
            inside
            & (coords[:, 0] >= projected.min() - tol)
            & (coords[:, 0] <= projected.max() + tol)
        )
    hull = quickhull(PointCloud(projected))
    return inside & point_in_hull(hull, coords, tol)


def sample_point_hull(points: np.ndarray, spacing: float) -> np.ndarray:
    """
    Amostra determinística de conv(points) com resolução `spacing`, feita no
    span afim: segmentos incluem as pontas, fechos cheios usam centros de células.
    """
    extremes = extreme_points(points)
    center, basis, _ = affine_frame(extremes)
    rank = basis.shape[0]
    if rank == 0:
        return extremes[:1].copy()
    coords = (extremes - center) @ basis.T
    if rank == 1:
        low, high = coords[:, 0].min(), coords[:, 0].max()
        count = int(math.ceil((high - low) / spacing - 1e-12)) + 1
        return center + np.linspace(low, high, count)[:, None] @ basis
    hull = quickhull(PointCloud(coords))
    lower, upper = hull.bounds()
    sample = sample_region(lower, upper, spacing, lambda nodes: point_in_hull(hull, nodes))
    return center + sample.points @ basis


def facet_inequalities(hull: Polytope) -> Tuple[np.ndarray, np.ndarray]:
    """Normais unitárias externas `a` e termos `b` com a·x + b <= 0 no interior."""
    simplices = hull.boundary.simplices
    interior = hull.vertices.mean(axis=0)
    normals, offsets = [], []
    for simplex in simplices:
        span = simplex[1:] - simplex[0]
        _, _, vh = np.linalg.svd(span)
        normal = vh[-1]
        if np.dot(normal, interior - simplex[0]) > 0:
            normal = -normal
        normals.append(normal)
        offsets.append(-np.dot(normal, simplex[0]))
    return np.array(normals), np.array(offsets)


def lattice_spacing(extent: np.ndarray, points_per_axis: int, max_points: int) -> float:
    extent = np.maximum(np.asarray(extent, dtype=float), 1e-12)
    spacing = float(extent.max()) / points_per_axis
    count = float(np.prod(np.ceil(extent / spacing)))
    if count > max_points:
        spacing *= (count / max_points) ** (1.0 / len(extent))
    return spacing


def sample_region(
    lower: np.ndarray, upper: np.ndarray, spacing: float, membership
) -> LatticeSample:
    """Amostra de centros de células da caixa [lower, upper] filtrada por `membership`."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    shape = tuple(int(max(1, math.ceil((hi - lo) / spacing - 1e-12))) for lo, hi in zip(lower, upper))
    origin = lower + 0.5 * spacing
    frame = LatticeSample(origin=origin, spacing=spacing, mask=np.ones(shape, dtype=bool))
    mask = membership(frame.lattice_points()).reshape(shape)
    return LatticeSample(origin=origin, spacing=spacing, mask=mask)


def sample_body(poly: Polytope, spacing: float) -> LatticeSample:
    lower, upper = poly.bounds()
    return sample_region(lower, upper, spacing, lambda pts: point_in_body(poly, pts))


def sample_hull(hull: Polytope, spacing: float) -> LatticeSample:
    lower, upper = hull.bounds()
    return sample_region(lower, upper, spacing, lambda pts: point_in_hull(hull, pts))


def regular_polygon(sides: int, radius: float = 1.0) -> Polytope:
    angles = 2 * np.pi * np.arange(sides) / sides
    vertices = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    facets = [(i, (i + 1) % sides) for i in range(sides)]
    return make_polytope(vertices, facets)


def sphere_polytope(dim: int, count: int = 256, radius: float = 1.0) -> Polytope:
    """Politopo inscrito na esfera de raio `radius`, com vértices determinísticos."""
    if dim == 2:
        return regular_polygon(count, radius)
    if dim == 3:
        index = np.arange(count) + 0.5
        polar = np.arccos(1 - 2 * index / count)
        azimuth = np.pi * (1 + 5**0.5) * index
        vertices = np.column_stack(
            [
                np.cos(azimuth) * np.sin(polar),
                np.sin(azimuth) * np.sin(polar),
                np.cos(polar),
            ]
        )
    else:
        raw = np.random.default_rng(dim).standard_normal((count, dim))
        vertices = np.vstack([raw / np.linalg.norm(raw, axis=1, keepdims=True), np.eye(dim), -np.eye(dim)])
    return quickhull(PointCloud(radius * vertices))
