import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.signal import fftconvolve
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from apps.geometry.types import LatticeSample, PointCloud, Polytope, SimplicialBoundary
from apps.geometry.utils import (
    affine_rank,
    extreme_points,
    hull_membership,
    is_convex,
    lattice_spacing,
    min_enclosing_ball,
    n_ball_volume,
    polytope_volume,
    quickhull,
    sample_body,
    sample_hull,
    sample_region,
    tau_vol,
    volume_ratio_poly,
)
from shared.exceptions import (
    DegenerateInput,
    DimensionMismatch,
    NonpositiveScale,
    ParamOutOfRange,
)

from .types import (
    CONVEX,
    SAMPLED,
    BodyApprox,
    ConvexificationTrace,
    GeneralRatioReport,
    RevBMReport,
)

logger = logging.getLogger(__name__)

GRID_POINTS_PER_AXIS = 200
MAX_SAMPLE_POINTS = 10**6
CONVERGENCE_ETA = 1e-3


# ---------------------------------------------------------------------------
# Construção
# ---------------------------------------------------------------------------


def _diameter(points: np.ndarray) -> float:
    extremes = extreme_points(points)
    if len(extremes) < 2:
        return 0.0
    return float(cdist(extremes, extremes).max())


def convex_body(vertices) -> BodyApprox:
    """Corpo convexo exato conv(vertices); só os pontos extremos são guardados."""
    vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
    return BodyApprox(dim=int(vertices.shape[1]), vertices=extreme_points(vertices))


def approximate(
    poly: Polytope,
    spacing: Optional[float] = None,
    points_per_axis: int = GRID_POINTS_PER_AXIS,
    max_points: int = MAX_SAMPLE_POINTS,
) -> BodyApprox:
    """
    Poliedro convexo vira corpo exato; não convexo vira amostra em grade
    (centros de células) com o poliedro guardado como `source`.
    """
    if is_convex(poly):
        return convex_body(poly.vertices)
    if spacing is None:
        lower, upper = poly.bounds()
        spacing = lattice_spacing(upper - lower, points_per_axis, max_points)
    sample = sample_body(poly, spacing)
    logger.debug("approximate: %d pontos de amostra, espaçamento %.6g", sample.count, spacing)
    return BodyApprox(dim=poly.dim, sample=sample, source=poly)


def _coordinate_step(points: np.ndarray) -> float:
    steps = []
    for axis in range(points.shape[1]):
        gaps = np.diff(np.unique(points[:, axis]))
        gaps = gaps[gaps > 1e-12]
        if gaps.size:
            steps.append(gaps.min())
    return float(min(steps)) if steps else 1.0


def from_points(points, spacing: Optional[float] = None) -> BodyApprox:
    """Conjunto finito colocado numa grade; cada ponto vai para o nó mais próximo."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if spacing is None:
        spacing = _coordinate_step(points)
    if spacing <= 0:
        raise NonpositiveScale("Espaçamento da grade deve ser positivo.")
    origin = points.min(axis=0)
    index = np.rint((points - origin) / spacing).astype(int)
    moved = float(np.max(np.abs(origin + spacing * index - points)))
    if moved > 1e-9 * spacing:
        logger.warning("from_points: pontos deslocados até %.3g para caber na grade", moved)
    mask = np.zeros(tuple(index.max(axis=0) + 1), dtype=bool)
    mask[tuple(index.T)] = True
    return BodyApprox(
        dim=int(points.shape[1]),
        sample=LatticeSample(origin=origin, spacing=spacing, mask=mask),
    )


# ---------------------------------------------------------------------------
# Medidas
# ---------------------------------------------------------------------------


def _convex_volume(vertices: np.ndarray) -> float:
    if vertices.shape[1] == 1:
        return float(np.ptp(vertices[:, 0]))
    if len(vertices) <= vertices.shape[1] or affine_rank(vertices) < vertices.shape[1]:
        return 0.0
    return polytope_volume(quickhull(PointCloud(vertices)))


def body_volume(body: BodyApprox) -> float:
    if body.kind == CONVEX:
        return _convex_volume(body.vertices)
    return body.sample.volume


def body_beta(body: BodyApprox, volume: Optional[float] = None) -> float:
    """beta do corpo; para amostras a bola mínima é a dos pontos amostrados."""
    volume = body_volume(body) if volume is None else volume
    if volume <= 0:
        raise DegenerateInput("beta indefinido para volume nulo.")
    ball = min_enclosing_ball(PointCloud(extreme_points(body.points)))
    return n_ball_volume(body.dim, ball.radius) / volume


def hausdorff_distance(first: np.ndarray, second: np.ndarray) -> float:
    """Distância de Hausdorff entre dois conjuntos finitos, nas duas direções."""
    first = np.atleast_2d(np.asarray(first, dtype=float))
    second = np.atleast_2d(np.asarray(second, dtype=float))
    forward = cKDTree(second).query(first)[0].max()
    backward = cKDTree(first).query(second)[0].max()
    return float(max(forward, backward))


# ---------------------------------------------------------------------------
# Operações de Minkowski
# ---------------------------------------------------------------------------


def _resample(sample: LatticeSample, spacing: float) -> LatticeSample:
    """Reamostra na grade de espaçamento `spacing` pelo vizinho mais próximo."""
    if abs(spacing - sample.spacing) <= 1e-12 * spacing:
        return sample
    shape = np.array(sample.mask.shape)
    lower = sample.origin - 0.5 * sample.spacing
    upper = sample.origin + (shape - 0.5) * sample.spacing

    def membership(nodes):
        index = np.rint((nodes - sample.origin) / sample.spacing).astype(int)
        valid = np.all((index >= 0) & (index < shape), axis=1)
        found = np.zeros(len(nodes), dtype=bool)
        found[valid] = sample.mask[tuple(index[valid].T)]
        return found

    return sample_region(lower, upper, spacing, membership)


def _as_sample(body: BodyApprox, spacing: float) -> LatticeSample:
    if body.source is not None:
        if abs(spacing - body.sample.spacing) <= 1e-12 * spacing:
            return body.sample
        return sample_body(body.source, spacing)
    if body.kind == SAMPLED:
        return _resample(body.sample, spacing)
    if _convex_volume(body.vertices) <= 0:
        raise DegenerateInput("Soma mista com corpo convexo degenerado não é suportada.")
    return sample_hull(quickhull(PointCloud(body.vertices)), spacing)


def _lattice_sum(first: LatticeSample, second: LatticeSample) -> LatticeSample:
    mask = fftconvolve(first.mask.astype(float), second.mask.astype(float)) > 0.5
    return LatticeSample(
        origin=first.origin + second.origin, spacing=first.spacing, mask=mask
    )


def _decimate(sample: LatticeSample, max_points: int) -> LatticeSample:
    if sample.mask.size <= max_points:
        return sample
    stride = int(math.ceil((sample.mask.size / max_points) ** (1.0 / sample.dim)))
    view = sample.mask[(slice(None, None, stride),) * sample.dim]
    logger.debug("decimate: passo %d, %d -> %d nós", stride, sample.mask.size, view.size)
    return LatticeSample(origin=sample.origin, spacing=sample.spacing * stride, mask=view)


def minkowski_sum(
    first: BodyApprox, second: BodyApprox, max_points: int = MAX_SAMPLE_POINTS
) -> BodyApprox:
    """
    A ⊕ B. Dois convexos: fecho das somas de vértices. Caso contrário as
    amostras vão para o menor espaçamento e são somadas por convolução.
    """
    if first.dim != second.dim:
        raise DimensionMismatch(f"Soma entre R^{first.dim} e R^{second.dim}.")
    if first.kind == CONVEX and second.kind == CONVEX:
        sums = first.vertices[:, None, :] + second.vertices[None, :, :]
        return convex_body(sums.reshape(-1, first.dim))

    spacing = min(
        body.sample.spacing for body in (first, second) if body.kind == SAMPLED
    )
    total = _lattice_sum(_as_sample(first, spacing), _as_sample(second, spacing))
    return BodyApprox(dim=first.dim, sample=_decimate(total, max_points))


def _scale_polytope(poly: Polytope, factor: float) -> Polytope:
    vertices = poly.vertices * factor
    boundary = SimplicialBoundary(vertices, poly.boundary.faces, poly.dim)
    return Polytope(vertices=vertices, boundary=boundary, dim=poly.dim, facets=poly.facets)


def scale_body(body: BodyApprox, factor: float) -> BodyApprox:
    if not np.isfinite(factor) or factor <= 0:
        raise NonpositiveScale(f"Fator de escala deve ser positivo (recebido {factor}).")
    if factor == 1:
        return body
    if body.kind == CONVEX:
        return BodyApprox(dim=body.dim, vertices=body.vertices * factor)
    sample = LatticeSample(
        origin=body.sample.origin * factor,
        spacing=body.sample.spacing * factor,
        mask=body.sample.mask,
    )
    source = _scale_polytope(body.source, factor) if body.source is not None else None
    return BodyApprox(dim=body.dim, sample=sample, source=source)


def _base_for_average(body: BodyApprox, k: int, max_points: int) -> LatticeSample:
    """Amostra de A grossa o bastante para que a soma k vezes caiba em `max_points`."""
    sample = body.sample
    candidate = sample
    factor = 1
    while (
        np.prod([k * (size - 1) + 1 for size in candidate.mask.shape]) > max_points
        and candidate.mask.size > 1
    ):
        factor += 1
        spacing = sample.spacing * factor
        if body.source is not None:
            candidate = sample_body(body.source, spacing)
        else:
            candidate = _resample(sample, spacing)
    return candidate


def _average_sample(
    body: BodyApprox, k: int, max_points: int
) -> Tuple[LatticeSample, LatticeSample]:
    base = _base_for_average(body, k, max_points)
    total = base
    for _ in range(k - 1):
        total = _lattice_sum(total, base)
    average = LatticeSample(
        origin=total.origin / k, spacing=total.spacing / k, mask=total.mask
    )
    return base, average


def minkowski_average(
    body: BodyApprox, k: int, max_points: int = MAX_SAMPLE_POINTS
) -> BodyApprox:
    """A(k) = (1/k)(A ⊕ ... ⊕ A), k parcelas."""
    if k < 1:
        raise ParamOutOfRange("A(k) exige k >= 1.")
    if k == 1:
        return body
    if body.kind == CONVEX:
        total = body
        for _ in range(k - 1):
            total = minkowski_sum(total, body)
        return scale_body(total, 1.0 / k)
    _, average = _average_sample(body, k, max_points)
    logger.debug("minkowski_average: k=%d, %d pontos", k, average.count)
    return BodyApprox(dim=body.dim, sample=average)


def _hull_gap(average: LatticeSample, hull_points: np.ndarray, max_points: int) -> float:
    """
    sup sobre o fecho da distância até A(k), por transformada de distância
    numa grade duas vezes mais fina que a de A(k). A(k) está contido no
    fecho, então a outra direção é nula.
    """
    refine = 2 if average.mask.size * 2**average.dim <= 4 * max_points else 1
    shape = tuple(refine * (size - 1) + 1 for size in average.mask.shape)
    fine = np.zeros(shape, dtype=bool)
    fine[(slice(None, None, refine),) * average.dim] = average.mask
    spacing = average.spacing / refine

    distance = distance_transform_edt(~fine) * spacing
    frame = LatticeSample(origin=average.origin, spacing=spacing, mask=np.ones(shape, dtype=bool))
    inside = hull_membership(extreme_points(hull_points), frame.lattice_points())
    if not inside.any():
        return 0.0
    return float(distance.reshape(-1)[inside].max())


def volume_ratio_general_bound(k_h: int, C2: float) -> float:
    """
    Cota fechada de Vol(A(k_h)) / Vol(A):
    2 C2^(k-1) / k + C2 (C2^(k-2) - 1) / (k (C2 - 1)); em C2 = 1 vale o limite 1.
    """
    if int(k_h) != k_h or k_h < 2:
        raise ParamOutOfRange(f"k_h deve ser natural >= 2 (recebido {k_h}).")
    if not np.isfinite(C2) or C2 < 1:
        raise ParamOutOfRange(f"C2 deve ser >= 1 (recebido {C2}).")
    k = int(k_h)
    if C2 == 1:
        geometric = float(k - 2)
    else:
        geometric = math.expm1((k - 2) * math.log(C2)) / (C2 - 1)
    return 2 * C2 ** (k - 1) / k + C2 * geometric / k


def convexification_gap(
    body: BodyApprox,
    k_max: int,
    C1: float = 1.0,
    max_points: int = MAX_SAMPLE_POINTS,
) -> List[ConvexificationTrace]:
    """
    Percorre k = 1..k_max registrando Vol(A(k)), a distância de Hausdorff de
    A(k) ao fecho de A e a cota C2 com C2 = C1 · max_k beta(A(k)).
    """
    if k_max < 1:
        raise ParamOutOfRange("k_max deve ser >= 1.")
    steps = []
    for k in range(1, k_max + 1):
        if body.kind == CONVEX:
            average = minkowski_average(body, k, max_points)
            gap = hausdorff_distance(average.vertices, body.vertices)
            volume = body_volume(average)
            beta = body_beta(average, volume)
        else:
            base, sample = _average_sample(body, k, max_points)
            gap = _hull_gap(sample, base.points, max_points)
            volume = sample.volume
            beta = body_beta(BodyApprox(dim=body.dim, sample=sample), volume)
        logger.debug("convexification: k=%d vol=%.6g gap=%.6g beta=%.6g", k, volume, gap, beta)
        steps.append((k, volume, gap, beta))

    # beta >= 1 para corpos exatos; amostras podem ficar um pouco abaixo.
    c2_hat = max(C1 * max(step[3] for step in steps), 1.0)
    base_volume = steps[0][1]
    return [
        ConvexificationTrace(
            k=k,
            vol_Ak=volume,
            hausdorff_to_hull=gap,
            bound_value=(volume_ratio_general_bound(k, c2_hat) if k > 1 else 1.0) * base_volume,
            beta_Ak=beta,
        )
        for k, volume, gap, beta in steps
    ]


def finite_convexification_k(
    traces: Sequence[ConvexificationTrace], diameter: float, eta: float = CONVERGENCE_ETA
) -> Optional[int]:
    """Primeiro k com distância ao fecho <= eta · diâmetro, ou None."""
    for trace in traces:
        if trace.hausdorff_to_hull <= eta * diameter:
            return trace.k
    return None


def general_ratio_bound_from_trace(
    traces: Sequence[ConvexificationTrace], C1: float = 1.0, k_h: Optional[int] = None
) -> Tuple[float, float]:
    k_h = traces[-1].k if k_h is None else k_h
    used = [trace.beta_Ak for trace in traces if trace.k <= k_h]
    c2_hat = max(C1 * max(used), 1.0)
    return c2_hat, volume_ratio_general_bound(k_h, c2_hat)


def _hull_ratio(body: BodyApprox) -> float:
    if body.kind == CONVEX:
        if body_volume(body) <= 0:
            raise DegenerateInput("Razão de volumes indefinida para volume nulo.")
        return 1.0
    if body.source is not None:
        return volume_ratio_poly(body.source)
    # contagem na grade: nós do fecho da amostra sobre nós da amostra
    nodes = body.sample.lattice_points()
    in_hull = hull_membership(extreme_points(body.sample.points), nodes)
    return float(in_hull.sum()) / body.sample.count


def empirical_general_ratio(
    body: BodyApprox,
    k_h: int,
    C1: float = 1.0,
    eta: float = CONVERGENCE_ETA,
    max_points: int = MAX_SAMPLE_POINTS,
    traces: Optional[Sequence[ConvexificationTrace]] = None,
) -> GeneralRatioReport:
    """
    Vol(fecho(A)) / Vol(A) comparado com a cota geral em k_h, usando
    C2 estimado no traço de convexificação.
    """
    if k_h < 2:
        raise ParamOutOfRange("k_h deve ser >= 2.")
    ratio = _hull_ratio(body)
    if traces is None:
        traces = convexification_gap(body, k_h, C1, max_points)
    c2_hat, bound = general_ratio_bound_from_trace(traces, C1, k_h)
    converged = finite_convexification_k(traces, _diameter(body.points), eta)
    return GeneralRatioReport(
        ratio=ratio,
        bound=bound,
        c2_hat=c2_hat,
        k_h=int(k_h),
        holds=bool(ratio <= bound * (1 + tau_vol())),
        converged_k=converged,
    )


def check_reverse_bm(
    first: BodyApprox,
    second: BodyApprox,
    s: float,
    t: float,
    m: int,
    max_points: int = MAX_SAMPLE_POINTS,
) -> RevBMReport:
    """
    Lado esquerdo Vol(sA ⊕ tB)^(1/m) contra s (beta_A Vol A)^(1/m) + t (beta_B Vol B)^(1/m),
    com as aplicações lineares fixadas na identidade.
    """
    if first.dim != second.dim:
        raise DimensionMismatch(f"Corpos em R^{first.dim} e R^{second.dim}.")
    if int(m) != m or m < 1:
        raise ParamOutOfRange(f"m deve ser natural >= 1 (recebido {m}).")
    volume_a, volume_b = body_volume(first), body_volume(second)
    if volume_a <= 0 or volume_b <= 0:
        raise DegenerateInput("Corpo com volume nulo no teste de Brunn-Minkowski reverso.")
    beta_a, beta_b = body_beta(first, volume_a), body_beta(second, volume_b)

    total = minkowski_sum(scale_body(first, s), scale_body(second, t), max_points)
    lhs = body_volume(total) ** (1.0 / m)
    terms = (
        s * (beta_a * volume_a) ** (1.0 / m),
        t * (beta_b * volume_b) ** (1.0 / m),
    )
    return RevBMReport(
        lhs_vol=lhs,
        rhs_terms=terms,
        empirical_C1=lhs / sum(terms),
        s=float(s),
        t=float(t),
        m=int(m),
        beta_A=beta_a,
        beta_B=beta_b,
    )


def forward_bm_gap(first: BodyApprox, second: BodyApprox, max_points: int = MAX_SAMPLE_POINTS) -> float:
    """Vol(A ⊕ B)^(1/n) - Vol(A)^(1/n) - Vol(B)^(1/n); >= 0 pela desigualdade clássica."""
    n = first.dim
    total = body_volume(minkowski_sum(first, second, max_points))
    return total ** (1 / n) - body_volume(first) ** (1 / n) - body_volume(second) ** (1 / n)
