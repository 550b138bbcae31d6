import logging
from typing import Iterable, List, Optional, Union

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.spatial.distance import cdist

from apps.geometry.types import PointCloud, Polytope
from apps.geometry.utils import (
    facet_inequalities,
    is_convex,
    n_ball_volume,
    polytope_volume,
    quickhull,
    sample_body,
    sample_point_hull,
    sphere_polytope,
    tau_geom,
    tau_vol,
    volume_ratio_poly,
)
from apps.minkowski.utils import (
    approximate,
    body_volume,
    convex_body,
    empirical_general_ratio,
    minkowski_sum,
)
from shared.exceptions import (
    HullmetryError,
    ParamOutOfRange,
    PreconditionFailed,
    TooLarge,
)

from .types import CoveringReport, HullCoverRecord, VolumeBounds

logger = logging.getLogger(__name__)

EXACT_COVER_LIMIT = 24
POLY = "poly"
GENERAL = "general"


def _check_epsilon(epsilon: float):
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ParamOutOfRange(f"epsilon deve ser positivo (recebido {epsilon}).")


def _within(distance, epsilon: float):
    # bolas fechadas
    return distance <= epsilon * (1 + tau_geom())


def _farthest_point_centers(cloud: PointCloud, epsilon: float) -> List[int]:
    points = cloud.points
    nearest = np.full(cloud.size, np.inf)
    centers: List[int] = []
    candidate = 0
    while True:
        centers.append(candidate)
        reach = cdist(points[candidate : candidate + 1], points, metric=cloud.metric)[0]
        nearest = np.minimum(nearest, reach)
        # argmax devolve o menor índice entre os empatados
        candidate = int(np.argmax(nearest))
        if _within(nearest[candidate], epsilon):
            return centers


def greedy_radii(cloud: PointCloud) -> np.ndarray:
    """
    Raio de cobertura após k centros da travessia pelo ponto mais distante
    (entrada k-1). A travessia não depende de epsilon, então N_guloso(eps) é o
    primeiro k cujo raio cabe em eps.
    """
    points = cloud.points
    nearest = np.full(cloud.size, np.inf)
    radii = np.empty(cloud.size)
    candidate = 0
    for step in range(cloud.size):
        reach = cdist(points[candidate : candidate + 1], points, metric=cloud.metric)[0]
        nearest = np.minimum(nearest, reach)
        candidate = int(np.argmax(nearest))
        radii[step] = nearest[candidate]
    return radii


def greedy_count(radii: np.ndarray, epsilon: float) -> int:
    return int(np.argmax(_within(radii, epsilon))) + 1


def packing_number(cloud: PointCloud, epsilon: float) -> int:
    """
    Tamanho de um subconjunto epsilon-separado maximal (distâncias > epsilon),
    montado gulosamente na ordem dos índices.
    """
    _check_epsilon(epsilon)
    points = cloud.points
    chosen = [0]
    for index in range(1, cloud.size):
        gaps = cdist(points[index : index + 1], points[chosen], metric=cloud.metric)[0]
        if np.all(gaps > epsilon * (1 + tau_geom())):
            chosen.append(index)
    return len(chosen)


def greedy_cover(cloud: PointCloud, epsilon: float) -> CoveringReport:
    """Cobertura gulosa pelo ponto mais distante; centros restritos à nuvem."""
    _check_epsilon(epsilon)
    centers = _farthest_point_centers(cloud, epsilon)
    return CoveringReport(
        epsilon=float(epsilon),
        n_greedy=len(centers),
        n_packing=packing_number(cloud, 2 * epsilon),
        centers=cloud.points[centers],
        methods=("greedy", "packing"),
    )


def exact_cover_small(cloud: PointCloud, epsilon: float, limit: int = EXACT_COVER_LIMIT) -> int:
    """Cobertura mínima por bolas fechadas centradas na nuvem, via programação inteira."""
    _check_epsilon(epsilon)
    if cloud.size > limit:
        raise TooLarge(f"Cobertura exata limitada a {limit} pontos (recebido {cloud.size}).")
    if cloud.size == 1:
        return 1
    reach = _within(cloud.distances(), epsilon).astype(float)
    result = milp(
        c=np.ones(cloud.size),
        constraints=LinearConstraint(reach, lb=np.ones(cloud.size), ub=np.inf),
        integrality=np.ones(cloud.size),
        bounds=Bounds(0, 1),
    )
    if not result.success:
        raise HullmetryError(f"Programa inteiro da cobertura exata falhou: {result.message}")
    return int(round(result.fun))


def covering_report(
    cloud: PointCloud, epsilon: float, exact_limit: int = EXACT_COVER_LIMIT
) -> CoveringReport:
    report = greedy_cover(cloud, epsilon)
    if cloud.size > exact_limit:
        return report
    return CoveringReport(
        epsilon=report.epsilon,
        n_greedy=report.n_greedy,
        n_packing=report.n_packing,
        n_exact=exact_cover_small(cloud, epsilon, exact_limit),
        centers=report.centers,
        methods=report.methods + ("exact",),
    )


def covering_curve(
    cloud: PointCloud, epsilons: Iterable[float], exact_limit: int = EXACT_COVER_LIMIT
) -> List[CoveringReport]:
    return [covering_report(cloud, eps, exact_limit) for eps in sorted(epsilons)]


def inradius(poly: Polytope):
    """Centro de Chebyshev do fecho: maior bola contida, por programação linear."""
    hull = quickhull(poly.cloud)
    normals, offsets = facet_inequalities(hull)
    dim = poly.dim
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    result = linprog(
        cost,
        A_ub=np.column_stack([normals, np.ones(len(normals))]),
        b_ub=-offsets,
        bounds=[(None, None)] * dim + [(0, None)],
    )
    if not result.success:
        raise HullmetryError(f"Programa linear do centro de Chebyshev falhou: {result.message}")
    return float(result.x[-1]), result.x[:-1]


def volume_cover_bounds(
    poly: Polytope,
    epsilon: float,
    require_upper: bool = False,
    with_middle: bool = False,
    ball_vertices: int = 256,
) -> VolumeBounds:
    """
    (1/eps)^n Vol(A)/Vol(B) <= N(A, eps) <= (3/eps)^n Vol(A)/Vol(B), com B a bola
    unitária. A cota superior exige A convexo e eps·B contido em A.
    """
    _check_epsilon(epsilon)
    n = poly.dim
    ratio = polytope_volume(poly) / n_ball_volume(n)
    lower = (1 / epsilon) ** n * ratio

    radius = 0.0
    upper = None
    convex = is_convex(poly)
    if convex:
        radius, _ = inradius(poly)
        if radius >= epsilon * (1 - tau_vol()):
            upper = (3 / epsilon) ** n * ratio
    if upper is None:
        reason = "corpo não convexo" if not convex else f"inraio {radius:.6g} < epsilon"
        if require_upper:
            raise PreconditionFailed(f"Cota superior indisponível: {reason}.")
        logger.warning("volume_cover_bounds: só a cota inferior (%s)", reason)

    middle = None
    if with_middle and convex:
        ball = sphere_polytope(n, ball_vertices, radius=epsilon / 2)
        total = minkowski_sum(convex_body(poly.vertices), convex_body(ball.vertices))
        middle = body_volume(total) / polytope_volume(ball)
    return VolumeBounds(lower=lower, upper=upper, middle=middle, inradius=radius)


def _lower_count(points: np.ndarray, epsilon: float, exact_limit: int):
    cloud = PointCloud(points)
    if cloud.size <= exact_limit:
        return exact_cover_small(cloud, epsilon, exact_limit), "exact"
    return packing_number(cloud, 2 * epsilon), "packing"


def check_hull_cover_ratio(
    T: Union[Polytope, PointCloud],
    epsilon: float,
    mode: str = POLY,
    R: Optional[float] = None,
    exact_limit: int = EXACT_COVER_LIMIT,
    k_h: int = 4,
    C1: float = 1.0,
) -> HullCoverRecord:
    """
    Certifica N(T_h, eps) <= R · 3^n · N(T, eps).

    O lado do fecho usa a cobertura gulosa de uma amostra de T_h com
    resolução eps/4 (cota superior); o lado de T usa a cobertura exata
    quando a amostra é pequena e, fora disso, o empacotamento 2-eps-separado
    (cota inferior). A desigualdade verificada é, portanto, mais forte.
    """
    _check_epsilon(epsilon)
    if mode not in (POLY, GENERAL):
        raise ParamOutOfRange(f"Modo desconhecido: {mode}.")
    spacing = epsilon / 4

    if isinstance(T, Polytope):
        dim = T.dim
        hull_points = sample_point_hull(T.vertices, spacing)
        body_points = sample_body(T, spacing).points
        # a amostra está contida em T, então seu empacotamento ainda é cota inferior
        n_T, method = packing_number(PointCloud(body_points), 2 * epsilon), "packing"
        if R is None:
            R = hull_volume_ratio(T, mode, k_h, C1)
    else:
        if R is None:
            raise PreconditionFailed(
                "Nuvem finita tem volume nulo: informe R explicitamente."
            )
        dim = T.dim
        hull_points = sample_point_hull(T.points, spacing)
        body_points = T.points
        n_T, method = _lower_count(body_points, epsilon, exact_limit)

    n_hull = len(_farthest_point_centers(PointCloud(hull_points), epsilon))
    n_T_greedy = len(_farthest_point_centers(PointCloud(body_points), epsilon))
    bound = R * 3**dim * n_T
    slack = bound - n_hull
    logger.debug(
        "hull_cover[%s] eps=%.4g: N(T_h)=%d, N(T)=%d (%s), R=%.6g",
        mode,
        epsilon,
        n_hull,
        n_T,
        method,
        R,
    )
    return HullCoverRecord(
        mode=mode,
        epsilon=float(epsilon),
        dim=dim,
        R=float(R),
        n_hull=n_hull,
        n_T=n_T,
        n_T_method=method,
        n_T_greedy=n_T_greedy,
        bound=float(bound),
        slack=float(slack),
        holds=bool(slack >= -tau_vol()),
    )


def hull_volume_ratio(T: Polytope, mode: str = POLY, k_h: int = 4, C1: float = 1.0) -> float:
    """R = Vol(T_h)/Vol(T) (poly) ou a cota da convexificação (general)."""
    if mode == POLY:
        return volume_ratio_poly(T)
    return empirical_general_ratio(approximate(T), k_h, C1).bound
