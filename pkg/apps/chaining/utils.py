import heapq
import itertools
import logging
import math
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from apps.covering.utils import GENERAL, POLY, greedy_count, greedy_radii, hull_volume_ratio
from apps.geometry.types import PointCloud, Polytope
from apps.geometry.utils import sample_body, sample_point_hull, tau_vol
from shared.exceptions import DegenerateInput, ParamOutOfRange, PreconditionFailed, TooLarge

from .types import (
    ENTROPY_INTEGRAL,
    EXACT,
    GREEDY,
    AdmissibleSequence,
    GammaCurvePoint,
    GammaEstimate,
    GammaRatioReport,
    MajorizingMeasureRecord,
    Partition,
    SupEstimate,
)

logger = logging.getLogger(__name__)

EXACT_GAMMA_LIMIT = 5
GREEDY_GAMMA_LIMIT = 4096
MC_BLOCK = 1000
MIN_TRIALS = 100
ENTROPY_GRID_RATIO = 2 ** -0.25
HULL_SAMPLE_STEPS = 24
DIAMETER_BLOCK = 512


def partition_limit(m: int) -> int:
    """N_0 = 1 e N_m = 2^(2^m)."""
    return 1 if m == 0 else 2 ** (2**m)


def _check_alpha(alpha: float):
    if not alpha > 0:
        raise ParamOutOfRange(f"alpha deve ser positivo (recebido {alpha}).")


def _level_weight(m: int, alpha: float) -> float:
    return 2 ** (m / alpha)


def _cell_diameter(points: np.ndarray, metric: str = "euclidean") -> float:
    if len(points) < 2:
        return 0.0
    best = 0.0
    for start in range(0, len(points), DIAMETER_BLOCK):
        block = cdist(points[start : start + DIAMETER_BLOCK], points, metric=metric)
        best = max(best, float(block.max()))
    return best


def is_admissible(sequence: AdmissibleSequence, size: int) -> bool:
    """Encaixe, cobertura disjunta de range(size) e |A_m| <= N_m em todos os níveis."""
    everything = set(range(size))
    previous: Optional[Dict[int, Tuple[int, ...]]] = None
    for m, partition in enumerate(sequence.partitions):
        if len(partition) > partition_limit(m):
            return False
        seen = [index for cell in partition for index in cell]
        if len(seen) != len(everything) or set(seen) != everything:
            return False
        if previous is not None:
            for cell in partition:
                if len({previous[index] for index in cell}) != 1:
                    return False
        previous = {index: cell for cell in partition for index in cell}
    return True


def sequence_value(cloud: PointCloud, sequence: AdmissibleSequence, alpha: float) -> float:
    """sup_t sum_m 2^(m/alpha) Δ(A_m(t)) para uma sequência dada."""
    totals = np.zeros(cloud.size)
    for m, partition in enumerate(sequence.partitions):
        weight = _level_weight(m, alpha)
        for cell in partition:
            totals[list(cell)] += weight * _cell_diameter(cloud.points[list(cell)], cloud.metric)
    return float(totals.max())


# ---------------------------------------------------------------------------
# gamma exato (conjuntos minúsculos)
# ---------------------------------------------------------------------------


def _set_partitions(items: Tuple[int, ...]) -> Iterator[Partition]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for partial in _set_partitions(rest):
        yield ((first,),) + partial
        for position, cell in enumerate(partial):
            yield partial[:position] + ((first,) + cell,) + partial[position + 1 :]


def _refinements(partition: Partition, limit: int) -> Iterator[Partition]:
    pieces = [list(_set_partitions(cell)) for cell in partition]
    for choice in itertools.product(*pieces):
        refined = tuple(sorted((cell for split in choice for cell in split), key=lambda c: c[0]))
        if len(refined) <= limit:
            yield refined


def gamma_exact_small(
    cloud: PointCloud, alpha: float, limit: int = EXACT_GAMMA_LIMIT
) -> GammaEstimate:
    """
    Ínfimo exato sobre todas as cadeias de partições encaixadas admissíveis,
    por busca exaustiva com poda. Viável só para poucos pontos.
    """
    _check_alpha(alpha)
    if cloud.size > limit:
        raise TooLarge(f"gamma exato limitado a {limit} pontos (recebido {cloud.size}).")
    distances = cloud.distances()

    def diameter(cell: Tuple[int, ...]) -> float:
        return float(distances[np.ix_(cell, cell)].max())

    whole: Partition = (tuple(range(cloud.size)),)
    best = {"value": math.inf, "chain": (whole,)}

    def search(chain: Tuple[Partition, ...], totals: np.ndarray):
        current = chain[-1]
        if all(diameter(cell) == 0 for cell in current):
            if totals.max() < best["value"]:
                best["value"], best["chain"] = float(totals.max()), chain
            return
        if totals.max() >= best["value"]:
            return
        m = len(chain)
        limit_m = partition_limit(m)
        if limit_m >= cloud.size:
            candidates: Iterable[Partition] = [tuple((index,) for index in range(cloud.size))]
        else:
            candidates = _refinements(current, limit_m)
        weight = _level_weight(m, alpha)
        for refined in candidates:
            step = np.zeros(cloud.size)
            for cell in refined:
                step[list(cell)] = weight * diameter(cell)
            search(chain + (refined,), totals + step)

    search((whole,), np.full(cloud.size, diameter(whole[0])))
    return GammaEstimate(
        alpha=float(alpha),
        value=best["value"],
        method=EXACT,
        witness=AdmissibleSequence(partitions=best["chain"]),
    )


# ---------------------------------------------------------------------------
# gamma guloso
# ---------------------------------------------------------------------------


def _split(cell: Tuple[int, ...], points: np.ndarray, metric: str):
    members = points[list(cell)]
    anchor = cdist(members[:1], members, metric=metric)[0]
    first = int(np.argmax(anchor))
    reach_first = cdist(members[first : first + 1], members, metric=metric)[0]
    second = int(np.argmax(reach_first))
    reach_second = cdist(members[second : second + 1], members, metric=metric)[0]
    # empates ficam com o primeiro centro
    near_second = reach_second < reach_first
    left = tuple(index for index, flag in zip(cell, near_second) if not flag)
    right = tuple(index for index, flag in zip(cell, near_second) if flag)
    return left, right


def gamma_greedy(
    cloud: PointCloud, alpha: float, limit: int = GREEDY_GAMMA_LIMIT
) -> GammaEstimate:
    """
    Sequência admissível por divisão hierárquica: em cada nível m, a célula de
    maior diâmetro é partida em duas pelos dois pontos mais afastados, até
    N_m células ou até todas terem diâmetro nulo. O valor obtido é cota
    superior de gamma_alpha.
    """
    _check_alpha(alpha)
    if cloud.size > limit:
        raise TooLarge(f"gamma guloso limitado a {limit} pontos (recebido {cloud.size}).")
    points, metric = cloud.points, cloud.metric
    whole = tuple(range(cloud.size))
    cells = {whole: _cell_diameter(points, metric)}
    totals = np.full(cloud.size, cells[whole])
    partitions: List[Partition] = [(whole,)]

    m = 0
    while any(diameter > 0 for diameter in cells.values()):
        m += 1
        heap = [(-diameter, cell[0], cell) for cell, diameter in cells.items() if diameter > 0]
        heapq.heapify(heap)
        while heap and len(cells) < partition_limit(m):
            _, _, cell = heapq.heappop(heap)
            del cells[cell]
            for child in _split(cell, points, metric):
                cells[child] = _cell_diameter(points[list(child)], metric)
                if cells[child] > 0:
                    heapq.heappush(heap, (-cells[child], child[0], child))
        weight = _level_weight(m, alpha)
        for cell, diameter in cells.items():
            totals[list(cell)] += weight * diameter
        partitions.append(tuple(sorted(cells, key=lambda c: c[0])))
        logger.debug("gamma_greedy: nível %d com %d células", m, len(cells))

    return GammaEstimate(
        alpha=float(alpha),
        value=float(totals.max()),
        method=GREEDY,
        witness=AdmissibleSequence(partitions=tuple(partitions)),
    )


# ---------------------------------------------------------------------------
# Integral de entropia
# ---------------------------------------------------------------------------


def entropy_integral(
    cloud: PointCloud, alpha: float, ratio: float = ENTROPY_GRID_RATIO
) -> GammaEstimate:
    """
    ∫_0^diam (log N(T, eps))^(1/alpha) d eps com N da cobertura gulosa, numa
    grade geométrica de razão `ratio` entre o diâmetro e o menor espaçamento.
    Em cada intervalo usa-se o N do extremo menor (soma superior); abaixo do
    menor espaçamento N é o número de pontos distintos.
    """
    _check_alpha(alpha)
    if not 0 < ratio < 1:
        raise ParamOutOfRange(f"Razão da grade deve estar em (0, 1) (recebido {ratio}).")
    distances = cloud.distances()
    positive = distances[distances > 0]
    if positive.size == 0:
        return GammaEstimate(alpha=float(alpha), value=0.0, method=ENTROPY_INTEGRAL)
    diameter, gap = float(positive.max()), float(positive.min())

    grid = [diameter]
    while grid[-1] * ratio > gap:
        grid.append(grid[-1] * ratio)
    if grid[-1] > gap:
        grid.append(gap)

    radii = greedy_radii(cloud)

    def integrand(epsilon: float) -> float:
        count = greedy_count(radii, epsilon)
        return 0.0 if count == 1 else math.log(count) ** (1 / alpha)

    value = gap * integrand(0.0)
    for upper, lower in zip(grid, grid[1:]):
        value += (upper - lower) * integrand(lower)
    return GammaEstimate(alpha=float(alpha), value=value, method=ENTROPY_INTEGRAL)


def dudley_bound(cloud: PointCloud) -> GammaEstimate:
    return entropy_integral(cloud, 2.0)


def gamma_curve(clouds: Iterable[PointCloud], alpha: float = 2.0) -> List[GammaCurvePoint]:
    return [
        GammaCurvePoint(
            size=cloud.size,
            gamma_greedy=gamma_greedy(cloud, alpha).value,
            entropy=entropy_integral(cloud, alpha).value,
        )
        for cloud in clouds
    ]


# ---------------------------------------------------------------------------
# Supremo gaussiano
# ---------------------------------------------------------------------------


def gaussian_sup_mc(
    cloud: PointCloud, trials: int, seed: int = 0, block: int = MC_BLOCK
) -> SupEstimate:
    """
    E sup_t <t, g> por Monte Carlo. O bloco i de `block` tentativas usa a
    semente derivada SeedSequence(seed, spawn_key=(i,)), de modo que o
    resultado só depende de (seed, trials, block).
    """
    if trials < MIN_TRIALS:
        raise ParamOutOfRange(f"São necessárias ao menos {MIN_TRIALS} tentativas (recebido {trials}).")
    if seed < 0:
        raise ParamOutOfRange(f"Semente deve ser não negativa (recebido {seed}).")
    maxima = np.empty(trials)
    for number, start in enumerate(range(0, trials, block)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(number,)))
        size = min(block, trials - start)
        gaussians = rng.standard_normal((size, cloud.dim))
        maxima[start : start + size] = (gaussians @ cloud.points.T).max(axis=1)
    return SupEstimate(
        mean=float(maxima.mean()),
        std_error=float(maxima.std(ddof=1) / math.sqrt(trials)),
        trials=int(trials),
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Certificações
# ---------------------------------------------------------------------------


def l_constant(R: float, n: int, alpha: float) -> float:
    """(log(R·3^n)/log 2 + 1)^(1/alpha), logaritmos naturais."""
    if not (math.isfinite(R) and R >= 1 - tau_vol()):
        raise ParamOutOfRange(f"R deve ser finito e >= 1 (recebido {R}).")
    if n < 1:
        raise ParamOutOfRange(f"Dimensão deve ser >= 1 (recebido {n}).")
    _check_alpha(alpha)
    log_ratio = math.log(max(R, 1.0)) + n * math.log(3)
    return (log_ratio / math.log(2) + 1) ** (1 / alpha)


def _hull_sample(vertices: np.ndarray, spacing: Optional[float], max_points: int) -> Tuple[np.ndarray, float]:
    if spacing is None:
        spacing = PointCloud(vertices).diameter() / HULL_SAMPLE_STEPS
        if spacing == 0:
            return vertices[:1].copy(), 0.0
    sample = sample_point_hull(vertices, spacing)
    while len(sample) > max_points:
        spacing *= math.sqrt(2)
        sample = sample_point_hull(vertices, spacing)
    return sample, spacing


def certify_hull_gamma(
    T: Union[Polytope, PointCloud],
    alpha: float = 2.0,
    mode: str = POLY,
    R: Optional[float] = None,
    spacing: Optional[float] = None,
    k_h: int = 4,
    C1: float = 1.0,
    max_points: int = GREEDY_GAMMA_LIMIT,
) -> GammaRatioReport:
    """
    Certifica gamma_alpha(T_h) <= L · gamma_alpha(T) com L = l_constant(R, n, alpha).

    O lado do fecho usa gamma_greedy numa amostra de T_h. O lado de T usa o
    valor exato quando T tem até EXACT_GAMMA_LIMIT pontos e, fora disso, o
    guloso na amostra de T com o mesmo espaçamento.
    """
    if mode not in (POLY, GENERAL):
        raise ParamOutOfRange(f"Modo desconhecido: {mode}.")
    _check_alpha(alpha)

    if isinstance(T, Polytope):
        if R is None:
            R = hull_volume_ratio(T, mode, k_h, C1)
        hull_points, spacing = _hull_sample(T.vertices, spacing, max_points)
        body = PointCloud(sample_body(T, spacing).points)
    else:
        if R is None:
            raise PreconditionFailed("Nuvem finita tem volume nulo: informe R explicitamente.")
        hull_points, spacing = _hull_sample(T.points, spacing, max_points)
        body = T

    gamma_Th = gamma_greedy(PointCloud(hull_points), alpha, limit=max_points).value
    if body.size <= EXACT_GAMMA_LIMIT:
        estimate = gamma_exact_small(body, alpha)
    else:
        estimate = gamma_greedy(body, alpha, limit=max(max_points, body.size))
    L_bound = l_constant(R, T.dim, alpha)
    slack = L_bound * estimate.value - gamma_Th
    logger.debug(
        "hull_gamma[%s] alpha=%g: gamma(T_h)=%.6g, gamma(T)=%.6g (%s), L=%.6g",
        mode,
        alpha,
        gamma_Th,
        estimate.value,
        estimate.method,
        L_bound,
    )
    return GammaRatioReport(
        mode=mode,
        alpha=float(alpha),
        dim=T.dim,
        R=float(R),
        gamma_T=estimate.value,
        gamma_Th=gamma_Th,
        gamma_T_method=estimate.method,
        L_bound=L_bound,
        slack=float(slack),
        holds=bool(gamma_Th <= L_bound * estimate.value + tau_vol()),
    )


def certify_mm_two_sided(
    cloud: PointCloud, trials: int = 10_000, seed: int = 0
) -> MajorizingMeasureRecord:
    """L̂ = max(gamma_2/E sup, E sup/gamma_2); nuvens de um ponto ficam de fora."""
    if cloud.diameter() == 0:
        raise DegenerateInput("Conjunto de um ponto: gamma_2 e E sup são ambos nulos.")
    gamma2 = gamma_greedy(cloud, 2.0).value
    estimate = gaussian_sup_mc(cloud, trials, seed)
    if estimate.mean <= 0:
        raise PreconditionFailed(
            f"E sup estimado não positivo ({estimate.mean:.3g}); aumente o número de tentativas."
        )
    return MajorizingMeasureRecord(
        gamma2=gamma2,
        esup=estimate.mean,
        std_error=estimate.std_error,
        L_hat=max(gamma2 / estimate.mean, estimate.mean / gamma2),
        trials=estimate.trials,
        seed=estimate.seed,
    )
