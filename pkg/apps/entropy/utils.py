import logging
import math
import warnings
from typing import List, Optional, Tuple

from scipy.integrate import IntegrationWarning, quad

from shared.exceptions import ParamOutOfRange, Unsupported

from .types import (
    CONSTANT,
    LOG3_OVER_LOGLOG,
    LOGLOG,
    LOGSQ,
    PLAIN,
    EntropyProfile,
    IntegrabilityVerdict,
    LExistenceReport,
    QuadratureStep,
    RatioFunction,
)

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-4
MAX_REFINEMENTS = 40
DIVERGENCE_RUN = 6
# incrementos que não encolhem abaixo desta razão indicam crescimento sem limite
GROWTH_RATIO = 0.9
ANALYTIC_TOLERANCE = 1e-6


def _is_two(chi: float) -> bool:
    return math.isclose(chi, 2.0, rel_tol=0.0, abs_tol=1e-12)


def hull_profile(profile: EntropyProfile) -> EntropyProfile:
    """Perfil de entropia do fecho convexo nos três regimes conhecidos."""
    if profile.form != PLAIN:
        raise Unsupported("hull_profile só aceita perfis na forma plain.")
    if profile.chi > 2 and not _is_two(profile.chi):
        return profile
    if profile.psi > -2:
        return EntropyProfile(chi=2.0, psi=profile.psi + 2)
    if math.isclose(profile.psi, -3.0, abs_tol=1e-12):
        return EntropyProfile(chi=2.0, psi=2 + profile.psi, form=LOGLOG)
    raise Unsupported(f"Regime (chi=2, psi={profile.psi}) sem estimativa conhecida para o fecho.")


def ratio_bound(profile: EntropyProfile, constant: float = 1.0) -> RatioFunction:
    hull = hull_profile(profile)
    if hull is profile:
        return RatioFunction(kind=CONSTANT, constant=constant)
    if hull.form == LOGLOG:
        return RatioFunction(kind=LOG3_OVER_LOGLOG, constant=constant)
    return RatioFunction(kind=LOGSQ, constant=constant)


def analytic_integral(ratio: RatioFunction, delta: float) -> float:
    """∫_0^Δ f em forma fechada; para |log eps|^2 usa x(ln²x − 2 ln x + 2)."""
    if ratio.kind == CONSTANT:
        return ratio.constant * delta
    if ratio.kind == LOGSQ:
        log_delta = math.log(delta)
        return ratio.constant * delta * (log_delta**2 - 2 * log_delta + 2)
    raise Unsupported(f"Sem forma fechada para {ratio.kind}.")


def _quad(ratio: RatioFunction, lower: float, upper: float, points=()) -> float:
    inside = [point for point in points if lower < point < upper] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(ratio, lower, upper, points=inside, limit=200)
    return value


def _diverging(increments: List[float]) -> bool:
    if len(increments) < DIVERGENCE_RUN:
        return False
    recent = increments[-DIVERGENCE_RUN:]
    return all(step > 0 for step in recent) and all(
        later >= GROWTH_RATIO * earlier for earlier, later in zip(recent, recent[1:])
    )


def _scan_singularity(
    ratio: RatioFunction, point: float, delta: float, max_refinements: int
) -> Tuple[bool, List[QuadratureStep]]:
    """
    Integra em janelas simétricas que encolhem pela metade em torno de `point`.
    Devolve (diverge, histórico).
    """
    right_room = delta - point
    window = 0.5 * (min(point, right_room) if right_room > 0 else point)
    total, increments, trace = 0.0, [], []
    for _ in range(max_refinements):
        inner = window / 2
        step = _quad(ratio, point - window, point - inner)
        if right_room > 0:
            step += _quad(ratio, point + inner, point + window)
        total += step
        increments.append(step)
        trace.append(QuadratureStep(eta=inner, value=total))
        if not math.isfinite(total) or _diverging(increments):
            return True, trace
        if abs(step) <= RELATIVE_TOLERANCE * abs(total) and len(increments) > 1:
            if abs(increments[-2]) <= RELATIVE_TOLERANCE * abs(total):
                return False, trace
        window = inner
    return False, trace


def integral_exists(
    ratio: RatioFunction,
    delta: float,
    rtol: float = RELATIVE_TOLERANCE,
    max_refinements: int = MAX_REFINEMENTS,
) -> IntegrabilityVerdict:
    """
    Decide se ∫_0^Δ f(eps) d eps existe.

    Singularidades interiores são sondadas primeiro por janelas simétricas.
    Depois o extremo inferior η desce pela metade a cada passo: há convergência
    quando dois incrementos seguidos ficam abaixo de `rtol` relativo, e
    divergência quando DIVERGENCE_RUN incrementos positivos não encolhem.
    """
    if not (math.isfinite(delta) and delta > 0):
        raise ParamOutOfRange(f"Δ deve ser positivo e finito (recebido {delta}).")

    singular = ratio.singular_points(delta)
    for point in singular:
        diverges, trace = _scan_singularity(ratio, point, delta, max_refinements)
        if diverges:
            logger.debug("integral_exists: singularidade não integrável em eps=%.6g", point)
            return IntegrabilityVerdict(
                converges=False,
                value=None,
                reason=f"singularidade interior em eps*={point:.6g}",
                singularity=point,
                trace=tuple(trace),
            )

    eta = (min(singular) if singular else delta) / 2
    value = _quad(ratio, eta, delta, points=singular)
    increments: List[float] = []
    trace = [QuadratureStep(eta=eta, value=value)]
    for _ in range(max_refinements):
        step = _quad(ratio, eta / 2, eta)
        eta /= 2
        value += step
        increments.append(step)
        trace.append(QuadratureStep(eta=eta, value=value))
        if not math.isfinite(value) or _diverging(increments):
            return IntegrabilityVerdict(
                converges=False,
                value=None,
                reason="crescimento sem limite no extremo eps -> 0",
                trace=tuple(trace),
            )
        settled = [abs(inc) <= rtol * abs(value) for inc in increments[-2:]]
        if len(settled) == 2 and all(settled):
            return _converged(ratio, delta, singular, tuple(trace))
    return IntegrabilityVerdict(
        converges=None,
        value=None,
        reason=f"sem decisão após {max_refinements} refinamentos",
        trace=tuple(trace),
    )


def _converged(ratio, delta, singular, trace) -> IntegrabilityVerdict:
    value = _quad(ratio, 0.0, delta, points=singular)
    analytic: Optional[float] = None
    if ratio.kind in (CONSTANT, LOGSQ):
        analytic = analytic_integral(ratio, delta)
        if not math.isclose(value, analytic, rel_tol=ANALYTIC_TOLERANCE):
            logger.warning(
                "integral_exists: quadratura %.10g difere da forma fechada %.10g", value, analytic
            )
    return IntegrabilityVerdict(
        converges=True,
        value=value,
        reason="converge",
        analytic=analytic,
        trace=trace,
    )


def l_existence_report(
    profile: EntropyProfile,
    delta: float,
    constant: float = 1.0,
    max_refinements: int = MAX_REFINEMENTS,
) -> LExistenceReport:
    hull = hull_profile(profile)
    ratio = ratio_bound(profile, constant)
    return LExistenceReport(
        profile=profile,
        hull_profile=hull,
        ratio=ratio,
        delta=float(delta),
        verdict=integral_exists(ratio, delta, max_refinements=max_refinements),
    )
