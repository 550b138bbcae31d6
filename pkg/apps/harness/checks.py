import logging
import math
import zlib
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from apps.chaining.serializers import (
    GammaRatioReportSerializer,
    MajorizingMeasureRecordSerializer,
    chaining_row,
)
from apps.chaining.utils import (
    certify_hull_gamma,
    certify_mm_two_sided,
    gamma_curve,
    gamma_exact_small,
    gamma_greedy,
    gaussian_sup_mc,
)
from apps.covering.serializers import report_rows
from apps.covering.types import CoveringReport
from apps.covering.utils import (
    POLY,
    check_hull_cover_ratio,
    covering_report,
    exact_cover_small,
    greedy_cover,
    hull_volume_ratio,
    packing_number,
    volume_cover_bounds,
)
from apps.entropy.utils import l_existence_report
from apps.geometry.types import PointCloud, Polytope
from apps.geometry.utils import (
    beta_ratio,
    is_convex,
    sample_body,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from apps.minkowski.serializers import GeneralRatioReportSerializer, trace_rows
from apps.minkowski.utils import (
    approximate,
    check_reverse_bm,
    convexification_gap,
    empirical_general_ratio,
)
from shared.exceptions import DegenerateInput, PreconditionFailed

from .library import load_body
from .types import BODY, CLOUD, PROFILE, CertificationRecord, CheckOutput, Scenario

logger = logging.getLogger(__name__)

C1_CAP = 10.0
L_HAT_CAP = 10.0
DEFAULT_EPSILONS = (0.2, 0.4, 0.8)
GAMMA_SMALL_TOLERANCE = 1e-12
# frações de eps consumidas pela meia-diagonal da célula, da amostra mais fina à mais grossa
COARSE_REACH_FRACTIONS = (0.25, 0.5, 0.75, 0.9)

CLOSED_FORMS = {
    "zero": 0.0,
    "max_of_two": 1 / math.sqrt(math.pi),
    "half_normal": math.sqrt(2 / math.pi),
    "positive_part": 1 / math.sqrt(2 * math.pi),
}


def _plain(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _record(
    scenario: Scenario, check: str, lhs, rhs, options: dict, label: str = "", **constants
) -> CertificationRecord:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    return CertificationRecord(
        scenario=scenario.id,
        check=check,
        holds=bool(slack >= -options["TAU_VOL"]),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        label=label,
        constants={key: _plain(value) for key, value in constants.items()},
    )


def scenario_seed(master: int, scenario_id: str) -> int:
    """Semente derivada de (semente mestre, id do cenário), estável entre execuções."""
    sequence = np.random.SeedSequence([int(master), zlib.crc32(scenario_id.encode("utf-8"))])
    return int(sequence.generate_state(1)[0])


def _epsilons(scenario: Scenario):
    return [float(eps) for eps in scenario.params.get("epsilons", DEFAULT_EPSILONS)]


# ---------------------------------------------------------------------------
# Corpos
# ---------------------------------------------------------------------------


def volume_xcheck(scenario: Scenario, options: dict) -> CheckOutput:
    boundary = scenario.payload.boundary
    by_det, by_projection = volume_det(boundary), volume_projected(boundary)
    scale = max(abs(by_det), 1.0)
    record = _record(
        scenario,
        "volume_xcheck",
        abs(by_det - by_projection),
        options["TAU_VOL"] * scale,
        options,
        volume=by_det,
        volume_det=by_det,
        volume_projected=by_projection,
    )
    return CheckOutput(records=[record])


def ratio_poly(scenario: Scenario, options: dict) -> CheckOutput:
    poly = scenario.payload
    R = volume_ratio_poly(poly)
    record = _record(
        scenario,
        "ratio_poly",
        1.0,
        R,
        options,
        R=R,
        beta=beta_ratio(poly),
        convex=is_convex(poly),
    )
    return CheckOutput(records=[record])


def _approximate(scenario: Scenario, options: dict, points_key: str, poly: Optional[Polytope] = None):
    points = scenario.params.get("points_per_axis", options[points_key])
    return approximate(
        scenario.payload if poly is None else poly,
        points_per_axis=int(points),
        max_points=options["MAX_SAMPLE_POINTS"],
    )


def revbm(scenario: Scenario, options: dict) -> CheckOutput:
    body = _approximate(scenario, options, "GRID_POINTS_PER_AXIS")
    other = scenario.params.get("other")
    # B = A quando o cenário não nomeia um segundo corpo da biblioteca
    second = body
    if other is not None:
        second = _approximate(scenario, options, "GRID_POINTS_PER_AXIS", load_body(other))
    cap = float(scenario.params.get("c1_cap", C1_CAP))
    output = CheckOutput()
    for s in scenario.params.get("s", (0.5, 1, 2)):
        for t in scenario.params.get("t", (0.5, 1, 2)):
            for m in scenario.params.get("m", (1, 2)):
                report = check_reverse_bm(body, second, s, t, m, options["MAX_SAMPLE_POINTS"])
                output.records.append(
                    _record(
                        scenario,
                        "revbm",
                        report.empirical_C1,
                        cap,
                        options,
                        label=f"s={s:g},t={t:g},m={m}",
                        C1=report.empirical_C1,
                        other=other,
                        beta_A=report.beta_A,
                        beta_B=report.beta_B,
                        lhs_vol=report.lhs_vol,
                    )
                )
    return output


def convexify(scenario: Scenario, options: dict) -> CheckOutput:
    body = _approximate(scenario, options, "CONVEXIFY_POINTS_PER_AXIS")
    k_max = int(scenario.params.get("k_max", 8))
    C1 = options["REVBM_C1"]
    traces = convexification_gap(body, k_max, C1, options["MAX_SAMPLE_POINTS"])
    gaps = [trace.hausdorff_to_hull for trace in traces]
    report = empirical_general_ratio(
        body,
        int(scenario.params.get("k_h", k_max)),
        C1,
        options["CONVERGENCE_ETA"],
        options["MAX_SAMPLE_POINTS"],
        traces=traces,
    )
    output = CheckOutput()
    output.records.append(
        _record(
            scenario,
            "convexify",
            gaps[-1],
            gaps[0],
            options,
            label="gap",
            gap_1=gaps[0],
            gap_k=gaps[-1],
            k_max=k_max,
        )
    )
    output.records.append(
        _record(
            scenario,
            "convexify",
            max(trace.vol_Ak / trace.bound_value for trace in traces),
            1.0,
            options,
            label="volume_bound",
            C2=report.c2_hat,
            C1=C1,
        )
    )
    output.records.append(
        _record(
            scenario,
            "convexify",
            report.ratio,
            report.bound,
            options,
            label="general_ratio",
            R=report.ratio,
            C2=report.c2_hat,
            **GeneralRatioReportSerializer(report).data,
        )
    )
    output.plots["gap_vs_k"] = (("k", "gap"), [(trace.k, trace.hausdorff_to_hull) for trace in traces])
    output.plots["vol_vs_k"] = (("k", "vol"), [(trace.k, trace.vol_Ak) for trace in traces])
    output.convexification_rows.extend(dict(row, scenario=scenario.id) for row in trace_rows(traces))
    return output


def _modes(scenario: Scenario):
    if scenario.kind == CLOUD:
        return [POLY]
    return list(scenario.params.get("modes", [POLY]))


def _ratio(scenario: Scenario, mode: str, options: dict) -> float:
    if scenario.kind == CLOUD:
        if "R" not in scenario.params:
            raise PreconditionFailed(f"Cenário {scenario.id}: nuvem finita exige o parâmetro R.")
        return float(scenario.params["R"])
    k_h = int(scenario.params.get("k_h", 4))
    return hull_volume_ratio(scenario.payload, mode, k_h, options["REVBM_C1"])


def cover_ratio(scenario: Scenario, options: dict) -> CheckOutput:
    output = CheckOutput()
    for mode in _modes(scenario):
        R = _ratio(scenario, mode, options)
        series = []
        for eps in _epsilons(scenario):
            record = check_hull_cover_ratio(
                scenario.payload, eps, mode, R=R, exact_limit=options["EXACT_COVER_LIMIT"]
            )
            series.append((eps, record.n_hull))
            output.records.append(
                _record(
                    scenario,
                    "cover_ratio",
                    record.n_hull,
                    record.bound,
                    options,
                    label=f"{mode} eps={eps:g}",
                    R=R,
                    n_hull=record.n_hull,
                    n_T=record.n_T,
                    n_T_method=record.n_T_method,
                    dim=record.dim,
                )
            )
        output.plots[f"n_vs_eps_{mode}"] = (("epsilon", "n_hull"), series)
    return output


def _coarse_sample(poly: Polytope, eps: float, limit: int):
    """Amostra mais fina com no máximo `limit` pontos, e o raio que ainda cobre o corpo."""
    for fraction in COARSE_REACH_FRACTIONS:
        spacing = 2 * eps * fraction / math.sqrt(poly.dim)
        sample = PointCloud(sample_body(poly, spacing).points)
        if 0 < sample.size <= limit:
            return sample, eps * (1 - fraction)
    return None, None


def _exact_chain(scenario: Scenario, poly: Polytope, eps: float, lower: float, options: dict):
    sample, reach = _coarse_sample(poly, eps, options["EXACT_COVER_LIMIT"])
    if sample is None:
        logger.info("cover_sandwich: %s sem amostra pequena para eps=%g", scenario.id, eps)
        return []
    n_exact = exact_cover_small(sample, reach, options["EXACT_COVER_LIMIT"])
    n_greedy = greedy_cover(sample, reach).n_greedy
    constants = dict(vol_lower=lower, n_exact=n_exact, n_greedy=n_greedy, sample_size=sample.size)
    return [
        _record(
            scenario, "cover_sandwich", lower, n_exact, options, label=f"exact_lower eps={eps:g}", **constants
        ),
        _record(
            scenario, "cover_sandwich", n_exact, n_greedy, options, label=f"exact_greedy eps={eps:g}", **constants
        ),
    ]


def _body_sandwich(scenario: Scenario, options: dict) -> CheckOutput:
    poly: Polytope = scenario.payload
    convex = is_convex(poly)
    output = CheckOutput()
    for eps in _epsilons(scenario):
        bounds = volume_cover_bounds(poly, eps)
        spacing = eps / 4
        sample = PointCloud(sample_body(poly, spacing).points)
        # cobrir a amostra com raio eps - h cobre o corpo com raio eps
        reach = eps - spacing * math.sqrt(poly.dim) / 2
        greedy = greedy_cover(sample, reach)
        output.records.append(
            _record(
                scenario,
                "cover_sandwich",
                bounds.lower,
                greedy.n_greedy,
                options,
                label=f"vol_lower eps={eps:g}",
                vol_lower=bounds.lower,
                n_greedy=greedy.n_greedy,
            )
        )
        n_exact = None
        if convex:
            chain = _exact_chain(scenario, poly, eps, bounds.lower, options)
            output.records.extend(chain)
            n_exact = chain[0].constants["n_exact"] if chain else None
        packing = None
        if bounds.upper is not None:
            packing = packing_number(sample, eps)
            output.records.append(
                _record(
                    scenario,
                    "cover_sandwich",
                    packing,
                    bounds.upper,
                    options,
                    label=f"vol_upper eps={eps:g}",
                    vol_upper=bounds.upper,
                    n_packing=packing,
                    inradius=bounds.inradius,
                )
            )
        report = CoveringReport(
            epsilon=eps,
            n_greedy=greedy.n_greedy,
            n_packing=greedy.n_packing,
            n_exact=n_exact,
            vol_lower=bounds.lower,
            vol_upper=bounds.upper,
        )
        output.covering_rows.extend(dict(row, scenario=scenario.id) for row in report_rows([report]))
    return output


def cover_sandwich(scenario: Scenario, options: dict) -> CheckOutput:
    if scenario.kind == BODY:
        return _body_sandwich(scenario, options)
    cloud: PointCloud = scenario.payload
    output = CheckOutput()
    for eps in _epsilons(scenario):
        report = covering_report(cloud, eps, options["EXACT_COVER_LIMIT"])
        middle = report.n_exact if report.n_exact is not None else report.n_greedy
        output.records.append(
            _record(
                scenario,
                "cover_sandwich",
                report.n_packing,
                middle,
                options,
                label=f"packing eps={eps:g}",
                n_packing=report.n_packing,
                n_exact=report.n_exact,
            )
        )
        output.records.append(
            _record(
                scenario,
                "cover_sandwich",
                middle,
                report.n_greedy,
                options,
                label=f"greedy eps={eps:g}",
                n_exact=report.n_exact,
                n_greedy=report.n_greedy,
            )
        )
        output.covering_rows.extend(dict(row, scenario=scenario.id) for row in report_rows([report]))
    return output


# ---------------------------------------------------------------------------
# Chaining
# ---------------------------------------------------------------------------


def gamma_small(scenario: Scenario, options: dict) -> CheckOutput:
    cloud: PointCloud = scenario.payload
    if not 2 <= cloud.size <= 4:
        raise PreconditionFailed(f"gamma_small exige de 2 a 4 pontos (recebido {cloud.size}).")
    diameter = cloud.diameter()
    output = CheckOutput()
    for alpha in scenario.params.get("alphas", (1, 2)):
        exact = gamma_exact_small(cloud, alpha, options["EXACT_GAMMA_LIMIT"]).value
        greedy = gamma_greedy(cloud, alpha, options["GREEDY_GAMMA_LIMIT"]).value
        output.records.append(
            _record(
                scenario,
                "gamma_small",
                abs(exact - diameter) + abs(greedy - exact),
                GAMMA_SMALL_TOLERANCE * max(diameter, 1.0),
                options,
                label=f"alpha={alpha:g}",
                gamma_exact=exact,
                gamma_greedy=greedy,
                diameter=diameter,
            )
        )
    return output


def gamma_hull(scenario: Scenario, options: dict) -> CheckOutput:
    output = CheckOutput()
    for mode in _modes(scenario):
        R = _ratio(scenario, mode, options)
        for alpha in scenario.params.get("alphas", (2,)):
            report = certify_hull_gamma(
                scenario.payload, alpha, mode, R=R, max_points=options["GREEDY_GAMMA_LIMIT"]
            )
            output.records.append(
                _record(
                    scenario,
                    "gamma_hull",
                    report.gamma_Th,
                    report.L_bound * report.gamma_T,
                    options,
                    label=f"{mode} alpha={alpha:g}",
                    **GammaRatioReportSerializer(report).data,
                )
            )
            output.chaining_rows.append(chaining_row(f"{scenario.id}:{mode}", gamma_report=report))
    if scenario.kind == BODY:
        diameter = PointCloud(scenario.payload.vertices).diameter()
        samples = [
            PointCloud(sample_body(scenario.payload, diameter / steps).points) for steps in (6, 12, 24)
        ]
        curve = gamma_curve([sample for sample in samples if sample.size <= options["GREEDY_GAMMA_LIMIT"]])
        output.plots["gamma_vs_size"] = (
            ("size", "gamma"),
            [(point.size, point.gamma_greedy) for point in curve],
        )
    return output


def mm_two_sided(scenario: Scenario, options: dict) -> CheckOutput:
    seed = scenario_seed(options["seed"], scenario.id)
    trials = int(scenario.params.get("trials", 10_000))
    try:
        record = certify_mm_two_sided(scenario.payload, trials, seed)
    except DegenerateInput:
        logger.info("mm_two_sided: cenário %s degenerado, excluído", scenario.id)
        return CheckOutput()
    output = CheckOutput(
        records=[
            _record(
                scenario,
                "mm_two_sided",
                record.L_hat,
                float(scenario.params.get("L_cap", L_HAT_CAP)),
                options,
                **MajorizingMeasureRecordSerializer(record).data,
            )
        ]
    )
    output.chaining_rows.append(chaining_row(scenario.id, mm_record=record))
    return output


def sup_gauss(scenario: Scenario, options: dict) -> CheckOutput:
    expected = scenario.params.get("expected")
    if expected is None:
        raise PreconditionFailed(f"Cenário {scenario.id}: sup_gauss exige o parâmetro expected.")
    value = CLOSED_FORMS[expected] if isinstance(expected, str) else float(expected)
    seed = scenario_seed(options["seed"], scenario.id)
    estimate = gaussian_sup_mc(
        scenario.payload,
        int(scenario.params.get("trials", 100_000)),
        seed,
        block=options["MC_BLOCK"],
    )
    sigmas = float(scenario.params.get("sigmas", 3))
    record = _record(
        scenario,
        "sup_gauss",
        abs(estimate.mean - value),
        sigmas * estimate.std_error,
        options,
        esup=estimate.mean,
        expected=value,
        std_error=estimate.std_error,
        trials=estimate.trials,
        seed=estimate.seed,
    )
    return CheckOutput(records=[record])


# ---------------------------------------------------------------------------
# Perfis
# ---------------------------------------------------------------------------


def l_existence(scenario: Scenario, options: dict) -> CheckOutput:
    profile, delta, constant = scenario.payload
    report = l_existence_report(profile, delta, constant)
    expected = scenario.params.get("expect_L_exists")
    if report.L_exists is None:
        # orçamento esgotado: nem convergência nem divergência
        mismatch = 1.0
    else:
        mismatch = 0.0 if expected is None or bool(expected) == report.L_exists else 1.0
    verdict = report.verdict
    record = _record(
        scenario,
        "l_existence",
        mismatch,
        0.0,
        options,
        label=f"delta={delta:g}",
        L_exists=report.L_exists,
        ratio_kind=report.ratio.kind,
        constant_label=report.ratio.constant_label,
        constant=report.ratio.constant,
        hull_chi=report.hull_profile.chi,
        hull_psi=report.hull_profile.psi,
        hull_form=report.hull_profile.form,
        integral=verdict.value,
        singularity=verdict.singularity,
        reason=verdict.reason,
    )
    output = CheckOutput(records=[record])
    output.plots["quadrature"] = (("eta", "value"), [(step.eta, step.value) for step in verdict.trace])
    return output


CHECKS: Dict[str, Tuple[Tuple[str, ...], Callable[[Scenario, dict], CheckOutput]]] = {
    "volume_xcheck": ((BODY,), volume_xcheck),
    "ratio_poly": ((BODY,), ratio_poly),
    "revbm": ((BODY,), revbm),
    "convexify": ((BODY,), convexify),
    "cover_ratio": ((BODY, CLOUD), cover_ratio),
    "cover_sandwich": ((BODY, CLOUD), cover_sandwich),
    "gamma_small": ((CLOUD,), gamma_small),
    "gamma_hull": ((BODY, CLOUD), gamma_hull),
    "mm_two_sided": ((CLOUD,), mm_two_sided),
    "sup_gauss": ((CLOUD,), sup_gauss),
    "l_existence": ((PROFILE,), l_existence),
}


def valid_checks(kind: str) -> set:
    return {name for name, (kinds, _) in CHECKS.items() if kind in kinds}


def run_check(name: str, scenario: Scenario, options: dict) -> CheckOutput:
    _, check = CHECKS[name]
    return check(scenario, options)
