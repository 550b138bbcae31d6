import csv
import json
import math

import pytest
from rest_framework.exceptions import ValidationError

from apps.harness.checks import CLOSED_FORMS, run_check, scenario_seed, valid_checks
from apps.harness.library import available, suite_path
from apps.harness.serializers import ScenarioSerializer
from apps.harness.types import BODY, CLOUD, PROFILE
from apps.harness.utils import load_suite, options_from_settings, run_suite
from shared.exceptions import PreconditionFailed


def _scenario(document):
    serializer = ScenarioSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["scenario"]


def _write_suite(path, scenarios, **extra):
    path.write_text(json.dumps(dict(extra, scenarios=scenarios)), encoding="utf-8")
    return path


def _bundled_body_checks():
    """Triplas (corpo, verificação, modo) de todas as suítes embutidas."""
    pairs = set()
    for name in available("suites"):
        document = json.loads(suite_path(name).read_text(encoding="utf-8"))
        for item in document["scenarios"]:
            if item["kind"] != BODY:
                continue
            modes = item.get("params", {}).get("modes", ["poly"])
            pairs.update((item["object"], check, mode) for check in item["checks"] for mode in modes)
    return pairs


@pytest.fixture
def options():
    return options_from_settings(seed=0)


@pytest.fixture
def cloud_suite(tmp_path):
    """Suíte pequena de nuvens, barata o bastante para rodar várias vezes."""
    return _write_suite(
        tmp_path / "clouds.json",
        [
            {
                "id": "two_points",
                "kind": "cloud",
                "object": "two_points",
                "checks": ["cover_sandwich", "gamma_small", "mm_two_sided"],
                "params": {"epsilons": [0.25, 1.0], "trials": 2000},
            },
            {
                "id": "pm_e1",
                "kind": "cloud",
                "object": "plus_minus_e1",
                "checks": ["sup_gauss"],
                "params": {"expected": "half_normal", "trials": 20000},
            },
            {"id": "case2", "kind": "profile", "object": "case2_chi2_psi_m1", "checks": ["l_existence"]},
        ],
        name="clouds",
    )


class TestLoadSuite:

    @pytest.mark.parametrize("name", ["default", "convex", "profiles"])
    def test_bundled_suites_are_valid(self, name):
        """Teste Unitário: as suítes embutidas passam pela validação."""
        suite_name, _, scenarios = load_suite(suite_path(name))
        assert suite_name == name
        assert len({scenario.id for scenario in scenarios}) == len(scenarios)

    @pytest.mark.parametrize("body", ["unit_square", "unit_cube", "simplex3", "lshape", "star2d", "cshape"])
    def test_bundled_suites_cover_every_body(self, body):
        """Teste Unitário: cada corpo da biblioteca passa por revbm e gamma_hull nos dois modos."""
        pairs = _bundled_body_checks()
        assert {(body, "gamma_hull", "poly"), (body, "gamma_hull", "general")} <= pairs
        assert {check for name, check, _ in pairs if name == body} >= {"revbm", "volume_xcheck"}

    def test_default_suite_has_convex_bodies_and_distinct_revbm(self):
        document = json.loads(suite_path("default").read_text(encoding="utf-8"))
        objects = {item["object"] for item in document["scenarios"]}
        assert {"unit_cube", "simplex3", "cshape"} <= objects
        assert any(
            "revbm" in item["checks"] and item.get("params", {}).get("other") not in (None, item["object"])
            for item in document["scenarios"]
        )

    def test_suite_by_library_name(self):
        name, seed, scenarios = load_suite("profiles")
        assert name == "profiles"
        assert seed is None
        assert [scenario.kind for scenario in scenarios] == [PROFILE] * 3

    def test_duplicate_ids_rejected(self, tmp_path):
        scenario = {"id": "dup", "kind": "cloud", "object": "two_points", "checks": ["gamma_small"]}
        path = _write_suite(tmp_path / "dup.json", [scenario, scenario])
        with pytest.raises(ValidationError):
            load_suite(path)

    def test_check_must_fit_kind(self):
        with pytest.raises(ValidationError) as exc:
            _scenario({"id": "x", "kind": "profile", "object": "case1_chi3_psi1", "checks": ["revbm"]})
        assert "checks" in exc.value.detail

    def test_unknown_library_object(self):
        with pytest.raises(ValidationError) as exc:
            _scenario({"id": "x", "kind": "body", "object": "dodecahedron", "checks": ["ratio_poly"]})
        assert "object" in exc.value.detail

    def test_inline_documents(self):
        body = _scenario(
            {
                "id": "tri",
                "kind": "body",
                "object": {"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]], "facets": [[0, 1], [1, 2], [2, 0]]},
                "checks": ["volume_xcheck"],
            }
        )
        profile = _scenario(
            {"id": "p", "kind": "profile", "object": {"chi": 2, "psi": 0, "delta": 0.5}, "checks": ["l_existence"]}
        )
        assert body.payload.dim == 2
        assert profile.payload[1] == 0.5

    def test_every_kind_has_checks(self):
        assert {"volume_xcheck", "revbm", "convexify"} <= valid_checks(BODY)
        assert {"gamma_small", "mm_two_sided", "sup_gauss"} <= valid_checks(CLOUD)
        assert valid_checks(PROFILE) == {"l_existence"}

    def test_library_listing(self):
        assert "lshape" in available("bodies")
        assert "orthonormal_16" in available("clouds")


class TestChecks:

    def test_volume_xcheck_lshape(self, options):
        """Teste Unitário: as duas fórmulas de volume concordam no L (área 3)."""
        scenario = _scenario({"id": "l", "kind": "body", "object": "lshape", "checks": ["volume_xcheck"]})
        (record,) = run_check("volume_xcheck", scenario, options).records
        assert record.holds
        assert record.constants["volume"] == pytest.approx(3.0, abs=1e-12)

    def test_ratio_poly_constants(self, options):
        scenario = _scenario({"id": "l", "kind": "body", "object": "lshape", "checks": ["ratio_poly"]})
        (record,) = run_check("ratio_poly", scenario, options).records
        assert record.constants["R"] == pytest.approx(3.5 / 3, rel=1e-9)
        assert record.constants["convex"] is False
        assert record.slack > 0

    def test_gamma_small_triangle(self, options):
        scenario = _scenario(
            {"id": "t", "kind": "cloud", "object": "triangle", "checks": ["gamma_small"], "params": {"alphas": [2]}}
        )
        (record,) = run_check("gamma_small", scenario, options).records
        assert record.holds
        assert record.constants["gamma_exact"] == pytest.approx(1.0, abs=1e-12)
        assert record.constants["gamma_greedy"] == pytest.approx(1.0, abs=1e-12)

    def test_cover_sandwich_cloud(self, options):
        scenario = _scenario(
            {
                "id": "c",
                "kind": "cloud",
                "object": "two_cluster",
                "checks": ["cover_sandwich"],
                "params": {"epsilons": [0.1, 20.0]},
            }
        )
        output = run_check("cover_sandwich", scenario, options)
        assert len(output.records) == 4
        assert all(record.holds for record in output.records)
        assert [row["epsilon"] for row in output.covering_rows] == [0.1, 20.0]
        assert output.covering_rows[0]["n_exact"] == 2

    def test_cover_sandwich_exact_chain_unit_square(self, options):
        """Teste Unitário: cota de volume <= N exato <= N guloso na amostra grossa do quadrado."""
        scenario = _scenario(
            {
                "id": "sq",
                "kind": "body",
                "object": "unit_square",
                "checks": ["cover_sandwich"],
                "params": {"epsilons": [0.4]},
            }
        )
        output = run_check("cover_sandwich", scenario, options)
        chain = {record.label: record for record in output.records if record.label.startswith("exact_")}

        assert set(chain) == {"exact_lower eps=0.4", "exact_greedy eps=0.4"}
        assert all(record.holds for record in chain.values())
        lower = chain["exact_lower eps=0.4"]
        assert lower.lhs == pytest.approx(0.4**-2 / math.pi)
        assert lower.constants["sample_size"] == 16
        assert lower.constants["n_exact"] == 16
        assert lower.constants["n_exact"] <= lower.constants["n_greedy"]
        assert output.covering_rows[0]["n_exact"] == 16

    def test_cover_sandwich_skips_chain_for_nonconvex_body(self, options):
        scenario = _scenario(
            {
                "id": "l",
                "kind": "body",
                "object": "lshape",
                "checks": ["cover_sandwich"],
                "params": {"epsilons": [0.8]},
            }
        )
        output = run_check("cover_sandwich", scenario, options)
        assert not [record for record in output.records if record.label.startswith("exact_")]
        assert output.covering_rows[0]["n_exact"] == ""

    def test_revbm_with_distinct_bodies(self, options):
        """Teste Unitário: A = cubo e B = simplexo entram com betas diferentes."""
        scenario = _scenario(
            {
                "id": "cube_simplex",
                "kind": "body",
                "object": "unit_cube",
                "checks": ["revbm"],
                "params": {"other": "simplex3", "s": [1], "t": [1], "m": [1]},
            }
        )
        (record,) = run_check("revbm", scenario, options).records
        assert record.holds
        assert record.constants["other"] == "simplex3"
        assert record.constants["beta_A"] != pytest.approx(record.constants["beta_B"])

    def test_convexify_rows_and_general_ratio(self, options):
        scenario = _scenario(
            {
                "id": "l",
                "kind": "body",
                "object": "lshape",
                "checks": ["convexify"],
                "params": {"k_max": 3, "points_per_axis": 12},
            }
        )
        output = run_check("convexify", scenario, options)
        assert [row["k"] for row in output.convexification_rows] == [1, 2, 3]
        assert set(output.convexification_rows[0]) == {"scenario", "k", "vol", "gap", "bound"}
        assert all(row["vol"] <= row["bound"] + 1e-9 for row in output.convexification_rows)
        general = next(record for record in output.records if record.label == "general_ratio")
        assert general.constants["k_h"] == 3
        assert general.constants["ratio"] == general.constants["R"]
        assert "converged_k" in general.constants

    def test_gamma_hull_reports_full_constants(self, options):
        scenario = _scenario(
            {
                "id": "two",
                "kind": "cloud",
                "object": "two_points",
                "checks": ["gamma_hull"],
                "params": {"R": 1.0},
            }
        )
        (record,) = run_check("gamma_hull", scenario, options).records
        assert {"gamma_T_method", "L_bound", "R", "mode", "dim"} <= set(record.constants)
        assert record.constants["R"] == 1.0

    def test_cover_ratio_cloud_needs_R(self, options):
        scenario = _scenario({"id": "c", "kind": "cloud", "object": "two_points", "checks": ["cover_ratio"]})
        with pytest.raises(PreconditionFailed) as exc:
            run_check("cover_ratio", scenario, options)
        assert "R" in str(exc.value)

    def test_sup_gauss_closed_form(self, options):
        scenario = _scenario(
            {
                "id": "pm",
                "kind": "cloud",
                "object": "plus_minus_e1",
                "checks": ["sup_gauss"],
                "params": {"expected": "half_normal", "trials": 20000},
            }
        )
        (record,) = run_check("sup_gauss", scenario, options).records
        assert record.constants["expected"] == pytest.approx(math.sqrt(2 / math.pi))
        assert record.constants["trials"] == 20000
        assert record.holds

    def test_mm_two_sided_excludes_singleton(self, options):
        scenario = _scenario(
            {"id": "one", "kind": "cloud", "object": {"dim": 2, "points": [[1, 1]]}, "checks": ["mm_two_sided"]}
        )
        assert run_check("mm_two_sided", scenario, options).records == []

    def test_l_existence_case3(self, options):
        """Teste Unitário: caso chi = 2, psi = -3 diverge na singularidade e^-1."""
        scenario = _scenario(
            {
                "id": "c3",
                "kind": "profile",
                "object": "case3_chi2_psi_m3",
                "checks": ["l_existence"],
                "params": {"expect_L_exists": False},
            }
        )
        output = run_check("l_existence", scenario, options)
        (record,) = output.records
        assert record.holds
        assert record.constants["L_exists"] is False
        assert record.constants["singularity"] == pytest.approx(math.exp(-1))
        assert output.plots["quadrature"][0] == ("eta", "value")

    def test_l_existence_mismatch_fails(self, options):
        scenario = _scenario(
            {
                "id": "c1",
                "kind": "profile",
                "object": "case1_chi3_psi1",
                "checks": ["l_existence"],
                "params": {"expect_L_exists": False},
            }
        )
        (record,) = run_check("l_existence", scenario, options).records
        assert not record.holds
        assert record.slack == -1.0

    def test_scenario_seed(self):
        assert scenario_seed(0, "a") == scenario_seed(0, "a")
        assert scenario_seed(0, "a") != scenario_seed(0, "b")
        assert scenario_seed(0, "a") != scenario_seed(1, "a")

    def test_closed_forms(self):
        assert CLOSED_FORMS["max_of_two"] == pytest.approx(0.5641895835)
        assert CLOSED_FORMS["half_normal"] == pytest.approx(0.7978845608)


class TestRunSuite:

    def test_profiles_suite(self, tmp_path):
        """Teste de Integração: os três perfis canônicos dão L_exists = verdadeiro, verdadeiro, falso."""
        outcome = run_suite("profiles", out_dir=tmp_path)
        assert outcome.all_hold
        verdicts = {record.scenario: record.constants["L_exists"] for record in outcome.records}
        assert verdicts == {"case1": True, "case2": True, "case3": False}

        results = json.loads((tmp_path / "results.json").read_text(encoding="utf-8"))
        assert results["all_hold"] is True
        assert all("runtime_ms" not in record for record in results["records"])
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["by_check"]["l_existence"] == {"records": 3, "failures": 0}
        assert (tmp_path / "plots" / "case3__quadrature.csv").exists()

    def test_results_are_deterministic(self, cloud_suite, tmp_path):
        """Teste de Propriedade: mesma suíte e semente geram results.json idêntico, com qualquer paralelismo."""
        run_suite(cloud_suite, out_dir=tmp_path / "a", seed=7)
        run_suite(cloud_suite, out_dir=tmp_path / "b", seed=7, jobs=3)
        first = (tmp_path / "a" / "results.json").read_bytes()
        assert first == (tmp_path / "b" / "results.json").read_bytes()

    def test_seed_changes_monte_carlo(self, cloud_suite, tmp_path):
        first = run_suite(cloud_suite, seed=1)
        second = run_suite(cloud_suite, seed=2)
        esup = [
            [r.constants["esup"] for r in outcome.records if r.check == "sup_gauss"]
            for outcome in (first, second)
        ]
        assert esup[0] != esup[1]

    def test_seed_precedence(self, cloud_suite, tmp_path, settings):
        settings.HULLMETRY = dict(settings.HULLMETRY, DEFAULT_SEED=11)
        assert run_suite(cloud_suite).seed == 11
        seeded = _write_suite(
            tmp_path / "seeded.json", json.loads(cloud_suite.read_text())["scenarios"], seed=5
        )
        assert run_suite(seeded).seed == 5
        assert run_suite(seeded, seed=3).seed == 3

    def test_records_sorted(self, cloud_suite):
        outcome = run_suite(cloud_suite, jobs=2)
        keys = [(record.scenario, record.check) for record in outcome.records]
        assert keys == sorted(keys)
        assert all(record.runtime_ms >= 0 for record in outcome.records)

    def test_failing_check_does_not_abort(self, tmp_path):
        path = _write_suite(
            tmp_path / "broken.json",
            [
                {"id": "big", "kind": "cloud", "object": "two_cluster", "checks": ["gamma_small"]},
                {"id": "ok", "kind": "cloud", "object": "triangle", "checks": ["gamma_small"]},
            ],
        )
        outcome = run_suite(path, out_dir=tmp_path / "out")
        assert not outcome.all_hold
        (failure,) = outcome.failures
        assert failure.scenario == "big"
        assert "PreconditionFailed" in failure.constants["error"]
        assert any(record.scenario == "ok" and record.holds for record in outcome.records)

        results = json.loads((tmp_path / "out" / "results.json").read_text(encoding="utf-8"))
        broken = next(record for record in results["records"] if record["scenario"] == "big")
        assert broken["lhs"] is None

    def test_csv_reports(self, cloud_suite, tmp_path):
        run_suite(cloud_suite, out_dir=tmp_path)
        with (tmp_path / "covering.csv").open(encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert [row["epsilon"] for row in rows] == ["0.25", "1.0"]
        assert rows[0]["scenario"] == "two_points"
        with (tmp_path / "chaining.csv").open(encoding="utf-8") as handle:
            (row,) = list(csv.DictReader(handle))
        assert row["scenario"] == "two_points"
        assert float(row["L_hat"]) >= 1.0
        with (tmp_path / "timings.csv").open(encoding="utf-8") as handle:
            assert len(list(csv.DictReader(handle))) == len(run_suite(cloud_suite).records)

    def test_convexification_csv(self, tmp_path):
        """Teste Unitário: o traço de convexificação vai para convexification.csv."""
        suite = _write_suite(
            tmp_path / "convexify.json",
            [
                {
                    "id": "lshape",
                    "kind": "body",
                    "object": "lshape",
                    "checks": ["convexify"],
                    "params": {"k_max": 3, "points_per_axis": 12},
                }
            ],
            name="convexify",
        )
        run_suite(suite, out_dir=tmp_path / "out")
        with (tmp_path / "out" / "convexification.csv").open(encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == ["scenario", "k", "vol", "gap", "bound"]
        assert [row["k"] for row in rows] == ["1", "2", "3"]
        assert float(rows[0]["vol"]) == pytest.approx(float(rows[0]["bound"]))
