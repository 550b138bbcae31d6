import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from apps.covering.serializers import COVERING_CSV_COLUMNS, report_rows
from apps.covering.utils import (
    GENERAL,
    check_hull_cover_ratio,
    covering_curve,
    covering_report,
    exact_cover_small,
    greedy_cover,
    inradius,
    packing_number,
    volume_cover_bounds,
)
from apps.geometry.types import PointCloud
from apps.geometry.utils import sample_body, sphere_polytope
from apps.harness.library import load_body, load_named_cloud
from shared.exceptions import ParamOutOfRange, PreconditionFailed, TooLarge

small_clouds = arrays(
    np.float64,
    st.tuples(st.integers(2, 12), st.just(2)),
    elements=st.floats(min_value=-1, max_value=1, allow_nan=False),
)


@pytest.fixture
def grid_5x5(make_cloud):
    axis = np.linspace(0.0, 1.0, 5)
    return make_cloud(np.array([[x, y] for y in axis for x in axis]))


@pytest.fixture
def unit_disc():
    return sphere_polytope(2, 256)


class TestGreedyCover:

    def test_two_points(self, two_points):
        """Teste Unitário: bolas fechadas de raio 1 cobrem dois pontos à distância 1."""
        assert greedy_cover(two_points, 1.0).n_greedy == 1
        assert greedy_cover(two_points, 0.4).n_greedy == 2

    def test_every_point_covered(self, grid_5x5):
        report = greedy_cover(grid_5x5, 0.3)
        distances = np.linalg.norm(
            grid_5x5.points[:, None, :] - report.centers[None, :, :], axis=-1
        )

        assert report.centers.shape == (report.n_greedy, 2)
        assert np.all(distances.min(axis=1) <= 0.3 + 1e-12)

    def test_within_factor_of_exact(self, grid_5x5):
        greedy = greedy_cover(grid_5x5, 0.25).n_greedy
        exact = exact_cover_small(grid_5x5, 0.25, limit=25)

        assert exact <= greedy <= 2 * exact

    def test_unit_interval_grid(self, unit_grid_11):
        assert greedy_cover(unit_grid_11, 0.35).n_greedy == 3

    @pytest.mark.parametrize("epsilon", [0, -0.5, float("nan")])
    def test_invalid_epsilon(self, two_points, epsilon):
        with pytest.raises(ParamOutOfRange):
            greedy_cover(two_points, epsilon)

    @settings(max_examples=40, deadline=None)
    @given(points=small_clouds, first=st.floats(0.05, 1.0), second=st.floats(0.05, 1.0))
    def test_monotone_in_epsilon(self, points, first, second):
        cloud = PointCloud(points)
        small, large = sorted((first, second))
        assert greedy_cover(cloud, small).n_greedy >= greedy_cover(cloud, large).n_greedy


class TestExactCover:

    def test_singleton(self, make_cloud):
        assert exact_cover_small(make_cloud([[3.0, 4.0]]), 0.01) == 1

    def test_triangle(self):
        """Cada bola de raio 0.9 alcança só o próprio vértice: lado 1 > 0.9."""
        assert exact_cover_small(load_named_cloud("triangle"), 0.9) == 3
        assert exact_cover_small(load_named_cloud("triangle"), 1.0) == 1

    def test_two_clusters(self):
        assert exact_cover_small(load_named_cloud("two_cluster"), 0.2) == 2

    def test_too_large(self, grid_5x5):
        with pytest.raises(TooLarge):
            exact_cover_small(grid_5x5, 0.25)

    def test_subset_monotonicity(self, make_cloud):
        axis = np.linspace(0.0, 1.0, 4)
        grid = np.array([[x, y] for y in axis for x in axis])
        counts = [exact_cover_small(make_cloud(grid[: 4 * rows]), 0.4) for rows in (1, 2, 4)]

        assert counts[0] == 2
        assert counts == sorted(counts)


class TestPackingNumber:

    def test_two_points(self, two_points):
        assert packing_number(two_points, 0.5) == 2

    def test_singleton(self, make_cloud):
        assert packing_number(make_cloud([[0.0]]), 10.0) == 1

    def test_unit_interval_grid(self, unit_grid_11):
        exact = exact_cover_small(unit_grid_11, 0.35)

        assert packing_number(unit_grid_11, 0.7) == 2
        assert exact == 2
        assert packing_number(unit_grid_11, 0.35) == 3
        assert packing_number(unit_grid_11, 0.7) <= exact <= packing_number(unit_grid_11, 0.35)

    @settings(max_examples=40, deadline=None)
    @given(points=small_clouds, epsilon=st.floats(0.05, 1.5))
    def test_sandwich(self, points, epsilon):
        """Teste de Propriedade: P(2 eps) <= N_exato(eps) <= N_guloso(eps)."""
        report = covering_report(PointCloud(points), epsilon)
        assert report.n_packing <= report.n_exact <= report.n_greedy


class TestCoveringReport:

    def test_exact_only_for_small_clouds(self, grid_5x5, two_points):
        assert covering_report(grid_5x5, 0.25).n_exact is None
        report = covering_report(two_points, 0.4)
        assert report.n_exact == 2
        assert report.lower == 2
        assert report.methods == ("greedy", "packing", "exact")

    def test_curve_is_sorted(self, unit_grid_11):
        curve = covering_curve(unit_grid_11, [0.5, 0.05, 0.2])
        assert [report.epsilon for report in curve] == [0.05, 0.2, 0.5]
        assert [report.n_greedy for report in curve] == sorted(
            (report.n_greedy for report in curve), reverse=True
        )

    def test_csv_rows(self, two_points):
        rows = report_rows([covering_report(two_points, 1.0)])
        assert tuple(rows[0]) == COVERING_CSV_COLUMNS
        assert rows[0]["vol_lower"] == ""
        assert rows[0]["n_exact"] == 1


class TestVolumeCoverBounds:

    def test_unit_disc_half(self, unit_disc):
        bounds = volume_cover_bounds(unit_disc, 0.5)
        assert bounds.lower == pytest.approx(4.0, rel=1e-3)
        assert bounds.upper == pytest.approx(36.0, rel=1e-3)

    def test_unit_disc_at_inradius(self, unit_disc, caplog):
        """Teste Unitário: o 256-ágono não contém a bola unitária, só a cota inferior vale."""
        bounds = volume_cover_bounds(unit_disc, 1.0)
        assert bounds.lower == pytest.approx(1.0, rel=1e-3)
        assert bounds.upper is None
        assert "cota inferior" in caplog.text

    def test_require_upper(self, unit_disc):
        with pytest.raises(PreconditionFailed):
            volume_cover_bounds(unit_disc, 1.0, require_upper=True)

    def test_square_side_four(self):
        bounds = volume_cover_bounds(load_body("square4"), 1.0)
        assert bounds.lower == pytest.approx(16 / math.pi)
        assert bounds.upper == pytest.approx(144 / math.pi)
        assert bounds.inradius == pytest.approx(2.0, abs=1e-9)

    def test_middle_form_between_bounds(self):
        bounds = volume_cover_bounds(load_body("square4"), 1.0, with_middle=True)
        # (16 + 4·4·0.5 + pi/4) / (pi/4)
        assert bounds.middle == pytest.approx((24 + math.pi / 4) / (math.pi / 4), rel=1e-3)
        assert bounds.lower <= bounds.middle <= bounds.upper

    def test_nonconvex_has_no_upper(self, lshape):
        bounds = volume_cover_bounds(lshape, 0.1)
        assert bounds.upper is None
        assert bounds.lower == pytest.approx(300 / math.pi)

    def test_lower_below_sample_cover(self):
        square = load_body("square4")
        sample = PointCloud(sample_body(square, 0.25).points)
        assert volume_cover_bounds(square, 1.0).lower <= greedy_cover(sample, 1.0).n_greedy

    def test_inradius_of_square(self, unit_square):
        radius, center = inradius(unit_square)
        assert radius == pytest.approx(0.5, abs=1e-9)
        assert center == pytest.approx([0.5, 0.5], abs=1e-9)


class TestHullCoverRatio:

    @pytest.mark.parametrize("epsilon", [0.2, 0.4, 0.8])
    def test_lshape_poly_mode(self, lshape, epsilon):
        record = check_hull_cover_ratio(lshape, epsilon)

        assert record.R == pytest.approx(3.5 / 3)
        assert record.n_T_method == "packing"
        assert record.n_T <= record.n_T_greedy
        assert record.holds
        assert record.slack == pytest.approx(record.bound - record.n_hull)

    def test_convex_body(self, unit_square):
        record = check_hull_cover_ratio(unit_square, 0.25)
        assert record.R == pytest.approx(1.0)
        assert record.holds

    def test_lshape_general_mode(self, lshape):
        record = check_hull_cover_ratio(lshape, 0.4, mode=GENERAL, k_h=2)
        assert record.mode == GENERAL
        assert record.R >= 1.0
        assert record.holds

    @pytest.mark.parametrize("epsilon, n_hull", [(0.25, 3), (0.5, 2)])
    def test_two_point_cloud(self, two_points, epsilon, n_hull):
        record = check_hull_cover_ratio(two_points, epsilon, R=1.0)

        assert record.n_hull == n_hull
        assert record.n_T == 2
        assert record.n_T_method == "exact"
        assert record.bound == pytest.approx(18.0)
        assert record.holds

    def test_cloud_requires_ratio(self, two_points):
        with pytest.raises(PreconditionFailed):
            check_hull_cover_ratio(two_points, 0.25)

    def test_unknown_mode(self, lshape):
        with pytest.raises(ParamOutOfRange):
            check_hull_cover_ratio(lshape, 0.25, mode="banana")
