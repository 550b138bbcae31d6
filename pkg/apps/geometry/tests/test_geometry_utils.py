import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from apps.geometry.types import PointCloud
from apps.geometry.utils import (
    beta_ratio,
    is_convex,
    make_polytope,
    min_enclosing_ball,
    point_in_body,
    polytope_volume,
    quickhull,
    regular_polygon,
    triangulate_boundary,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from shared.exceptions import DegenerateInput, NonOrientable


def shoelace(vertices):
    x, y = np.asarray(vertices, dtype=float).T
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class TestQuickhull:

    def test_interior_point_is_dropped(self, make_cloud):
        """Teste Unitário: o centro do quadrado não é vértice do fecho."""
        cloud = make_cloud([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
        hull = quickhull(cloud)

        assert len(hull.vertices) == 4
        assert {tuple(v) for v in hull.vertices} == {(0, 0), (1, 0), (1, 1), (0, 1)}

    def test_lshape_hull_is_pentagon(self, lshape):
        hull = quickhull(lshape.cloud)

        expected = {(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)}
        assert {tuple(v) for v in hull.vertices} == expected
        assert polytope_volume(hull) == pytest.approx(3.5, rel=1e-12)

    def test_collinear_points_are_degenerate(self, make_cloud):
        with pytest.raises(DegenerateInput):
            quickhull(make_cloud([[0, 0], [1, 1], [2, 2]]))

    def test_idempotence(self, star2d, unit_cube):
        for body in (star2d, unit_cube):
            once = quickhull(body.cloud)
            twice = quickhull(once.cloud)
            assert {tuple(v) for v in once.vertices} == {tuple(v) for v in twice.vertices}

    def test_every_input_point_inside_hull(self):
        points = np.random.default_rng(3).uniform(-1, 1, size=(200, 3))
        hull = quickhull(PointCloud(points))
        reference = ConvexHull(points)

        assert polytope_volume(hull) == pytest.approx(reference.volume, rel=1e-9)
        normals = reference.equations
        assert np.all(points @ normals[:, :-1].T + normals[:, -1] <= 1e-9)

    def test_hull_boundary_is_closed(self):
        points = np.random.default_rng(5).standard_normal((60, 4))
        hull = quickhull(PointCloud(points))
        assert hull.boundary.is_closed()

    def test_volume_monotone_under_inclusion(self):
        points = np.random.default_rng(8).uniform(size=(80, 3))
        big = polytope_volume(quickhull(PointCloud(points)))
        small = polytope_volume(quickhull(PointCloud(points[:40])))
        assert big >= small


class TestTriangulation:

    def test_unit_square_has_four_edges(self, unit_square):
        boundary = triangulate_boundary(unit_square)
        assert len(boundary) == 4
        assert boundary.is_closed()

    def test_unit_cube_has_twelve_triangles(self, unit_cube):
        boundary = triangulate_boundary(unit_cube)
        assert len(boundary) == 12
        assert boundary.is_closed()
        assert volume_det(boundary) == pytest.approx(1.0, rel=1e-12)

    def test_tetrahedron_faces_are_outward(self, simplex3):
        boundary = triangulate_boundary(simplex3)
        interior = simplex3.vertices.mean(axis=0)

        assert len(boundary) == 4
        for simplex in boundary.simplices:
            assert np.linalg.det(simplex - interior) > 0

    def test_reversed_input_orientation_is_fixed(self):
        """Facetas em sentido horário continuam dando volume positivo."""
        vertices = [[0, 0], [0, 1], [1, 1], [1, 0]]
        poly = make_polytope(vertices, [(0, 1), (1, 2), (2, 3), (3, 0)])
        assert polytope_volume(poly) == pytest.approx(1.0)

    def test_open_boundary_is_rejected(self):
        with pytest.raises(NonOrientable):
            make_polytope([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1), (1, 2), (2, 3)])


class TestVolumes:

    def test_unit_square(self, unit_square):
        assert volume_det(unit_square.boundary) == pytest.approx(1.0, abs=1e-12)
        assert volume_projected(unit_square.boundary) == pytest.approx(1.0, abs=1e-12)

    def test_standard_simplex(self, simplex3):
        assert volume_det(simplex3.boundary) == pytest.approx(1 / 6, rel=1e-12)
        assert volume_projected(simplex3.boundary) == pytest.approx(1 / 6, rel=1e-12)

    def test_lshape_matches_shoelace(self, lshape):
        expected = shoelace(lshape.vertices)
        assert expected == 3.0
        assert volume_det(lshape.boundary) == pytest.approx(expected, abs=1e-12)
        assert volume_projected(lshape.boundary) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_formulas_agree_on_random_polytopes(self, dim):
        rng = np.random.default_rng(100 + dim)
        for _ in range(20):
            points = rng.standard_normal((dim + 4 + rng.integers(0, 20), dim))
            boundary = quickhull(PointCloud(points)).boundary
            first = volume_det(boundary)
            second = volume_projected(boundary)
            assert first > 0
            assert second == pytest.approx(first, rel=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10_000),
        shift=st.lists(st.floats(-50, 50), min_size=3, max_size=3),
    )
    def test_rigid_motion_invariance(self, seed, shift):
        rng = np.random.default_rng(seed)
        points = rng.uniform(-1, 1, size=(30, 3))
        rotation = special_ortho_group.rvs(3, random_state=seed)
        moved = points @ rotation.T + np.asarray(shift)

        before = polytope_volume(quickhull(PointCloud(points)))
        after = polytope_volume(quickhull(PointCloud(moved)))
        assert after == pytest.approx(before, rel=1e-9)


class TestEnclosingBall:

    def test_single_point(self, make_cloud):
        ball = min_enclosing_ball(make_cloud([[0.3, -2.0]]))
        assert ball.radius == 0.0
        assert np.allclose(ball.center, [0.3, -2.0])

    def test_unit_square_corners(self, unit_square):
        ball = min_enclosing_ball(unit_square.cloud)
        assert np.allclose(ball.center, [0.5, 0.5])
        assert ball.radius == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_two_points(self, make_cloud):
        ball = min_enclosing_ball(make_cloud([[0, 0, 0], [0, 3, 4]]))
        assert np.allclose(ball.center, [0, 1.5, 2])
        assert ball.radius == pytest.approx(2.5)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000), dim=st.integers(2, 4))
    def test_ball_is_minimal(self, seed, dim):
        """A bola contém tudo e é a bola mínima dos seus pontos de suporte."""
        points = np.random.default_rng(seed).standard_normal((40, dim))
        ball = min_enclosing_ball(PointCloud(points))

        assert np.all(ball.contains(points, tol=1e-9))
        support = PointCloud(points[ball.support])
        assert len(support) <= dim + 1
        assert min_enclosing_ball(support).radius >= (1 - 1e-6) * ball.radius


class TestRatios:

    def test_beta_unit_square(self, unit_square):
        assert beta_ratio(unit_square) == pytest.approx(math.pi / 2, rel=1e-9)

    def test_beta_fine_polygon_is_close_to_one(self):
        assert beta_ratio(regular_polygon(512)) == pytest.approx(1.0, rel=1e-3)

    def test_beta_lshape(self, lshape):
        # bola mínima centrada em (1, 1) com raio sqrt(2)
        assert beta_ratio(lshape) == pytest.approx(2 * math.pi / 3, rel=1e-9)

    def test_ratio_of_convex_bodies_is_one(self, unit_square, unit_cube, simplex3):
        for body in (unit_square, unit_cube, simplex3):
            assert volume_ratio_poly(body) == pytest.approx(1.0, abs=1e-9)
            assert is_convex(body)

    def test_ratio_lshape(self, lshape):
        assert volume_ratio_poly(lshape) == pytest.approx(3.5 / 3, abs=1e-9)
        assert not is_convex(lshape)

    def test_ratio_star(self, star2d):
        area = shoelace(star2d.vertices)
        hull = quickhull(star2d.cloud)
        hull_area = shoelace(hull.vertices[np.argsort(np.arctan2(*hull.vertices.T[::-1]))])
        assert volume_ratio_poly(star2d) == pytest.approx(hull_area / area, rel=1e-9)
        assert volume_ratio_poly(star2d) > 1


class TestMembership:

    def test_lshape_membership(self, lshape):
        queries = np.array([[0.5, 1.5], [1.5, 0.5], [1.5, 1.5], [2.5, 0.5], [0.25, 0.25]])
        assert point_in_body(lshape, queries).tolist() == [True, True, False, False, True]
