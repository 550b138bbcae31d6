import numpy as np
import pytest

from apps.covering.utils import greedy_cover
from apps.geometry.types import PointCloud
from apps.geometry.utils import is_convex, make_polytope, min_enclosing_ball, quickhull
from shared.exceptions import TooLarge

DENTED_SQUARE = [[0, 0], [1, 0], [1, 1], [0.5, 1 - 2e-6], [0, 1]]
SQUARE_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]


@pytest.fixture
def hullmetry(settings):
    """Sobrescreve chaves de settings.HULLMETRY durante o teste."""

    def _override(**values):
        settings.HULLMETRY = dict(settings.HULLMETRY, **values)

    return _override


class TestToleranceSettings:

    def test_max_hull_dim_is_read_from_settings(self, hullmetry, unit_cube):
        """Teste Unitário: MAX_HULL_DIM = 2 recusa o fecho do cubo."""
        assert len(quickhull(unit_cube.cloud).vertices) == 8
        hullmetry(MAX_HULL_DIM=2)
        with pytest.raises(TooLarge):
            quickhull(unit_cube.cloud)

    def test_tau_geom_widens_closed_balls(self, hullmetry, make_cloud):
        cloud = make_cloud([[0.0], [1.0 + 1e-6]])
        assert greedy_cover(cloud, 1.0).n_greedy == 2
        hullmetry(TAU_GEOM=1e-3)
        assert greedy_cover(cloud, 1.0).n_greedy == 1

    def test_tau_vol_decides_convexity(self, hullmetry):
        """Teste Unitário: um quadrado com amassado de 1e-6 de área vira convexo com TAU_VOL maior."""
        dented = make_polytope(DENTED_SQUARE, SQUARE_EDGES)
        assert not is_convex(dented)
        hullmetry(TAU_VOL=1e-5)
        assert is_convex(dented)


class TestHighDimensionalBall:

    def test_cross_polytope_in_twelve_dimensions(self):
        """Teste Unitário: +-e_i em R^12 tem bola mínima centrada na origem com raio 1."""
        basis = np.eye(12)
        ball = min_enclosing_ball(PointCloud(np.vstack([basis, -basis])))

        assert np.allclose(ball.center, 0.0, atol=1e-7)
        assert ball.radius == pytest.approx(1.0, rel=1e-7)
        assert len(ball.support) >= 2

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_exact_ball_of_embedded_cloud(self, seed):
        """Teste de Propriedade: a mesma nuvem em R^6 e mergulhada em R^12 tem o mesmo raio."""
        points = np.random.default_rng(seed).standard_normal((30, 6))
        exact = min_enclosing_ball(PointCloud(points))
        embedded = np.hstack([points, np.zeros((30, 6))])
        ball = min_enclosing_ball(PointCloud(embedded))

        assert ball.radius == pytest.approx(exact.radius, rel=1e-6)
        assert np.all(ball.contains(embedded, tol=1e-9))
