import numpy as np
import pytest

from apps.geometry.types import PointCloud
from apps.harness.library import load_body, load_named_cloud


@pytest.fixture
def unit_square():
    return load_body("unit_square")


@pytest.fixture
def lshape():
    """L formado por [0,2]x[0,1] e [0,1]x[0,2]; área 3, fecho com área 3.5."""
    return load_body("lshape")


@pytest.fixture
def unit_cube():
    return load_body("unit_cube")


@pytest.fixture
def simplex3():
    return load_body("simplex3")


@pytest.fixture
def star2d():
    return load_body("star2d")


@pytest.fixture
def two_points():
    return load_named_cloud("two_points")


@pytest.fixture
def make_cloud():
    """Fixture para criar nuvens de pontos dinamicamente nos testes"""

    def _make(points):
        return PointCloud(np.asarray(points, dtype=float))

    return _make


@pytest.fixture
def unit_grid_11(make_cloud):
    return make_cloud(np.linspace(0.0, 1.0, 11).reshape(-1, 1))
