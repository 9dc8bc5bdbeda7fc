import pytest

from cvcl.core import centered_grid, make_grid

from helpers import gaussian_state


@pytest.fixture
def small_grid():
    return make_grid(-10.0, 10.0, 81)


@pytest.fixture
def unit_gaussian():
    grid = centered_grid(0.0, 8.0, 161)
    return gaussian_state(grid)
