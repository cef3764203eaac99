"""
Shared fixtures: alpha grids, strategies for random fuzzy numbers and
session-scoped traces (default-plan traces take seconds to build)
"""

import numpy as np
import pytest
from hypothesis import strategies as st

from core.fuzzy import AlphaGrid, FuzzyNumber
from core.functions import lookup
from core.integration import SamplingPlan, build_trace

SMALL_GRID = AlphaGrid.uniform(9)


@st.composite
def fuzzy_numbers(draw, grid: AlphaGrid = SMALL_GRID, bound: float = 100.0):
    """Valid fuzzy numbers: core [a, b] widened by nonnegative spreads toward alpha = 0"""
    size = len(grid)
    floats = st.floats(min_value=-bound, max_value=bound, allow_nan=False, allow_infinity=False)
    steps = st.floats(min_value=0.0, max_value=bound / size, allow_nan=False, allow_infinity=False)
    a = draw(floats)
    width = draw(st.floats(min_value=0.0, max_value=bound, allow_nan=False, allow_infinity=False))
    left = np.array(draw(st.lists(steps, min_size=size - 1, max_size=size - 1)))
    right = np.array(draw(st.lists(steps, min_size=size - 1, max_size=size - 1)))
    lower = np.empty(size)
    upper = np.empty(size)
    lower[-1] = a
    upper[-1] = a + width
    # spreads accumulate from the core outward
    lower[:-1] = a - np.cumsum(left[::-1])[::-1]
    upper[:-1] = a + width + np.cumsum(right[::-1])[::-1]
    return FuzzyNumber(grid, lower, upper)


@pytest.fixture(scope="session")
def grid():
    return AlphaGrid.uniform()


@pytest.fixture(scope="session")
def default_plan():
    return SamplingPlan()


@pytest.fixture(scope="session")
def small_plan():
    return SamplingPlan(t_max=100.0, n_steps=2000)


@pytest.fixture(scope="session")
def example_one(grid):
    return lookup("paper-example-1", grid)


@pytest.fixture(scope="session")
def example_two(grid):
    return lookup("paper-example-2", grid)


@pytest.fixture(scope="session")
def example_one_trace(example_one, default_plan):
    return build_trace(example_one, default_plan)


@pytest.fixture(scope="session")
def example_two_trace(example_two, default_plan):
    return build_trace(example_two, default_plan)


@pytest.fixture(scope="session")
def convergent_trace(grid, default_plan):
    return build_trace(lookup("convergent-1", grid), default_plan)


@pytest.fixture(scope="session")
def catalog_traces(grid, small_plan):
    """Every catalog function on the reduced plan"""
    from core.functions import catalog

    return {f.name: build_trace(f, small_plan) for f in catalog(grid)}


def target_u(grid: AlphaGrid) -> FuzzyNumber:
    """[u]_alpha = [alpha, 2 - alpha]"""
    return FuzzyNumber(grid, grid.levels, 2.0 - grid.levels)
