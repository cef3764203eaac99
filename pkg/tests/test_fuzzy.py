"""
Fuzzy-core tests: worked examples plus property suites over random valid
fuzzy numbers (metric axioms, scaling/translation laws, order laws)
"""

import json

import numpy as np
import pytest
from hypothesis import assume, given, settings as hypothesis_settings, strategies as st

from core.fuzzy import (
    AlphaGrid, FuzzyArithmeticError, FuzzyNumber, add, is_crisp, is_negative, leq, leq_eps,
    make_crisp, membership, metric_d, norm, scale, validate,
)
from tests.conftest import SMALL_GRID, fuzzy_numbers, target_u

PROPERTY = hypothesis_settings(max_examples=1000, deadline=None)
TOL = 1e-9
scalars = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
nonnegative = st.floats(min_value=0.0, max_value=10.0, allow_nan=False, allow_infinity=False)


def constant_levels(grid, low, high):
    return FuzzyNumber(grid, np.full(len(grid), low), np.full(len(grid), high))


# Alpha grid

def test_uniform_grid_defaults_to_settings():
    assert len(AlphaGrid.uniform()) == 33


@pytest.mark.parametrize("levels", [[0.0], [0.0, 0.5], [0.1, 1.0], [0.0, 0.6, 0.4, 1.0]])
def test_invalid_grids_are_rejected(levels):
    with pytest.raises(FuzzyArithmeticError):
        AlphaGrid(levels)


def test_grids_compare_by_levels():
    assert AlphaGrid.uniform(5) == AlphaGrid([0.0, 0.25, 0.5, 0.75, 1.0])
    assert AlphaGrid.uniform(5) != AlphaGrid.uniform(6)


# Worked examples

def test_make_crisp(grid):
    zero = make_crisp(0.0, grid)
    assert np.all(zero.lower == 0) and np.all(zero.upper == 0)
    one = make_crisp(1.0, grid)
    assert np.all(one.lower == 1) and np.all(one.upper == 1)
    with pytest.raises(FuzzyArithmeticError):
        make_crisp(float("inf"), grid)


def test_add_examples(grid):
    u = target_u(grid)
    assert add(u, make_crisp(0.0, grid)).equals(u)
    doubled = add(u, u)
    assert np.allclose(doubled.lower, 2 * grid.levels)
    assert np.allclose(doubled.upper, 4 - 2 * grid.levels)
    assert add(make_crisp(1.0, grid), make_crisp(2.0, grid)).equals(make_crisp(3.0, grid))


def test_scale_examples(grid):
    u = target_u(grid)
    assert scale(1.0, u).equals(u)
    assert scale(0.0, u).equals(make_crisp(0.0, grid))
    negated = scale(-1.0, u)
    assert np.allclose(negated.lower, grid.levels - 2)
    assert np.allclose(negated.upper, -grid.levels)
    assert validate(negated).ok


def test_operator_sugar(grid):
    u = target_u(grid)
    assert (u + u).equals(add(u, u))
    assert (2.5 * u).equals(scale(2.5, u))
    assert (u * -1.0).equals(-u)
    shifted = u - 1.0
    assert np.allclose(shifted.lower, grid.levels - 1)


def test_metric_examples(grid):
    u = target_u(grid)
    assert metric_d(u, u) == 0.0
    assert metric_d(make_crisp(0.0, grid), make_crisp(1.0, grid)) == 1.0
    assert metric_d(u, make_crisp(0.0, grid)) == 2.0
    assert norm(u) == 2.0


def test_leq_examples(grid):
    assert leq(make_crisp(0.0, grid), make_crisp(1.0, grid))
    u = target_u(grid)
    assert leq(u, u)
    narrow = constant_levels(grid, 0.0, 2.0)
    wide = constant_levels(grid, -1.0, 3.0)
    assert not leq(narrow, wide)
    assert not leq(wide, narrow)


def test_leq_eps_examples(grid):
    u = target_u(grid)
    assert leq_eps(u, u, 0.0)
    assert not leq_eps(make_crisp(1.0, grid), make_crisp(0.0, grid), 0.5)
    with pytest.raises(FuzzyArithmeticError):
        leq_eps(u, u, -0.1)


def test_grid_mismatch_raises():
    with pytest.raises(FuzzyArithmeticError):
        add(make_crisp(0.0, AlphaGrid.uniform(5)), make_crisp(0.0, AlphaGrid.uniform(9)))


def test_validate_reports_first_violation():
    grid = AlphaGrid([0.0, 1.0])
    report = validate(FuzzyNumber(grid, [0.0, 0.5], [0.4, 0.6]))
    assert not report.ok
    assert report.invariant == "upper-nonincreasing"
    assert report.level == 1

    report = validate(FuzzyNumber(grid, [0.0, 1.0], [2.0, 0.5]))
    assert report.invariant == "lower-le-upper"
    assert report.alpha == 1.0

    report = validate(FuzzyNumber(grid, [float("nan"), 1.0], [2.0, 1.0]))
    assert report.invariant == "finite" and report.level == 0


def test_predicates(grid):
    assert is_crisp(make_crisp(3.0, grid))
    assert not is_crisp(target_u(grid))
    assert is_negative(make_crisp(-1.0, grid))
    assert not is_negative(make_crisp(0.0, grid))


def test_membership_reconstruction(grid):
    u = target_u(grid)
    assert membership(u, 1.0) == 1.0
    assert membership(u, 0.5) == pytest.approx(0.5)
    assert membership(u, 1.75) == pytest.approx(0.25)
    assert membership(u, -1.0) == 0.0
    assert np.allclose(membership(u, np.array([0.0, 1.0, 2.0])), [0.0, 1.0, 0.0])


def test_json_round_trip(grid):
    u = target_u(grid)
    restored = FuzzyNumber.from_dict(json.loads(json.dumps(u.to_dict())))
    assert restored.grid == grid
    assert restored.equals(u, atol=0.0)


def test_endpoint_arrays_are_read_only(grid):
    u = target_u(grid)
    with pytest.raises(ValueError):
        u.lower[0] = 5.0


# Property suites

@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
@PROPERTY
def test_crisp_numbers_are_valid(r):
    assert validate(make_crisp(r, SMALL_GRID)).ok


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_metric_axioms(u, v, w):
    assert metric_d(u, v) == metric_d(v, u) >= 0.0
    assert metric_d(u, w) <= metric_d(u, v) + metric_d(v, w) + TOL
    assert (metric_d(u, v) == 0.0) == (np.array_equal(u.lower, v.lower) and np.array_equal(u.upper, v.upper))
    assert metric_d(u, u) == 0.0


@given(fuzzy_numbers(), fuzzy_numbers(), scalars)
@PROPERTY
def test_scaling_multiplies_distance(u, v, k):
    assert metric_d(scale(k, u), scale(k, v)) == pytest.approx(abs(k) * metric_d(u, v), rel=1e-9, abs=TOL)


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_translation_invariance(u, v, w):
    assert metric_d(add(u, v), add(w, v)) == pytest.approx(metric_d(u, w), abs=TOL)


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_distance_of_sums(u, v, w, z):
    assert metric_d(add(u, v), add(w, z)) <= metric_d(u, w) + metric_d(v, z) + TOL


@given(fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_norm_bounds_distance(u, v):
    assert abs(norm(u) - norm(v)) <= metric_d(u, v) + TOL
    assert metric_d(u, v) <= norm(u) + norm(v) + TOL


@given(fuzzy_numbers(), nonnegative, nonnegative, st.booleans())
@PROPERTY
def test_same_sign_distributivity(u, a, b, negative):
    if negative:
        a, b = -a, -b
    assert scale(a + b, u).equals(add(scale(a, u), scale(b, u)), atol=TOL)


@given(fuzzy_numbers())
@PROPERTY
def test_mixed_sign_distributivity_fails(u):
    assume(u.upper[0] - u.lower[0] > 1e-6)
    combined = add(scale(1.0, u), scale(-1.0, u))
    assert np.allclose(combined.lower, u.lower - u.upper)
    assert np.allclose(combined.upper, u.upper - u.lower)
    assert not combined.equals(scale(0.0, u))


@given(fuzzy_numbers(), fuzzy_numbers(), scalars, scalars)
@PROPERTY
def test_scalar_laws(u, v, a, b):
    assert scale(a, add(u, v)).equals(add(scale(a, u), scale(a, v)), atol=TOL)
    assert scale(a, scale(b, u)).equals(scale(a * b, u), atol=TOL)


@given(fuzzy_numbers(), fuzzy_numbers(), st.floats(min_value=0.0, max_value=10.0))
@PROPERTY
def test_distance_matches_two_sided_eps_order(u, v, slack):
    d = metric_d(u, v)
    assert leq_eps(u, v, d + TOL) and leq_eps(v, u, d + TOL)
    if leq_eps(u, v, slack) and leq_eps(v, u, slack):
        assert d <= slack + TOL


@given(fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_eps_order_approaches_order(u, v):
    verdicts = [leq_eps(u, v, eps) for eps in (1.0, 1e-3, 1e-6, 0.0)]
    # a pass at a smaller eps implies a pass at every larger eps
    assert all(verdicts[i] or not verdicts[i + 1] for i in range(len(verdicts) - 1))
    assert verdicts[-1] == leq(u, v)


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_order_laws(u, v, w):
    low = FuzzyNumber(u.grid, np.minimum(u.lower, v.lower), np.minimum(u.upper, v.upper))
    high = FuzzyNumber(u.grid, np.maximum(u.lower, v.lower), np.maximum(u.upper, v.upper))
    # transitivity
    assert leq(low, u) and leq(u, high) and leq(low, high)
    # additivity
    assert leq(add(low, w), add(high, w))
    # cancellation, up to rounding of the sums
    if leq(add(u, w), add(v, w)):
        assert leq_eps(u, v, TOL)


@given(fuzzy_numbers(), fuzzy_numbers(), scalars)
@PROPERTY
def test_operations_preserve_validity(u, v, k):
    assert validate(add(u, v)).ok
    assert validate(scale(k, u)).ok


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
@PROPERTY
def test_order_is_additive_across_pairs(u, v, w, z):
    low_left = FuzzyNumber(u.grid, np.minimum(u.lower, v.lower), np.minimum(u.upper, v.upper))
    high_left = FuzzyNumber(u.grid, np.maximum(u.lower, v.lower), np.maximum(u.upper, v.upper))
    low_right = FuzzyNumber(w.grid, np.minimum(w.lower, z.lower), np.minimum(w.upper, z.upper))
    high_right = FuzzyNumber(w.grid, np.maximum(w.lower, z.lower), np.maximum(w.upper, z.upper))
    assert leq(low_left, high_left) and leq(low_right, high_right)
    assert leq(add(low_left, low_right), add(high_left, high_right))
    if leq(u, v) and leq(w, z):
        assert leq(add(u, w), add(v, z))
