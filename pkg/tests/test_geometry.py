import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from formda.geometry import (
    L1,
    Ball,
    Box,
    IndicatorOf,
    Simplex,
    Unbounded,
    Zero,
    contains,
    max_norm,
    project,
    prox,
    simplex_project,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def vectors(n):
    return arrays(np.float64, n, elements=finite)


# Frozen values from exact rational KKT enumeration over simplex supports,
# cross-checked on a 2001-point grid.
SIMPLEX_05_05_10 = np.array([1 / 6, 1 / 6, 2 / 3])
SIMPLEX_02_09_09 = np.array([0.0, 0.5, 0.5])
# 1-D grid minimizer of |z| + (z - 0.9)^2 on [0, 1] at spacing 1e-6.
L1_BOX_AT_09 = 0.4


def test_box_interior_fixed():
    assert np.array_equal(project(Box([0, 0], [1, 1]), [0.5, 0.5]), [0.5, 0.5])


def test_ball_radial_scaling():
    np.testing.assert_allclose(project(Ball(np.zeros(2), 1.0), [3.0, 4.0]), [0.6, 0.8], atol=1e-15)


def test_simplex_examples():
    np.testing.assert_allclose(project(Simplex(3), [0.5, 0.5, 1.0]), SIMPLEX_05_05_10, atol=1e-15)
    np.testing.assert_allclose(simplex_project(3, [0.2, 0.9, 0.9]), SIMPLEX_02_09_09, atol=1e-15)
    assert np.array_equal(simplex_project(3, [1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(simplex_project(3, np.full(3, 1 / 3)), np.full(3, 1 / 3), atol=1e-15)


def test_unbounded_returns_input():
    p = np.array([1e6, -3.0])
    assert np.array_equal(project(Unbounded(2, 5.0), p), p)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        project(Box([0, 0], [1, 1]), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        prox(Zero(), Simplex(2), 1.0, [1.0])


def test_set_invariants():
    with pytest.raises(ValueError):
        Box([1.0], [0.0])
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)
    with pytest.raises(ValueError):
        Simplex(0)
    with pytest.raises(ValueError):
        L1(-0.1)


def test_prox_examples():
    assert np.array_equal(prox(Zero(), Box([-1], [1]), 1.0, [2.0]), [1.0])
    assert np.array_equal(prox(L1(1.0), Unbounded(1), 1.0, [2.5]), [1.5])
    np.testing.assert_allclose(prox(L1(1.0), Box([0], [1]), 2.0, [0.9]), [L1_BOX_AT_09], atol=1e-15)


def test_prox_rejects_nonpositive_stepsize():
    for t in (0.0, -1.0):
        with pytest.raises(ValueError):
            prox(Zero(), Box([0], [1]), t, [0.5])


def test_prox_indicator():
    outer = Box([-2, -2], [2, 2])
    inner = Box([0, -1], [1, 1])
    np.testing.assert_array_equal(prox(IndicatorOf(inner), outer, 3.0, [5.0, -5.0]), [1.0, -1.0])
    np.testing.assert_array_equal(prox(IndicatorOf(Simplex(2)), Unbounded(2), 1.0, [1.0, 1.0]), [0.5, 0.5])


def test_l1_full_shrinkage():
    z = prox(L1(10.0), Unbounded(3), 1.0, [0.3, -2.0, 9.9])
    assert np.array_equal(z, np.zeros(3))


def test_max_norm():
    assert max_norm(Box.cube(2, 2.0)) == pytest.approx(2 * np.sqrt(2))
    assert max_norm(Simplex(4)) == 1.0
    assert max_norm(Ball([3.0, 4.0], 1.0)) == pytest.approx(6.0)


def _sets(d):
    return [Box(-np.arange(1, d + 1, dtype=float), np.linspace(0.5, 2, d)), Ball(np.linspace(-1, 1, d), 1.5),
            Simplex(d), Unbounded(d)]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(vectors(d), vectors(d), vectors(d))))
def test_projection_invariants(abz):
    a, b, z = abz
    for s in _sets(a.size):
        pa, pb = project(s, a), project(s, b)
        assert contains(s, pa, 1e-9)
        np.testing.assert_allclose(project(s, pa), pa, rtol=1e-12, atol=1e-12)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) * (1 + 1e-12) + 1e-12
        zz = project(s, z)
        assert np.dot(a - pa, zz - pa) <= 1e-10 * max(1.0, np.linalg.norm(a) * np.linalg.norm(zz - pa))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(vectors(d), vectors(d))),
       st.floats(0.01, 100), st.floats(0, 5))
def test_prox_invariants(ab, t, w):
    a, b = ab
    s = Box.cube(a.size, 3.0)
    assert np.array_equal(prox(Zero(), s, t, a), project(s, a))
    pa, pb = prox(L1(w), s, t, a), prox(L1(w), s, t, b)
    assert np.dot(pa - pb, pa - pb) <= np.dot(pa - pb, a - b) + 1e-10


def test_l1_box_prox_matches_grid_minimizer():
    rng = np.random.default_rng(3)
    grid = np.linspace(-1, 2, 300001)
    for _ in range(20):
        p, t, w = rng.uniform(-2, 3), rng.uniform(0.2, 5), rng.uniform(0, 2)
        f = w * np.abs(grid) + 0.5 * t * (grid - p) ** 2
        assert prox(L1(w), Box([-1], [2]), t, [p])[0] == pytest.approx(grid[f.argmin()], abs=2e-5)
