"""Geometry primitives, metrics, grids, and stream determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppclust import core


class TestDistance:
    def test_euclidean_3_4_5(self):
        w = core.box((0, 10), (0, 10), metric="euclidean")
        assert core.distance((0, 0), (3, 4), w) == pytest.approx(5.0)

    def test_periodic_wraparound(self):
        w = core.box((0, 10), (0, 10), metric="periodic")
        assert core.distance((0.1, 0.1), (9.9, 0.1), w) == pytest.approx(0.2)

    def test_identity(self):
        w = core.cube(5.0, 3)
        assert core.distance((1, 2, 3), (1, 2, 3), w) == 0.0

    def test_dimension_mismatch(self):
        w = core.cube(1.0, 2)
        with pytest.raises(ValueError):
            core.distance((0.1, 0.1, 0.1), (0.2, 0.2, 0.2), w)


coords2 = st.tuples(
    st.floats(0, 10, allow_nan=False, width=32),
    st.floats(0, 10, allow_nan=False, width=32),
).map(lambda t: np.array(t, float) * (1 - 1e-7))


@settings(max_examples=200, deadline=None)
@given(a=coords2, b=coords2, c=coords2)
def test_distance_metric_properties(a, b, c):
    for metric in ("euclidean", "periodic"):
        w = core.box((0, 10), (0, 10), metric=metric)
        dab = core.distance(a, b, w)
        dba = core.distance(b, a, w)
        assert dab == pytest.approx(dba, abs=1e-12)
        dac = core.distance(a, c, w)
        dcb = core.distance(c, b, w)
        assert dab <= dac + dcb + 1e-9
    we = core.box((0, 10), (0, 10), metric="euclidean")
    wp = core.box((0, 10), (0, 10), metric="periodic")
    assert core.distance(a, b, wp) <= core.distance(a, b, we) + 1e-12


class TestVolume:
    def test_square(self):
        assert core.volume(core.cube(10.0, 2)) == pytest.approx(100.0)

    def test_unit_cube(self):
        assert core.volume(core.cube(1.0, 3)) == pytest.approx(1.0)

    def test_centered_square(self):
        assert core.volume(core.box((-2, 2), (-2, 2))) == pytest.approx(16.0)


class TestUnitBallVolume:
    def test_d1(self):
        assert core.unit_ball_volume(1) == pytest.approx(2.0)

    def test_d2(self):
        assert core.unit_ball_volume(2) == pytest.approx(math.pi)

    def test_d3(self):
        assert core.unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            core.unit_ball_volume(0)


class TestGridCenters:
    def test_2x2(self):
        got = core.grid_centers(core.cube(2.0, 2), 2)
        expected = {(0.5, 0.5), (0.5, 1.5), (1.5, 0.5), (1.5, 1.5)}
        assert {tuple(p) for p in got} == expected

    def test_single_cell_1d(self):
        got = core.grid_centers(core.cube(1.0, 1), 1)
        assert got.shape == (1, 1)
        assert got[0, 0] == pytest.approx(0.5)

    def test_1d_three_cells(self):
        got = core.grid_centers(core.cube(3.0, 1), 3)
        assert np.allclose(got[:, 0], [0.5, 1.5, 2.5])

    def test_row_major_order(self):
        got = core.grid_centers(core.cube(2.0, 2), 2)
        # Last axis varies fastest.
        assert np.allclose(got, [[0.5, 0.5], [0.5, 1.5], [1.5, 0.5], [1.5, 1.5]])

    def test_cell_cap(self):
        with pytest.raises(ValueError):
            core.grid_centers(core.cube(1.0, 8), 100)


class TestWindow:
    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            core.box((0, 0), (1, 2))

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            core.cube(1.0, 9)

    def test_half_open_membership(self):
        w = core.cube(1.0, 2)
        assert w.contains(np.array([[0.0, 0.0]]))[0]
        assert not w.contains(np.array([[1.0, 0.5]]))[0]

    def test_pattern_rejects_outside_points(self):
        w = core.cube(1.0, 2)
        with pytest.raises(ValueError):
            core.PointPattern(w, np.array([[1.5, 0.5]]))


class TestRandomStream:
    def test_derive_is_pure(self):
        s = core.RandomStream(12345)
        a = s.derive(7).generator().random(16)
        b = s.derive(7).generator().random(16)
        assert np.array_equal(a, b)

    def test_distinct_paths_differ(self):
        s = core.RandomStream(12345)
        a = s.derive(0).generator().random(16)
        b = s.derive(1).generator().random(16)
        assert not np.array_equal(a, b)

    def test_nested_derivation_independent_of_order(self):
        s = core.RandomStream(99)
        direct = core.RandomStream(99, (3, 5))
        derived = s.derive(3).derive(5)
        assert np.array_equal(
            direct.generator().random(8), derived.generator().random(8)
        )

    def test_derive_function_matches_method(self):
        s = core.RandomStream(1)
        assert core.derive(s, 4) == s.derive(4)


def test_sort_points_lexicographic():
    pts = np.array([[2.0, 1.0], [1.0, 5.0], [1.0, 2.0]])
    out = core.sort_points(pts)
    assert np.allclose(out, [[1.0, 2.0], [1.0, 5.0], [2.0, 1.0]])
