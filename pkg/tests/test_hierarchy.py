import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hierentropy.hierarchy import (
    Rect,
    children_of,
    max_layer,
    region_grid,
    region_of_pixel,
)


@st.composite
def legal_grids(draw):
    w = draw(st.integers(1, 300))
    h = draw(st.integers(1, 300))
    n = draw(st.integers(0, max_layer(w, h)))
    return region_grid(w, h, n)


def test_layer_zero_is_whole_image():
    g = region_grid(64, 64, 0)
    assert g.rects() == [Rect(0, 0, 64, 64)]
    assert g.region_sizes().tolist() == [[4096]]


def test_finest_layer_single_pixels():
    g = region_grid(64, 64, 6)
    assert len(g) == 4096
    assert set(g.region_sizes().ravel().tolist()) == {1}


def test_non_divisible_cuts():
    g = region_grid(100, 100, 3)
    assert g.col_cuts == (0, 12, 25, 37, 50, 62, 75, 87, 100)
    assert g.row_cuts == g.col_cuts
    assert np.diff(g.col_cuts).tolist() == [12, 13, 12, 13, 12, 13, 12, 13]


def test_too_deep_layer_names_maximum():
    with pytest.raises(ValueError, match="maximum legal layer is 6"):
        region_grid(100, 80, 7)
    with pytest.raises(ValueError):
        region_grid(10, 10, -1)


def test_max_layer():
    assert max_layer(64, 64) == 6
    assert max_layer(100, 80) == 6
    assert max_layer(1, 500) == 0
    assert max_layer(127, 128) == 6


@pytest.mark.parametrize("w,h,n,x,y,expected", [
    (64, 64, 1, 0, 0, 0),
    (64, 64, 1, 63, 63, 3),
    (64, 64, 1, 32, 0, 1),
    (64, 64, 1, 0, 32, 2),
    (100, 100, 3, 12, 0, 1),
    (100, 100, 3, 11, 0, 0),
])
def test_region_of_pixel(w, h, n, x, y, expected):
    assert region_of_pixel(region_grid(w, h, n), x, y) == expected


def test_region_of_pixel_out_of_range():
    g = region_grid(8, 8, 1)
    for x, y in [(-1, 0), (8, 0), (0, 8)]:
        with pytest.raises(ValueError):
            region_of_pixel(g, x, y)


def test_children_of():
    assert children_of(region_grid(64, 64, 0), 0) == [
        Rect(0, 0, 32, 32), Rect(32, 0, 64, 32), Rect(0, 32, 32, 64), Rect(32, 32, 64, 64)]
    kids = children_of(region_grid(100, 100, 0), 0)
    assert [(r.width, r.height) for r in kids] == [(50, 50)] * 4
    assert children_of(region_grid(64, 64, 1), 3) == [
        Rect(32, 32, 48, 48), Rect(48, 32, 64, 48), Rect(32, 48, 48, 64), Rect(48, 48, 64, 64)]


def test_children_of_illegal_layer():
    with pytest.raises(ValueError):
        children_of(region_grid(4, 4, 2), 0)


@given(legal_grids())
def test_cover_and_disjoint(g):
    assert g.region_sizes().sum() == g.width * g.height
    assert g.region_sizes().min() >= 1
    rmap = g.pixel_region_map()
    counts = np.bincount(rmap.ravel(), minlength=len(g))
    assert np.array_equal(counts, g.region_sizes().ravel())
    for i, r in enumerate(g.rects()):
        assert np.all(rmap[r.y0:r.y1, r.x0:r.x1] == i)


@given(legal_grids())
def test_pixel_map_agrees_with_point_query(g):
    rmap = g.pixel_region_map()
    for x, y in [(0, 0), (g.width - 1, g.height - 1), (g.width // 2, g.height // 3)]:
        assert rmap[y, x] == region_of_pixel(g, x, y)


@given(legal_grids())
def test_nesting(g):
    if g.n + 1 > max_layer(g.width, g.height):
        return
    for i, parent in enumerate(g.rects()):
        kids = children_of(g, i)
        assert all(parent.contains(k) for k in kids)
        assert sum(k.area for k in kids) == parent.area


@given(st.integers(0, 5), st.integers(1, 6), st.integers(1, 6))
def test_divisible_dimensions_equal_regions(n, a, b):
    g = region_grid(a << n, b << n, n)
    assert len(set(g.region_sizes().ravel().tolist())) == 1


def test_numpy_integer_dimensions():
    g = region_grid(np.int64(10), np.int64(33), np.int32(3))
    assert g == region_grid(10, 33, 3)
    assert all(type(c) is int for c in g.col_cuts)
