import json
import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_half_image
from hierentropy.raster import RasterImage, gaussian_smooth
from hierentropy.segmentation import (
    Segmentation,
    build_edges,
    greater_component_size_coarsens,
    segment,
)
from hierentropy.sweep import PAPER_COMPONENT_SIZES

NEIGHBORS8 = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]


def reference_segment(px, k, min_size=0):
    """Plain-Python merge procedure, used only as an oracle."""
    h, w, _ = px.shape
    edges = []
    for y in range(h):
        for x in range(w):
            for dx, dy in ((1, 0), (0, 1), (1, 1), (1, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h:
                    d = math.sqrt(sum((float(px[y, x, c]) - float(px[ny, nx, c])) ** 2 for c in range(3)))
                    edges.append((d, len(edges), y * w + x, ny * w + nx))
    edges.sort()
    parent = list(range(h * w))
    size = [1] * (h * w)
    internal = [0.0] * (h * w)

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for d, _, a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb and d <= min(internal[ra] + k / size[ra], internal[rb] + k / size[rb]):
            parent[rb] = ra
            size[ra] += size[rb]
            internal[ra] = d
    if min_size:
        for d, _, a, b in edges:
            ra, rb = find(a), find(b)
            if ra != rb and (size[ra] < min_size or size[rb] < min_size):
                parent[rb] = ra
                size[ra] += size[rb]
    seen = {}
    return np.array([seen.setdefault(find(i), len(seen)) for i in range(h * w)]).reshape(h, w)


def threshold_components(px, threshold):
    """Connected components of the 8-grid keeping edges with weight <= threshold."""
    h, w, _ = px.shape
    lab = -np.ones((h, w), dtype=int)
    count = 0
    for sy in range(h):
        for sx in range(w):
            if lab[sy, sx] >= 0:
                continue
            lab[sy, sx] = count
            queue = deque([(sx, sy)])
            while queue:
                x, y = queue.popleft()
                for dx, dy in NEIGHBORS8:
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < w and 0 <= ny < h and lab[ny, nx] < 0:
                        if np.linalg.norm(px[y, x] - px[ny, nx]) <= threshold:
                            lab[ny, nx] = count
                            queue.append((nx, ny))
            count += 1
    return count


def is_8_connected(mask):
    ys, xs = np.nonzero(mask)
    start = (xs[0], ys[0])
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for dx, dy in NEIGHBORS8:
            p = (x + dx, y + dy)
            if p not in seen and 0 <= p[1] < mask.shape[0] and 0 <= p[0] < mask.shape[1] and mask[p[1], p[0]]:
                seen.add(p)
                queue.append(p)
    return len(seen) == len(xs)


small_images = st.builds(
    lambda seed, h, w, levels: np.random.default_rng(seed).integers(0, levels, (h, w, 3)).astype(float) * (255 // (levels - 1)),
    st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(1, 9), st.sampled_from([2, 3, 6]),
)


def test_uniform_image_single_cluster():
    img = RasterImage.filled(20, 13, (40, 80, 120))
    for k in PAPER_COMPONENT_SIZES:
        seg = segment(img, k)
        assert seg.num_clusters == 1
        assert seg.cluster_sizes.tolist() == [260]


def test_two_half_image_two_clusters():
    img = two_half_image()
    seg = segment(img, 100)
    assert seg.num_clusters == 2
    assert seg.labels[:, :4].tolist() == [[0] * 4] * 8
    assert seg.labels[:, 4:].tolist() == [[1] * 4] * 8
    # hand-evaluated predicate: crossing weight vs min(0 + 100/32, 0 + 100/32)
    crossing = math.sqrt(2 * 255**2)
    assert crossing > 100 / 32
    assert threshold_components(img.pixels, 100 / 32) == 2


def test_single_pixel():
    seg = segment(RasterImage.filled(1, 1, 9), 100)
    assert seg.num_clusters == 1
    assert seg.cluster_sizes.tolist() == [1]


def test_nonpositive_component_size_rejected():
    with pytest.raises(ValueError):
        segment(RasterImage.filled(2, 2, 0), 0)
    with pytest.raises(ValueError):
        segment(RasterImage.filled(2, 2, 0), -5)


def test_edge_construction_order():
    px = np.zeros((2, 2, 3))
    a, b, w = build_edges(px)
    # pixel 0: E, S, SE; pixel 1: S, (SE, NE out of range); pixel 2: E, NE
    assert list(zip(a.tolist(), b.tolist())) == [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (2, 1)]


def test_edge_count_8_connected():
    a, _, _ = build_edges(np.zeros((5, 7, 3)))
    h, w = 5, 7
    assert len(a) == h * (w - 1) + (h - 1) * w + 2 * (h - 1) * (w - 1)


def test_coarsening_report():
    assert tuple(greater_component_size_coarsens(RasterImage.filled(5, 5, 0), 100, 1000)) == (1, 1, True)
    assert tuple(greater_component_size_coarsens(two_half_image(), 100, 1e6)) == (2, 1, True)


def test_paper_schedule_coarsens_on_photo(photo):
    # soft regression fixture: the cluster counts on the bundled photo, recorded
    # from the first verified run; the trend is expected, not guaranteed
    counts = [segment(gaussian_smooth(photo, 2.0), k).num_clusters for k in (100, 1000, 10000)]
    assert counts == [821, 164, 37]


def test_min_size_merges_small_components():
    px = np.zeros((10, 10, 3))
    px[5, 5] = 255
    img = RasterImage(px)
    assert segment(img, 1).num_clusters == 2
    merged = segment(img, 1, min_size=2)
    assert merged.num_clusters == 1
    assert merged.min_size == 2


def test_singleton_floor():
    # all adjacent pairs differ (strictly increasing grey values)
    px = np.arange(30, dtype=float).reshape(5, 6, 1).repeat(3, axis=2) * 8
    seg = segment(RasterImage(px), 1e-6)
    assert seg.num_clusters == 30


def test_labels_first_occurrence_order():
    px = np.zeros((4, 4, 3))
    px[0, 2:] = 255
    seg = segment(RasterImage(px), 1)
    flat = seg.labels.ravel()
    firsts = [int(np.argmax(flat == lab)) for lab in range(seg.num_clusters)]
    assert firsts == sorted(firsts)


def test_from_labels_canonicalizes():
    seg = Segmentation.from_labels([[7, 7, 3], [3, 9, 9]])
    assert seg.labels.tolist() == [[0, 0, 1], [1, 2, 2]]
    assert seg.cluster_sizes.tolist() == [2, 2, 2]


def test_sidecar():
    doc = json.loads(segment(two_half_image(), 100).sidecar_json())
    assert doc == {"component_size": 100, "num_clusters": 2, "cluster_sizes": {"0": 32, "1": 32}}


@settings(max_examples=60, deadline=None)
@given(small_images, st.sampled_from([1, 50, 300, 2000]), st.sampled_from([0, 3]))
def test_matches_reference_implementation(px, k, min_size):
    seg = segment(RasterImage(px), k, min_size)
    assert np.array_equal(seg.labels, reference_segment(px, k, min_size))


@settings(max_examples=60, deadline=None)
@given(small_images, st.sampled_from([1, 50, 300, 2000]))
def test_partition_and_connectivity(px, k):
    seg = segment(RasterImage(px), k)
    assert seg.labels.shape == px.shape[:2]
    assert seg.cluster_sizes.sum() == px.shape[0] * px.shape[1]
    assert np.array_equal(np.bincount(seg.labels.ravel()), seg.cluster_sizes)
    assert seg.num_clusters == len(np.unique(seg.labels))
    for lab in range(seg.num_clusters):
        assert is_8_connected(seg.labels == lab)


def test_determinism(photo):
    crop = RasterImage(photo.pixels[:128, :128])
    first = segment(gaussian_smooth(crop, 2.0), 500)
    second = segment(gaussian_smooth(crop, 2.0), 500)
    assert first.labels.tobytes() == second.labels.tobytes()
