"""Graph-based segmentation (Felzenszwalb-Huttenlocher style) on the pixel grid.

The grid graph is 8-connected. Edges are generated in row-major pixel order
with the neighbour order E, S, SE, NE, and that construction index is the
tie-break of the stable weight sort, so results are bit-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .raster import RasterImage

# (dx, dy) in construction order
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))


@dataclass(frozen=True, eq=False)
class Segmentation:
    """Per-pixel cluster labels for one component size.

    ``labels`` has shape ``(height, width)`` and holds canonical labels
    ``0..num_clusters-1`` numbered by first occurrence in row-major order;
    ``cluster_sizes[l]`` is the pixel count of cluster ``l``.
    """

    labels: np.ndarray
    cluster_sizes: np.ndarray
    component_size: float
    min_size: int = 0

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def num_clusters(self) -> int:
        return len(self.cluster_sizes)

    @classmethod
    def from_labels(cls, labels, component_size: float = 0.0, min_size: int = 0) -> Segmentation:
        """Build a Segmentation from an arbitrary integer label map.

        Labels are canonicalized; connectivity is not checked, which makes this
        the entry point for synthetic labelings in tests and tools.
        """
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.size == 0:
            raise ValueError("labels must be a nonempty 2-D array")
        canon, sizes = canonicalize(labels.ravel())
        canon = canon.reshape(labels.shape)
        canon.setflags(write=False)
        sizes.setflags(write=False)
        return cls(canon, sizes, component_size, min_size)

    def sidecar(self) -> dict:
        return {
            "component_size": self.component_size,
            "num_clusters": self.num_clusters,
            "cluster_sizes": {str(i): int(n) for i, n in enumerate(self.cluster_sizes)},
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2)


class CoarseningReport(NamedTuple):
    clusters_small_k: int
    clusters_large_k: int
    coarsens: bool


def canonicalize(flat_labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Renumber labels 0..K-1 by first occurrence; return (labels, sizes)."""
    uniq, first, inverse, counts = np.unique(
        flat_labels, return_index=True, return_inverse=True, return_counts=True
    )
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inverse.ravel()].astype(np.int64), counts[order].astype(np.int64)


def build_edges(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (a, b, w) for the 8-connected grid in construction order.

    ``w`` is the Euclidean distance between the RGB triples of pixels a and b.
    """
    h, w = pixels.shape[:2]
    ys, xs = np.mgrid[0:h, 0:w]
    src = (ys * w + xs).ravel()
    a_parts, b_parts, valid_parts = [], [], []
    for dx, dy in NEIGHBOR_OFFSETS:
        nx, ny = xs + dx, ys + dy
        valid = ((nx >= 0) & (nx < w) & (ny >= 0) & (ny < h)).ravel()
        a_parts.append(src)
        b_parts.append((ny * w + nx).ravel())
        valid_parts.append(valid)
    # interleave so that edges of pixel p precede those of p+1
    a = np.stack(a_parts, axis=1).ravel()
    b = np.stack(b_parts, axis=1).ravel()
    keep = np.stack(valid_parts, axis=1).ravel()
    a, b = a[keep], b[keep]
    flat = pixels.reshape(-1, 3)
    weights = np.sqrt(np.sum((flat[a] - flat[b]) ** 2, axis=1))
    return a.astype(np.int64), b.astype(np.int64), weights


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True, nogil=True)
def _union(parent, rank, size, ra, rb):
    if rank[ra] < rank[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    if rank[ra] == rank[rb]:
        rank[ra] += 1
    return ra


@numba.njit(cache=True, nogil=True)
def _segment_graph(n, a, b, w, k, min_size):
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    internal = np.zeros(n, dtype=np.float64)
    for e in range(len(w)):
        ra = _find(parent, a[e])
        rb = _find(parent, b[e])
        if ra == rb:
            continue
        we = w[e]
        if we <= internal[ra] + k / size[ra] and we <= internal[rb] + k / size[rb]:
            r = _union(parent, rank, size, ra, rb)
            # edges arrive in ascending order, so we is the new maximum
            internal[r] = we
    if min_size > 0:
        for e in range(len(w)):
            ra = _find(parent, a[e])
            rb = _find(parent, b[e])
            if ra != rb and (size[ra] < min_size or size[rb] < min_size):
                _union(parent, rank, size, ra, rb)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _find(parent, i)
    return out


def segment(img: RasterImage, component_size: float, min_size: int = 0) -> Segmentation:
    """Segment ``img`` with merge parameter ``component_size`` (k).

    Components C1, C2 joined by an edge of weight w merge iff
    ``w <= min(Int(C1) + k/|C1|, Int(C2) + k/|C2|)``. With ``min_size > 0`` a
    second pass over the sorted edges forces merges of undersized components.
    """
    if not component_size > 0:
        raise ValueError(f"component_size must be positive, got {component_size}")
    if min_size < 0:
        raise ValueError(f"min_size must be nonnegative, got {min_size}")
    a, b, w = build_edges(img.pixels)
    order = np.argsort(w, kind="stable")
    roots = _segment_graph(
        img.width * img.height, a[order], b[order], w[order], float(component_size), int(min_size)
    )
    labels, sizes = canonicalize(roots)
    labels = labels.reshape(img.height, img.width)
    labels.setflags(write=False)
    sizes.setflags(write=False)
    return Segmentation(labels, sizes, component_size, int(min_size))


def greater_component_size_coarsens(
    img: RasterImage, k_small: float, k_large: float, min_size: int = 0
) -> CoarseningReport:
    """Diagnostic: does the larger component size give no more clusters?

    Not a guarantee of the algorithm, only the typical behaviour.
    """
    if not k_small < k_large:
        raise ValueError("expected k_small < k_large")
    n1 = segment(img, k_small, min_size).num_clusters
    n2 = segment(img, k_large, min_size).num_clusters
    return CoarseningReport(n1, n2, n2 <= n1)
