"""Hierarchical entropy and domain interaction over cluster labelings.

Entropies are in bits. All probabilities are taken over the pixels of the
region being measured: a cluster that extends beyond a region only counts
with its pixels inside it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .hierarchy import Rect, RegionGrid, region_grid
from .segmentation import Segmentation


def entropy_bits(counts) -> float:
    """Shannon entropy (base 2) of a histogram of nonnegative counts; 0 log 0 = 0."""
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    if counts.size == 0:
        raise ValueError("entropy of an empty histogram is undefined")
    p = counts / counts.sum()
    return float(np.sum(-p * np.log2(p)))


def _check_rect(seg: Segmentation, rect: Rect) -> None:
    if rect.area <= 0:
        raise ValueError(f"region {rect} is empty")
    if rect.x0 < 0 or rect.y0 < 0 or rect.x1 > seg.width or rect.y1 > seg.height:
        raise ValueError(f"region {rect} exceeds the {seg.width}x{seg.height} labeling")


def _patch(seg: Segmentation, rect: Rect) -> np.ndarray:
    return seg.labels[rect.y0:rect.y1, rect.x0:rect.x1]


def region_entropy(seg: Segmentation, rect: Rect) -> float:
    """Entropy of the cluster-membership distribution of the pixels in ``rect``."""
    _check_rect(seg, rect)
    _, counts = np.unique(_patch(seg, rect), return_counts=True)
    return entropy_bits(counts)


def _check_children(seg: Segmentation, upper: Rect, children) -> None:
    _check_rect(seg, upper)
    if len(children) == 0:
        raise ValueError("no child regions given")
    for ch in children:
        if ch.area <= 0 or not upper.contains(ch):
            raise ValueError(f"child {ch} is empty or not inside {upper}")
    for p, q in combinations(children, 2):
        if max(p.x0, q.x0) < min(p.x1, q.x1) and max(p.y0, q.y0) < min(p.y1, q.y1):
            raise ValueError(f"children {p} and {q} overlap")
    if sum(ch.area for ch in children) != upper.area:
        raise ValueError(f"children do not cover {upper}")


def _cluster_child_counts(seg: Segmentation, children) -> dict[int, list[int]]:
    table: dict[int, list[int]] = {}
    for j, ch in enumerate(children):
        labs, counts = np.unique(_patch(seg, ch), return_counts=True)
        for lab, cnt in zip(labs.tolist(), counts.tolist()):
            table.setdefault(lab, [0] * len(children))[j] = cnt
    return table


@dataclass(frozen=True)
class StraddleSet:
    upper_region: Rect
    clusters: tuple[int, ...]


def straddle_set(seg: Segmentation, upper: Rect, children) -> StraddleSet:
    """Clusters with pixels in at least two of the child regions of ``upper``."""
    _check_children(seg, upper, children)
    table = _cluster_child_counts(seg, children)
    straddling = tuple(
        sorted(lab for lab, row in table.items() if sum(1 for c in row if c > 0) >= 2)
    )
    return StraddleSet(upper, straddling)


def domain_interaction(seg: Segmentation, upper: Rect, children) -> float:
    """Cluster-weighted entropy of the child-region distribution inside ``upper``.

    For each straddling cluster c, P(c) is its share of the upper region's
    pixels and P(child | c) the share of its upper-region pixels falling in
    each child; the result is sum_c P(c) * H(child | c). Clusters confined to
    one child contribute nothing, so this equals H(child | cluster).
    """
    _check_children(seg, upper, children)
    total = upper.area
    result = 0.0
    for row in _cluster_child_counts(seg, children).values():
        if sum(1 for c in row if c > 0) < 2:
            continue
        in_upper = sum(row)
        result += (in_upper / total) * entropy_bits(row)
    return result


@dataclass(frozen=True, eq=False)
class EntropyMap:
    """Per-region entropies of one layer at one component size.

    ``values`` has shape ``(2**n, 2**n)`` laid out like the region grid.
    """

    layer: int
    component_size: float
    values: np.ndarray
    mean: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        side = 1 << self.layer
        if v.shape != (side, side):
            raise ValueError(f"layer {self.layer} needs a {side}x{side} value array, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mean", float(v.mean()))

    def rows(self):
        """(layer, region_row, region_col, component_size, entropy) tuples."""
        side = self.values.shape[0]
        for r in range(side):
            for c in range(side):
                yield self.layer, r, c, self.component_size, float(self.values[r, c])

    def to_csv(self) -> str:
        lines = ["layer,region_row,region_col,component_size,entropy"]
        lines += [f"{n},{r},{c},{k:g},{h!r}" for n, r, c, k, h in self.rows()]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "layer": self.layer,
            "component_size": self.component_size,
            "mean": self.mean,
            "values": self.values.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def layer_entropy_map(seg: Segmentation, grid: RegionGrid) -> EntropyMap:
    """Entropy of every region of ``grid`` plus their arithmetic mean."""
    if (grid.width, grid.height) != (seg.width, seg.height):
        raise ValueError(
            f"grid is {grid.width}x{grid.height} but labeling is {seg.width}x{seg.height}"
        )
    k = seg.num_clusters
    keys = grid.pixel_region_map().astype(np.int64) * k + seg.labels
    uniq, counts = np.unique(keys, return_counts=True)
    region = uniq // k
    p = counts / grid.region_sizes().ravel()[region]
    h = np.bincount(region, weights=-p * np.log2(p), minlength=len(grid))
    return EntropyMap(grid.n, seg.component_size, h.reshape(grid.side, grid.side))


def layer_interactions(seg: Segmentation, grid: RegionGrid) -> np.ndarray:
    """Domain interaction of every region of ``grid`` with its 2x2 children.

    Returns a ``(2**n, 2**n)`` array. Layer n+1 must be legal for the image.
    """
    if (grid.width, grid.height) != (seg.width, seg.height):
        raise ValueError(
            f"grid is {grid.width}x{grid.height} but labeling is {seg.width}x{seg.height}"
        )
    finer = region_grid(grid.width, grid.height, grid.n + 1)
    child = finer.pixel_region_map()
    cr, cc = np.divmod(child, finer.side)
    upper = (cr // 2) * grid.side + cc // 2
    slot = (cr % 2) * 2 + cc % 2
    k = seg.num_clusters
    keys = ((upper.astype(np.int64) * k + seg.labels) * 4 + slot).ravel()
    uniq, n_lj = np.unique(keys, return_counts=True)
    ul = uniq // 4
    # uniq is sorted, so equal (upper, label) keys are contiguous
    starts = np.flatnonzero(np.r_[True, ul[1:] != ul[:-1]])
    n_l = np.add.reduceat(n_lj, starts)
    group = np.repeat(np.arange(len(starts)), np.diff(np.r_[starts, len(ul)]))
    region = ul // k
    p_l = n_l[group] / grid.region_sizes().ravel()[region]
    q = n_lj / n_l[group]
    terms = p_l * (-q * np.log2(q))
    out = np.bincount(region, weights=terms, minlength=len(grid))
    return out.reshape(grid.side, grid.side)
