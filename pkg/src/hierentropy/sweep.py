"""Component-size and layer sweeps, interaction-based size selection,
persistent-region detection and the diff|C| grouping rule."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hierarchy import max_layer, region_grid
from .metrics import EntropyMap, layer_entropy_map, layer_interactions
from .raster import DEFAULT_SIGMA, RasterImage, gaussian_smooth
from .segmentation import Segmentation, segment

PAPER_COMPONENT_SIZES = (
    100, 200, 300, 400, 500, 600, 700, 800, 900,
    1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000,
)
MAX_DEFAULT_LAYER = 6
DIFF_GROUP_THRESHOLD = 500


def default_layers(width: int, height: int) -> tuple[int, ...]:
    return tuple(range(min(MAX_DEFAULT_LAYER, max_layer(width, height)) + 1))


@dataclass(frozen=True)
class InteractionCurve:
    upper_region: int
    points: tuple[tuple[float, float], ...]

    @property
    def component_sizes(self) -> list[float]:
        return [k for k, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.points]


@dataclass
class SweepReport:
    """Everything one sweep over component sizes produced.

    ``entropy`` maps ``(layer, component_size)`` to an EntropyMap;
    ``interaction`` maps ``component_size`` to the per-region interaction
    array at ``upper_layer``.
    """

    component_sizes: tuple[float, ...]
    layers: tuple[int, ...]
    upper_layer: int | None
    sigma: float
    min_size: int
    width: int
    height: int
    entropy: dict[tuple[int, float], EntropyMap] = field(default_factory=dict)
    interaction: dict[float, np.ndarray] = field(default_factory=dict)
    cluster_counts: dict[float, int] = field(default_factory=dict)

    def mean_entropy(self, layer: int) -> list[float]:
        return [self.entropy[layer, k].mean for k in self.component_sizes]

    def interaction_curves(self) -> list[InteractionCurve]:
        if self.upper_layer is None:
            return []
        n_regions = 1 << (2 * self.upper_layer)
        flat = {k: self.interaction[k].ravel() for k in self.component_sizes}
        return [
            InteractionCurve(i, tuple((k, float(flat[k][i])) for k in self.component_sizes))
            for i in range(n_regions)
        ]

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "sigma": self.sigma,
            "min_size": self.min_size,
            "component_sizes": list(self.component_sizes),
            "layers": list(self.layers),
            "upper_layer": self.upper_layer,
            "cluster_counts": [self.cluster_counts[k] for k in self.component_sizes],
            "entropy": [
                self.entropy[n, k].to_dict() for n in self.layers for k in self.component_sizes
            ],
            "interaction": [
                {"component_size": k, "values": self.interaction[k].tolist()}
                for k in self.component_sizes
                if k in self.interaction
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        """Long format: layer, region, component_size, metric_name, value.

        Image-wide rows (cluster counts, layer means) leave ``region`` empty.
        """
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["layer", "region", "component_size", "metric_name", "value"])
        for k in self.component_sizes:
            out.writerow(["", "", f"{k:g}", "num_clusters", self.cluster_counts[k]])
        for n in self.layers:
            for k in self.component_sizes:
                emap = self.entropy[n, k]
                out.writerow([n, "", f"{k:g}", "mean_entropy", repr(emap.mean)])
                for i, h in enumerate(emap.values.ravel().tolist()):
                    out.writerow([n, i, f"{k:g}", "entropy", repr(h)])
        for k in self.component_sizes:
            if k in self.interaction:
                for i, v in enumerate(self.interaction[k].ravel().tolist()):
                    out.writerow([self.upper_layer, i, f"{k:g}", "interaction", repr(v)])
        return buf.getvalue()


def _normalize_sizes(component_sizes) -> tuple[float, ...]:
    sizes = sorted(set(component_sizes))
    if not sizes:
        raise ValueError("component size list is empty")
    if sizes[0] <= 0:
        raise ValueError(f"component sizes must be positive, got {sizes[0]}")
    return tuple(sizes)


def run_sweep(
    img: RasterImage,
    component_sizes=PAPER_COMPONENT_SIZES,
    layers=None,
    upper_layer: int | None = None,
    sigma: float = DEFAULT_SIGMA,
    min_size: int = 0,
    workers: int = 1,
    on_segmentation=None,
) -> SweepReport:
    """Smooth once, segment once per component size, and evaluate every
    requested entropy layer and (optionally) the interaction at ``upper_layer``.

    ``on_segmentation(seg)`` is called with each segmentation, in
    component-size order, after the sweep finishes.
    """
    sizes = _normalize_sizes(component_sizes)
    layers = default_layers(img.width, img.height) if layers is None else tuple(sorted(set(layers)))
    grids = {n: region_grid(img.width, img.height, n) for n in layers}
    upper_grid = None
    if upper_layer is not None:
        region_grid(img.width, img.height, upper_layer + 1)  # children must be legal
        upper_grid = region_grid(img.width, img.height, upper_layer)

    smoothed = gaussian_smooth(img, sigma)

    def evaluate(k):
        seg = segment(smoothed, k, min_size)
        maps = {n: layer_entropy_map(seg, g) for n, g in grids.items()}
        inter = layer_interactions(seg, upper_grid) if upper_grid is not None else None
        return seg, maps, inter

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, sizes))
    else:
        results = [evaluate(k) for k in sizes]

    report = SweepReport(sizes, layers, upper_layer, sigma, min_size, img.width, img.height)
    for k, (seg, maps, inter) in zip(sizes, results):
        report.cluster_counts[k] = seg.num_clusters
        for n, emap in maps.items():
            report.entropy[n, k] = emap
        if inter is not None:
            report.interaction[k] = inter
        if on_segmentation is not None:
            on_segmentation(seg)
    return report


def entropy_sweep(img: RasterImage, component_sizes=PAPER_COMPONENT_SIZES, layers=None,
                  **kwargs) -> SweepReport:
    return run_sweep(img, component_sizes, layers=layers, **kwargs)


def interaction_sweep(img: RasterImage, component_sizes=PAPER_COMPONENT_SIZES,
                      upper_layer: int = 1, **kwargs) -> list[InteractionCurve]:
    """One interaction curve per region of ``upper_layer`` (2x2 subdivision)."""
    report = run_sweep(img, component_sizes, layers=(), upper_layer=upper_layer, **kwargs)
    return report.interaction_curves()


def select_component_size(curves) -> float:
    """Component size minimizing the mean interaction over ``curves``.

    Ties go to the smallest component size.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("no interaction curves given")
    axis = curves[0].component_sizes
    if not axis:
        raise ValueError("interaction curves are empty")
    for c in curves[1:]:
        if c.component_sizes != axis:
            raise ValueError("curves do not share a component-size axis")
    order = np.argsort(axis, kind="stable")
    mean = np.mean([c.values for c in curves], axis=0)[order]
    return axis[order[int(np.argmin(mean))]]


def persistent_regions(report: SweepReport, layer: int = MAX_DEFAULT_LAYER,
                       k_threshold: float = 3000, h_threshold: float = 1.0) -> list[int]:
    """Regions of ``layer`` whose entropy stays >= ``h_threshold`` at every
    swept component size >= ``k_threshold``."""
    ks = [k for k in report.component_sizes if k >= k_threshold]
    if not ks:
        raise ValueError(f"sweep has no component size >= {k_threshold}")
    if layer not in report.layers:
        raise ValueError(f"sweep did not evaluate layer {layer}")
    keep = np.ones(1 << (2 * layer), dtype=bool)
    for k in ks:
        keep &= report.entropy[layer, k].values.ravel() >= h_threshold
    return np.flatnonzero(keep).tolist()


def diff_component_size(k_selected: float, k_human: float) -> tuple[float, str]:
    """``(|k_selected - k_human|, group)``; group ``"a"`` iff the gap is below 500."""
    if k_selected <= 0 or k_human <= 0:
        raise ValueError("component sizes must be positive")
    diff = abs(k_selected - k_human)
    return diff, ("a" if diff < DIFF_GROUP_THRESHOLD else "b")


def segment_sizes(img: RasterImage, component_sizes, sigma: float = DEFAULT_SIGMA,
                  min_size: int = 0) -> list[Segmentation]:
    """Segment the smoothed image at each size (no metrics)."""
    smoothed = gaussian_smooth(img, sigma)
    return [segment(smoothed, k, min_size) for k in _normalize_sizes(component_sizes)]
