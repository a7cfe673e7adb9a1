"""Command-line entry point: ``hierentropy {segment,entropy,interaction,autotune}``.

Output files are named ``{stem}.{command}.{layer}.{component_size}.{ext}``;
``na`` stands in for the layer of whole-image artifacts and ``sweep`` for
the component size of artifacts spanning every swept size.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import render
from .hierarchy import max_layer, region_grid
from .raster import DEFAULT_SIGMA, load_image, save_image
from .sweep import (
    PAPER_COMPONENT_SIZES,
    default_layers,
    run_sweep,
    segment_sizes,
    select_component_size,
)

FORMATS = ("csv", "json", "png", "svg")


def _number(text: str):
    v = float(text)
    return int(v) if v.is_integer() else v


def _number_list(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _formats(text: str) -> list[str]:
    fmts = [t.strip() for t in text.split(",") if t.strip()]
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise ValueError(f"unknown format(s) {bad}; choose from {', '.join(FORMATS)}")
    return fmts


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _inputs(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# config key -> parser for key=value files
CONFIG_KEYS = {
    "input": _inputs,
    "sigma": float,
    "component_sizes": _number_list,
    "layers": _int_list,
    "upper_layer": int,
    "min_size": int,
    "out_dir": str,
    "format": _formats,
    "emit_labels": _bool,
    "workers": int,
}


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    sigma: float = DEFAULT_SIGMA
    component_sizes: list = field(default_factory=lambda: list(PAPER_COMPONENT_SIZES))
    layers: list[int] | None = None
    upper_layer: int = 1
    min_size: int = 0
    out_dir: str = "."
    formats: list[str] = field(default_factory=lambda: list(FORMATS))
    emit_labels: bool = False
    workers: int = 1

    def validate(self) -> None:
        if not self.inputs:
            raise ValueError("no input image given (--input)")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if not self.component_sizes:
            raise ValueError("component size list is empty")
        if any(not k > 0 for k in self.component_sizes):
            raise ValueError("component sizes must be positive")
        if self.layers is not None and (not self.layers or min(self.layers) < 0):
            raise ValueError("layers must be a nonempty list of nonnegative integers")
        if self.upper_layer < 0:
            raise ValueError("upper layer must be nonnegative")
        if self.min_size < 0:
            raise ValueError("min size must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


def read_config(path) -> dict:
    """Parse a ``key=value`` file; keys may use dashes or underscores."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-").replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: cannot parse {raw.strip()!r}")
            values[key] = CONFIG_KEYS[key](value.strip())
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    given = dict(read_config(args.config)) if getattr(args, "config", None) else {}
    # flags win over the config file
    for key in CONFIG_KEYS:
        if key in vars(args):
            given[key] = getattr(args, key)
    cfg = RunConfig()
    if "input" in given:
        cfg.inputs = list(given.pop("input"))
    if "format" in given:
        cfg.formats = list(given.pop("format"))
    for key, value in given.items():
        setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _argtype(fn):
    def wrapped(text):
        try:
            return fn(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    wrapped.__name__ = fn.__name__.lstrip("_")
    return wrapped


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--input", action="extend", type=_argtype(_inputs), default=S,
                   help="input image(s); repeat or comma-separate")
    p.add_argument("--sigma", type=float, default=S, help=f"Gaussian sigma (default {DEFAULT_SIGMA})")
    p.add_argument("--component-sizes", dest="component_sizes", type=_argtype(_number_list),
                   default=S, help="comma-separated component sizes (default: the 19-value schedule)")
    p.add_argument("--layers", type=_argtype(_int_list), default=S,
                   help="comma-separated layers (default 0..6 clipped to the image)")
    p.add_argument("--upper-layer", dest="upper_layer", type=int, default=S,
                   help="layer whose regions are split 2x2 for interaction (default 1)")
    p.add_argument("--min-size", dest="min_size", type=int, default=S,
                   help="force-merge components smaller than this (default 0, off)")
    p.add_argument("--out-dir", dest="out_dir", default=S, help="output directory (default .)")
    p.add_argument("--format", type=_argtype(_formats), default=S,
                   help="comma-separated subset of csv,json,png,svg (default all)")
    p.add_argument("--emit-labels", dest="emit_labels", action="store_true", default=S,
                   help="autotune: also write the label map at the selected size")
    p.add_argument("--workers", type=int, default=S, help="threads across component sizes")
    p.add_argument("--config", default=None, help="key=value file mirroring the flags")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierentropy",
        description="Hierarchical entropy and domain interaction of image segmentations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("segment", "write a label map and sidecar JSON per component size"),
        ("entropy", "per-region entropy heatmaps and tables per layer and component size"),
        ("interaction", "domain-interaction curves over component sizes"),
        ("autotune", "select the component size minimizing mean domain interaction"),
    ):
        _add_common(sub.add_parser(name, help=text, description=text))
    return parser


def _name(cfg: RunConfig, stem: str, command: str, layer, k, ext: str) -> str:
    k = f"{k:g}" if isinstance(k, (int, float)) else k
    return os.path.join(cfg.out_dir, f"{stem}.{command}.{layer}.{k}.{ext}")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_labels(cfg, stem, command, seg) -> None:
    if "png" in cfg.formats:
        save_image(render.render_label_map(seg), _name(cfg, stem, command, "na", seg.component_size, "png"))
    if "json" in cfg.formats:
        _write_text(_name(cfg, stem, command, "na", seg.component_size, "json"), seg.sidecar_json())


def _check_layers(cfg: RunConfig, img, need_upper: bool) -> tuple[int, ...]:
    layers = tuple(cfg.layers) if cfg.layers is not None else default_layers(img.width, img.height)
    for n in layers:
        region_grid(img.width, img.height, n)
    if need_upper and cfg.upper_layer + 1 > max_layer(img.width, img.height):
        raise ValueError(
            f"upper layer {cfg.upper_layer} needs layer {cfg.upper_layer + 1}, beyond the "
            f"maximum legal layer {max_layer(img.width, img.height)} for this image"
        )
    return layers


def cmd_segment(cfg: RunConfig, img, stem: str) -> None:
    for seg in segment_sizes(img, cfg.component_sizes, cfg.sigma, cfg.min_size):
        _write_labels(cfg, stem, "segment", seg)


def cmd_entropy(cfg: RunConfig, img, stem: str) -> None:
    layers = _check_layers(cfg, img, need_upper=False)
    report = run_sweep(img, cfg.component_sizes, layers=layers, upper_layer=None,
                       sigma=cfg.sigma, min_size=cfg.min_size, workers=cfg.workers)
    for n in layers:
        grid = region_grid(img.width, img.height, n)
        # one scale per layer so panels across component sizes compare directly
        top = max(float(report.entropy[n, k].values.max()) for k in report.component_sizes)
        for k in report.component_sizes:
            emap = report.entropy[n, k]
            if "csv" in cfg.formats:
                _write_text(_name(cfg, stem, "entropy", n, k, "csv"), emap.to_csv())
            if "json" in cfg.formats:
                _write_text(_name(cfg, stem, "entropy", n, k, "json"), emap.to_json())
            if "png" in cfg.formats:
                rgb, legend = render.render_entropy_heatmap(emap, grid, scale=(0.0, top))
                save_image(rgb, _name(cfg, stem, "entropy", n, k, "png"))
                _write_text(_name(cfg, stem, "entropy", n, k, "legend.json"), render.legend_json(legend))
    if "csv" in cfg.formats:
        _write_text(_name(cfg, stem, "entropy", "na", "sweep", "csv"), report.to_csv())
    if "json" in cfg.formats:
        _write_text(_name(cfg, stem, "entropy", "na", "sweep", "json"), report.to_json())
    if "svg" in cfg.formats:
        series = [(f"layer {n}", list(zip(report.component_sizes, report.mean_entropy(n))))
                  for n in layers]
        svg = render.render_curve(series, title=f"{stem}: mean entropy", y_label="entropy [bits]")
        _write_text(_name(cfg, stem, "entropy", "na", "sweep", "svg"), svg)


def _interaction_report(cfg: RunConfig, img):
    _check_layers(cfg, img, need_upper=True)
    return run_sweep(img, cfg.component_sizes, layers=(), upper_layer=cfg.upper_layer,
                     sigma=cfg.sigma, min_size=cfg.min_size, workers=cfg.workers)


def cmd_interaction(cfg: RunConfig, img, stem: str) -> None:
    report = _interaction_report(cfg, img)
    curves = report.interaction_curves()
    u = cfg.upper_layer
    if "csv" in cfg.formats:
        lines = ["upper_layer,region,component_size,interaction"]
        lines += [f"{u},{c.upper_region},{k:g},{v!r}" for c in curves for k, v in c.points]
        _write_text(_name(cfg, stem, "interaction", u, "sweep", "csv"), "\n".join(lines) + "\n")
    if "json" in cfg.formats:
        doc = {
            "upper_layer": u,
            "component_sizes": list(report.component_sizes),
            "cluster_counts": [report.cluster_counts[k] for k in report.component_sizes],
            "curves": [{"region": c.upper_region, "values": c.values} for c in curves],
        }
        _write_text(_name(cfg, stem, "interaction", u, "sweep", "json"), json.dumps(doc, indent=2))
    if "svg" in cfg.formats:
        series = [(f"S{c.upper_region}", c.points) for c in curves]
        svg = render.render_curve(series, title=f"{stem}: domain interaction (layer {u})",
                                  y_label="interaction [bits]")
        _write_text(_name(cfg, stem, "interaction", u, "sweep", "svg"), svg)


def cmd_autotune(cfg: RunConfig, img, stem: str) -> float:
    report = _interaction_report(cfg, img)
    curves = report.interaction_curves()
    best = select_component_size(curves)
    mean = np.mean([c.values for c in curves], axis=0)
    print(f"{stem}\t{best:g}")
    doc = {
        "input": stem,
        "upper_layer": cfg.upper_layer,
        "selected_component_size": best,
        "component_sizes": list(report.component_sizes),
        "mean_interaction": mean.tolist(),
    }
    _write_text(_name(cfg, stem, "autotune", cfg.upper_layer, best, "json"), json.dumps(doc, indent=2))
    if cfg.emit_labels:
        (seg,) = segment_sizes(img, [best], cfg.sigma, cfg.min_size)
        _write_labels(cfg, stem, "autotune", seg)
    return best


COMMANDS = {
    "segment": cmd_segment,
    "entropy": cmd_entropy,
    "interaction": cmd_interaction,
    "autotune": cmd_autotune,
}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        jobs = [(load_image(p), os.path.splitext(os.path.basename(p))[0]) for p in cfg.inputs]
        if args.command != "segment":
            for img, _ in jobs:
                _check_layers(cfg, img, need_upper=args.command != "entropy")
        os.makedirs(cfg.out_dir, exist_ok=True)
        for img, stem in jobs:
            COMMANDS[args.command](cfg, img, stem)
    except (OSError, ValueError) as exc:
        print(f"hierentropy {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
