"""Hierarchical entropy and domain interaction for image structure analysis."""

from .hierarchy import Rect, RegionGrid, children_of, region_grid, region_of_pixel
from .metrics import (
    EntropyMap,
    StraddleSet,
    domain_interaction,
    layer_entropy_map,
    layer_interactions,
    region_entropy,
    straddle_set,
)
from .raster import DecodeError, RasterImage, gaussian_smooth, load_image, save_image
from .segmentation import Segmentation, greater_component_size_coarsens, segment
from .sweep import (
    PAPER_COMPONENT_SIZES,
    InteractionCurve,
    SweepReport,
    diff_component_size,
    entropy_sweep,
    interaction_sweep,
    persistent_regions,
    run_sweep,
    select_component_size,
)

__version__ = "0.1.0"
