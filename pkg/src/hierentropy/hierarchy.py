"""Layered 2^n x 2^n region grids over the pixel plane."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Rect(NamedTuple):
    """Half-open pixel rectangle ``[x0, x1) x [y0, y1)``."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, other: Rect) -> bool:
        return (
            self.x0 <= other.x0 and other.x1 <= self.x1
            and self.y0 <= other.y0 and other.y1 <= self.y1
        )


def max_layer(width: int, height: int) -> int:
    """Largest n with 2**n <= min(width, height)."""
    width, height = int(width), int(height)
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    return min(width, height).bit_length() - 1


def _cuts(length: int, parts: int) -> tuple[int, ...]:
    return tuple(i * length // parts for i in range(parts + 1))


@dataclass(frozen=True)
class RegionGrid:
    """Layer n: the image split into 2**n x 2**n rectangles by floor cuts.

    Regions are indexed row-major: index = row * 2**n + col.
    """

    n: int
    width: int
    height: int
    col_cuts: tuple[int, ...]
    row_cuts: tuple[int, ...]

    @property
    def side(self) -> int:
        return 1 << self.n

    @property
    def rows(self) -> int:
        return self.side

    @property
    def cols(self) -> int:
        return self.side

    def __len__(self) -> int:
        return self.side * self.side

    def rect(self, index: int) -> Rect:
        if not 0 <= index < len(self):
            raise IndexError(f"region {index} out of range for layer {self.n}")
        r, c = divmod(index, self.side)
        return Rect(self.col_cuts[c], self.row_cuts[r], self.col_cuts[c + 1], self.row_cuts[r + 1])

    def rects(self) -> list[Rect]:
        return [self.rect(i) for i in range(len(self))]

    def region_sizes(self) -> np.ndarray:
        """Pixel count of every region, row-major, shape ``(side, side)``."""
        return np.outer(np.diff(self.row_cuts), np.diff(self.col_cuts))

    def pixel_region_map(self) -> np.ndarray:
        """Region index of every pixel, shape ``(height, width)``."""
        col_of = np.searchsorted(self.col_cuts, np.arange(self.width), side="right") - 1
        row_of = np.searchsorted(self.row_cuts, np.arange(self.height), side="right") - 1
        return row_of[:, None] * self.side + col_of[None, :]


def region_grid(width: int, height: int, n: int) -> RegionGrid:
    """Balanced floor-cut partition: cut i along an axis of length L is i*L // 2**n."""
    width, height, n = int(width), int(height), int(n)
    if n < 0:
        raise ValueError(f"layer index must be nonnegative, got {n}")
    top = max_layer(width, height)
    if n > top:
        raise ValueError(
            f"layer {n} needs 2**{n} <= min(width, height) = {min(width, height)}; "
            f"maximum legal layer is {top}"
        )
    side = 1 << n
    return RegionGrid(n, width, height, _cuts(width, side), _cuts(height, side))


def region_of_pixel(grid: RegionGrid, x: int, y: int) -> int:
    if not (0 <= x < grid.width and 0 <= y < grid.height):
        raise ValueError(f"pixel ({x}, {y}) outside {grid.width}x{grid.height} image")
    c = bisect.bisect_right(grid.col_cuts, x) - 1
    r = bisect.bisect_right(grid.row_cuts, y) - 1
    return r * grid.side + c


def child_indices(grid: RegionGrid, index: int) -> list[int]:
    """Indices at layer n+1 of the four children of region ``index`` (TL, TR, BL, BR)."""
    r, c = divmod(index, grid.side)
    side = 2 * grid.side
    return [(2 * r + dr) * side + 2 * c + dc for dr in (0, 1) for dc in (0, 1)]


def children_of(grid: RegionGrid, index: int) -> list[Rect]:
    """The four layer-(n+1) rectangles tiling region ``index`` of ``grid``.

    Floor cuts nest (i*L // 2**n == 2i*L // 2**(n+1)), so the children tile
    the parent exactly.
    """
    finer = region_grid(grid.width, grid.height, grid.n + 1)
    return [finer.rect(j) for j in child_indices(grid, index)]
