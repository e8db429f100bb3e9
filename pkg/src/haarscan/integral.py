"""Integral images (summed-area tables) and constant-time rectangle sums."""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import OutOfBounds
from .geometry import Rect
from .image import GrayImage


class IntegralImage:
    """Zero-padded summed-area table.

    ``table`` has shape (src_h + 1, src_w + 1) in uint64; the first row
    and column are zero and entry [y, x] is the sum of source values
    (squared values for kind='squared') over [0, x) x [0, y).
    """

    __slots__ = ("table", "kind")

    def __init__(self, table: np.ndarray, kind: str = "plain"):
        if kind not in ("plain", "squared"):
            raise ValueError(f"kind must be 'plain' or 'squared', got {kind!r}")
        table = np.ascontiguousarray(table, dtype=np.uint64)
        table.setflags(write=False)
        self.table = table
        self.kind = kind

    @property
    def width(self) -> int:
        return self.table.shape[1]

    @property
    def height(self) -> int:
        return self.table.shape[0]

    @property
    def source_width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def source_height(self) -> int:
        return self.table.shape[0] - 1


def integral(img: GrayImage) -> IntegralImage:
    """Summed-area table of pixel values (single exact-integer pass)."""
    ii, _ = backend.kernels.integral_pair(img.pixels)
    return IntegralImage(ii, "plain")


def squared_integral(img: GrayImage) -> IntegralImage:
    """Summed-area table of squared pixel values."""
    _, sq = backend.kernels.integral_pair(img.pixels)
    return IntegralImage(sq, "squared")


def integral_images(img: GrayImage) -> tuple[IntegralImage, IntegralImage]:
    """Both tables from one pass over the pixels."""
    ii, sq = backend.kernels.integral_pair(img.pixels)
    return IntegralImage(ii, "plain"), IntegralImage(sq, "squared")


def rect_sum(ii: IntegralImage, r: Rect) -> int:
    """Exact sum of source values inside ``r`` via the four-corner identity."""
    if r.x2 > ii.source_width or r.y2 > ii.source_height:
        raise OutOfBounds(
            f"rect {r} exceeds source bounds "
            f"{ii.source_width}x{ii.source_height}")
    t = ii.table
    return int((t[r.y, r.x] + t[r.y2, r.x2]) - (t[r.y, r.x2] + t[r.y2, r.x]))
