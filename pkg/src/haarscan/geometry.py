"""Axis-aligned integer rectangles and box overlap measures."""

from __future__ import annotations

import math
from dataclasses import dataclass


def round_half_up(v: float) -> int:
    """Round to nearest integer, halves away from zero for v >= 0.

    The single rounding rule used everywhere coordinates are scaled, so
    that every code path (and every reimplementation of it) agrees.
    """
    return math.floor(v + 0.5)


@dataclass(frozen=True)
class Rect:
    """x/y offset plus positive width/height, in pixels."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"rect extents must be positive, got {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"rect offsets must be non-negative, got ({self.x}, {self.y})")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def contains(self, other: "Rect") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x2 <= self.x2 and other.y2 <= self.y2)

    def clamped(self, width: int, height: int) -> "Rect":
        """Clip to a width x height frame, keeping extents >= 1."""
        x = min(max(self.x, 0), width - 1)
        y = min(max(self.y, 0), height - 1)
        w = max(1, min(self.w, width - x))
        h = max(1, min(self.h, height - y))
        return Rect(x, y, w, h)


def intersection_area(a: Rect, b: Rect) -> int:
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0
    return iw * ih


def iou(a: Rect, b: Rect) -> float:
    """Intersection over union; 0.0 for disjoint boxes."""
    inter = intersection_area(a, b)
    if inter == 0:
        return 0.0
    return inter / float(a.area + b.area - inter)
