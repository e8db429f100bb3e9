"""Multi-scale sliding-window cascade evaluation and box grouping.

The features are scaled to the window (one integral image per frame, no
image pyramid), so per-window cost is constant once the tables exist.
Feature values are variance-normalized: divided by window area and by
the window's intensity stddev (clamped to >= 1), computed over the
classic one-pixel-margin inner window that pre-trained models assume.

The hot loop lives in the kernel backends; :func:`eval_stage` is the
scalar reference path and mirrors the kernel arithmetic operation for
operation, so both produce identical decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .cascade import Cascade, Stage
from .errors import ImageTooSmall, OutOfBounds
from .geometry import Rect, iou, round_half_up
from .image import GrayImage
from .integral import IntegralImage, integral_images, rect_sum


@dataclass(frozen=True)
class Detection:
    """A window that passed the cascade (or a grouped cluster of them)."""

    rect: Rect
    score: float
    sf_context: float = 1.0
    angle_context: float = 0.0


@dataclass(frozen=True)
class ScanParams:
    """Knobs of the multi-scale scan; None means derive from context."""

    scale_step: float = 1.1
    min_window: int | None = None
    max_window: int | None = None
    step_frac: float = 0.05
    min_neighbors: int = 3

    def __post_init__(self):
        if not self.scale_step > 1.0:
            raise ValueError(f"scale_step must be > 1, got {self.scale_step}")
        if self.step_frac <= 0:
            raise ValueError(f"step_frac must be positive, got {self.step_frac}")
        if self.min_neighbors < 0:
            raise ValueError(f"min_neighbors must be >= 0, got {self.min_neighbors}")
        if (self.min_window is not None and self.max_window is not None
                and self.min_window > self.max_window):
            raise ValueError("min_window exceeds max_window")


# ---------------------------------------------------------------------------
# window geometry shared by the scalar path and the kernel path

def norm_window(win_w: int, win_h: int, scale: float) -> tuple[int, int, int, int]:
    """Inner sub-window used for mean/stddev normalization.

    One base pixel of margin on every side, scaled; pre-trained legacy
    models were trained against this convention.
    """
    border = round_half_up(scale)
    nw = min(round_half_up((win_w / scale - 2) * scale), win_w - border)
    nh = min(round_half_up((win_h / scale - 2) * scale), win_h - border)
    return border, border, max(nw, 1), max(nh, 1)


def _scale_rect(x: int, y: int, w: int, h: int, scale: float,
                win_w: int, win_h: int) -> tuple[int, int, int, int]:
    sx = round_half_up(x * scale)
    sy = round_half_up(y * scale)
    sw = max(round_half_up(w * scale), 1)
    sh = max(round_half_up(h * scale), 1)
    if sx + sw > win_w:
        sw = win_w - sx
    if sy + sh > win_h:
        sh = win_h - sy
    return sx, sy, sw, sh


def scale_feature_rects(rects, scale: float, win_w: int, win_h: int):
    """Scale a feature's rects to a window and re-normalize the first
    rect's weight so sum(weight * area) stays zero after rounding."""
    scaled = [(*_scale_rect(r.x, r.y, r.w, r.h, scale, win_w, win_h), w)
              for r, w in rects]
    excess = 0.0
    for sx, sy, sw, sh, w in scaled[1:]:
        excess = excess + w * float(sw * sh)
    sx0, sy0, sw0, sh0, _ = scaled[0]
    w0 = -excess / float(sw0 * sh0)
    return [(sx0, sy0, sw0, sh0, w0)] + scaled[1:]


# ---------------------------------------------------------------------------
# scalar reference path

def window_mean_stddev(ii: IntegralImage, sqii: IntegralImage,
                       window: Rect) -> tuple[float, float]:
    """Window mean and stddev from the two tables; stddev clamped >= 1
    so flat patches cannot blow up the normalization."""
    if ii.kind != "plain" or sqii.kind != "squared":
        raise ValueError("expected a plain and a squared integral image")
    area = window.area
    s1 = float(rect_sum(ii, window))
    s2 = float(rect_sum(sqii, window))
    inv_area = 1.0 / area
    mean = s1 * inv_area
    variance = s2 * inv_area - mean * mean
    sd = math.sqrt(variance) if variance > 0.0 else 0.0
    return mean, max(sd, 1.0)


def eval_stage(stage: Stage, ii: IntegralImage, sqii: IntegralImage,
               window: Rect, scale: float) -> tuple[bool, float]:
    """Evaluate one cascade stage on one window.

    ``window`` is the base window scaled by ``scale``; returns whether
    the stump-sum reaches the stage threshold, and the sum itself.
    """
    nx, ny, nw, nh = norm_window(window.w, window.h, scale)
    _, sd = window_mean_stddev(
        ii, sqii, Rect(window.x + nx, window.y + ny, nw, nh))
    inv_area = 1.0 / (nw * nh)
    fscale = inv_area / sd

    acc = 0.0
    for stump in stage.classifiers:
        v = 0.0
        for sx, sy, sw, sh, w in scale_feature_rects(
                stump.feature.rects, scale, window.w, window.h):
            rs = rect_sum(ii, Rect(window.x + sx, window.y + sy, sw, sh))
            v = v + w * float(rs)
        vn = v * fscale
        acc = acc + (stump.left_val if vn < stump.threshold else stump.right_val)
    return acc >= stage.stage_threshold, acc


# ---------------------------------------------------------------------------
# kernel-backed multi-scale scan

def _scaled_model(flat, scale: float, win_w: int, win_h: int):
    """Per-scale int32 rect arrays + re-normalized weights for the kernels.

    Mirrors scale_feature_rects exactly (same rounding, same float
    accumulation order), just vectorized.
    """
    f = scale
    sx = np.floor(flat.rx * f + 0.5).astype(np.int64)
    sy = np.floor(flat.ry * f + 0.5).astype(np.int64)
    sw = np.maximum(np.floor(flat.rw * f + 0.5).astype(np.int64), 1)
    sh = np.maximum(np.floor(flat.rh * f + 0.5).astype(np.int64), 1)
    np.minimum(sw, win_w - sx, out=sw)
    np.minimum(sh, win_h - sy, out=sh)

    weights = flat.rweight.copy()
    area = (sw * sh).astype(np.float64)
    starts = flat.stump_rect_start[:-1].astype(np.int64)
    contrib = weights * area
    contrib[starts] = 0.0
    excess = np.add.reduceat(contrib, starts)
    weights[starts] = -excess / area[starts]

    i32 = lambda a: np.ascontiguousarray(a, dtype=np.int32)
    return (i32(sx), i32(sy), i32(sw), i32(sh),
            np.ascontiguousarray(weights, dtype=np.float64))


def iter_scales(cascade: Cascade, img_w: int, img_h: int, params: ScanParams):
    """Yield (scale, win_w, win_h) in ascending size until the window no
    longer fits the image or exceeds max_window."""
    base = max(cascade.window_w, cascade.window_h)
    min_win = max(params.min_window or base, base)
    max_win = params.max_window or min(img_w, img_h)
    f = min_win / base
    while True:
        win_w = round_half_up(cascade.window_w * f)
        win_h = round_half_up(cascade.window_h * f)
        if max(win_w, win_h) > max_win or win_w > img_w or win_h > img_h:
            return
        yield f, win_w, win_h
        f = f * params.scale_step


def scan_cascade(cascade: Cascade, ii: IntegralImage, sqii: IntegralImage,
                 img_w: int, img_h: int, params: ScanParams,
                 sf_context: float = 1.0, angle_context: float = 0.0,
                 ) -> list[Detection]:
    """Run the full multi-scale scan on precomputed integral images.

    Emits one pre-grouping Detection per window passing all stages,
    score = stage count, ordered by ascending scale then row-major.
    """
    flat = cascade.flat()
    cache = cascade._scale_cache

    out: list[Detection] = []
    any_scale = False
    for f, win_w, win_h in iter_scales(cascade, img_w, img_h, params):
        any_scale = True
        key = (f, img_w, img_h)
        entry = cache.get(key)
        if entry is None:
            stride = max(1, round_half_up(params.step_frac * win_w))
            nx, ny, nw, nh = norm_window(win_w, win_h, f)
            entry = (stride, (nx, ny, nw, nh), _scaled_model(flat, f, win_w, win_h))
            cache[key] = entry
        stride, (nx, ny, nw, nh), (rx, ry, rw, rh, rweight) = entry
        xs, ys = backend.kernels.scan_scale(
            ii.table, sqii.table, img_w, img_h, win_w, win_h, stride,
            nx, ny, nw, nh,
            rx, ry, rw, rh, rweight,
            flat.stump_rect_start, flat.stump_thr, flat.stump_left,
            flat.stump_right, flat.stage_start, flat.stage_thr)
        score = float(cascade.n_stages)
        for x, y in zip(xs.tolist(), ys.tolist()):
            out.append(Detection(Rect(x, y, win_w, win_h), score,
                                 sf_context, angle_context))
    if not any_scale:
        raise ImageTooSmall(
            f"{img_w}x{img_h} image cannot fit the minimum scan window")
    return out


def detect_multiscale(cascade: Cascade, img: GrayImage,
                      params: ScanParams | None = None) -> list[Detection]:
    """Integral images + full scan; returns pre-grouping detections."""
    params = params or ScanParams()
    ii, sqii = integral_images(img)
    return scan_cascade(cascade, ii, sqii, img.width, img.height, params)


# ---------------------------------------------------------------------------
# grouping

_GROUP_IOU = 0.4


def group_detections(raw: list[Detection], min_neighbors: int) -> list[Detection]:
    """Merge overlapping raw windows into one box per cluster.

    Clusters are the transitive closure of pairwise IoU >= 0.4; clusters
    smaller than min_neighbors are dropped; each survivor becomes one
    Detection at the component-wise mean rect with score = cluster size.
    """
    n = len(raw)
    if n == 0:
        return []

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    xs = np.array([d.rect.x for d in raw], dtype=np.float64)
    ys = np.array([d.rect.y for d in raw], dtype=np.float64)
    ws = np.array([d.rect.w for d in raw], dtype=np.float64)
    hs = np.array([d.rect.h for d in raw], dtype=np.float64)
    x2 = xs + ws
    y2 = ys + hs
    areas = ws * hs

    for i in range(n - 1):
        iw = np.minimum(x2[i], x2[i + 1:]) - np.maximum(xs[i], xs[i + 1:])
        ih = np.minimum(y2[i], y2[i + 1:]) - np.maximum(ys[i], ys[i + 1:])
        inter = np.maximum(iw, 0.0) * np.maximum(ih, 0.0)
        ious = inter / (areas[i] + areas[i + 1:] - inter)
        for j in np.nonzero(ious >= _GROUP_IOU)[0]:
            ri, rj = find(i), find(int(j) + i + 1)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)

    def mean(vals: list[int]) -> int:
        return round_half_up(sum(vals) / len(vals))

    out = []
    for root in sorted(clusters):
        members = clusters[root]
        if len(members) < min_neighbors:
            continue
        rect = Rect(mean([raw[i].rect.x for i in members]),
                    mean([raw[i].rect.y for i in members]),
                    max(1, mean([raw[i].rect.w for i in members])),
                    max(1, mean([raw[i].rect.h for i in members])))
        first = raw[members[0]]
        out.append(Detection(rect, float(len(members)),
                             first.sf_context, first.angle_context))
    return out


def best_detection(dets: list[Detection]) -> Detection | None:
    """Highest score, ties broken by larger area then row-major position."""
    if not dets:
        return None
    return min(dets, key=lambda d: (-d.score, -d.rect.area, d.rect.y, d.rect.x))
