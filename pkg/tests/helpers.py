"""Independent oracles and small model builders used across tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from haarscan import (Cascade, GrayImage, HaarFeature, Rect, Stage,
                      WeakClassifier, make_cascade)


def integral_oracle(pixels: np.ndarray) -> list[list[int]]:
    """(h+1, w+1) summed-area table computed with pure Python ints."""
    h, w = pixels.shape
    table = [[0] * (w + 1) for _ in range(h + 1)]
    for y in range(h):
        row_sum = 0
        prev = table[y]
        cur = table[y + 1]
        for x in range(w):
            row_sum += int(pixels[y, x])
            cur[x + 1] = prev[x + 1] + row_sum
    return table


def squared_integral_oracle(pixels: np.ndarray) -> list[list[int]]:
    return integral_oracle(pixels.astype(np.uint32) ** 2)


def rect_sum_oracle(pixels: np.ndarray, r: Rect) -> int:
    return int(pixels[r.y:r.y2, r.x:r.x2].astype(np.uint64).sum())


def mann_whitney_auc(pos_scores, neg_scores) -> Fraction:
    """Normalized count of correctly ordered (positive, negative) score
    pairs, ties counted half — the rank-sum identity for ROC area."""
    wins = Fraction(0)
    for p in pos_scores:
        for n in neg_scores:
            if p > n:
                wins += 1
            elif p == n:
                wins += Fraction(1, 2)
    return wins / (len(pos_scores) * len(neg_scores))


def brightness_stump(window: int = 8, threshold: float = 0.0,
                     invert: bool = False) -> Cascade:
    """One-stage, one-stump cascade over a top-vs-bottom contrast
    feature; passes windows whose top half is darker (or brighter when
    inverted) than the bottom by the normalized threshold."""
    half = window // 2
    feature = HaarFeature(rects=(
        (Rect(0, 0, window, window), -1.0),
        (Rect(0, half, window, half), 2.0),
    ))
    left, right = (1.0, -1.0) if invert else (-1.0, 1.0)
    stump = WeakClassifier(feature=feature, threshold=threshold,
                           left_val=left, right_val=right)
    return make_cascade("toy_contrast", window, window,
                        [Stage(classifiers=(stump,), stage_threshold=0.0)])


def permissive_cascade(window: int = 8, stages: int = 2) -> Cascade:
    """A cascade that passes every window (stage thresholds below any
    attainable sum) — handy when a test needs dense detections."""
    feature = HaarFeature(rects=(
        (Rect(0, 0, window, window), -1.0),
        (Rect(0, 0, window, window // 2), 2.0),
    ))
    stump = WeakClassifier(feature=feature, threshold=0.0,
                           left_val=0.5, right_val=0.5)
    return make_cascade(
        "toy_pass", window, window,
        [Stage(classifiers=(stump,), stage_threshold=-1.0)
         for _ in range(stages)])


def random_cascade(rng: np.random.Generator, window: int = 10,
                   n_stages: int = 2, stumps_per_stage: int = 3) -> Cascade:
    """Random balanced stump cascade within the supported subset."""
    stages = []
    for _ in range(n_stages):
        stumps = []
        for _ in range(stumps_per_stage):
            w = int(rng.integers(2, window + 1))
            h = int(rng.integers(2, window + 1))
            x = int(rng.integers(0, window - w + 1))
            y = int(rng.integers(0, window - h + 1))
            iw = int(rng.integers(1, w + 1))
            ih = int(rng.integers(1, h + 1))
            ix = x + int(rng.integers(0, w - iw + 1))
            iy = y + int(rng.integers(0, h - ih + 1))
            inner_weight = float(rng.integers(2, 5))
            outer_weight = -inner_weight * (iw * ih) / (w * h)
            feature = HaarFeature(rects=(
                (Rect(x, y, w, h), outer_weight),
                (Rect(ix, iy, iw, ih), inner_weight),
            ))
            stumps.append(WeakClassifier(
                feature=feature,
                threshold=float(rng.normal(0.0, 0.02)),
                left_val=float(rng.normal(0.0, 0.5)),
                right_val=float(rng.normal(0.0, 0.5)),
            ))
        stages.append(Stage(classifiers=tuple(stumps),
                            stage_threshold=float(rng.normal(0.0, 0.3))))
    return make_cascade("toy_random", window, window, stages)


def random_image(rng: np.random.Generator, width: int, height: int) -> GrayImage:
    return GrayImage(rng.integers(0, 256, (height, width), dtype=np.uint8))
