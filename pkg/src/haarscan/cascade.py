"""Cascade model tree and its serialization formats.

Two on-disk formats are accepted:

* the legacy XML dialect emitted by the classical Haar training tool
  (``type_id="opencv-haar-classifier"``), restricted to the stump-only,
  non-tilted subset;
* a native line-oriented text format (see :func:`serialize_cascade`)
  with a lossless round-trip serializer.
"""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParseError, UnsupportedFeature, ValidationError
from .geometry import Rect


@dataclass(frozen=True)
class HaarFeature:
    """2 or 3 weighted rectangles in base-window coordinates."""

    rects: tuple[tuple[Rect, float], ...]
    tilted: bool = False


@dataclass(frozen=True)
class WeakClassifier:
    """Decision stump: feature value vs threshold selects a leaf value."""

    feature: HaarFeature
    threshold: float
    left_val: float
    right_val: float


@dataclass(frozen=True)
class Stage:
    classifiers: tuple[WeakClassifier, ...]
    stage_threshold: float


@dataclass
class Cascade:
    """Ordered stages over a fixed base detection window."""

    name: str
    window_w: int
    window_h: int
    stages: tuple[Stage, ...]
    _flat: "FlatCascade | None" = field(default=None, repr=False, compare=False)
    _scale_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    @property
    def n_stumps(self) -> int:
        return sum(len(s.classifiers) for s in self.stages)

    def flat(self) -> "FlatCascade":
        """Array view of the model for the scan kernels (cached)."""
        if self._flat is None:
            self._flat = FlatCascade.from_cascade(self)
        return self._flat


@dataclass
class FlatCascade:
    """Model flattened to contiguous arrays, base-window coordinates."""

    rx: np.ndarray
    ry: np.ndarray
    rw: np.ndarray
    rh: np.ndarray
    rweight: np.ndarray
    stump_rect_start: np.ndarray
    stump_thr: np.ndarray
    stump_left: np.ndarray
    stump_right: np.ndarray
    stage_start: np.ndarray
    stage_thr: np.ndarray

    @classmethod
    def from_cascade(cls, cascade: Cascade) -> "FlatCascade":
        rx, ry, rw, rh, rweight = [], [], [], [], []
        rect_start = [0]
        thr, left, right = [], [], []
        stage_start = [0]
        stage_thr = []
        for stage in cascade.stages:
            for stump in stage.classifiers:
                for rect, weight in stump.feature.rects:
                    rx.append(rect.x)
                    ry.append(rect.y)
                    rw.append(rect.w)
                    rh.append(rect.h)
                    rweight.append(weight)
                rect_start.append(len(rx))
                thr.append(stump.threshold)
                left.append(stump.left_val)
                right.append(stump.right_val)
            stage_start.append(len(thr))
            stage_thr.append(stage.stage_threshold)
        i32 = lambda a: np.asarray(a, dtype=np.int32)
        f64 = lambda a: np.asarray(a, dtype=np.float64)
        return cls(i32(rx), i32(ry), i32(rw), i32(rh), f64(rweight),
                   i32(rect_start), f64(thr), f64(left), f64(right),
                   i32(stage_start), f64(stage_thr))


# ---------------------------------------------------------------------------
# validation

def _validate(cascade: Cascade) -> Cascade:
    if cascade.window_w < 4 or cascade.window_h < 4:
        raise ValidationError(
            f"base window {cascade.window_w}x{cascade.window_h} is below the 4px minimum")
    if not cascade.stages:
        raise ValidationError("cascade has no stages")
    for si, stage in enumerate(cascade.stages):
        if not stage.classifiers:
            raise ValidationError(f"stage {si} has no weak classifiers")
        for ci, stump in enumerate(stage.classifiers):
            feat = stump.feature
            if feat.tilted:
                raise UnsupportedFeature(
                    f"tilted feature at stage {si} stump {ci}: "
                    "tilted rects are outside the supported subset")
            if not 2 <= len(feat.rects) <= 3:
                raise ValidationError(
                    f"feature at stage {si} stump {ci} has {len(feat.rects)} rects "
                    "(expected 2 or 3)")
            balance = 0.0
            magnitude = 0.0
            for rect, weight in feat.rects:
                if rect.x2 > cascade.window_w or rect.y2 > cascade.window_h:
                    raise ValidationError(
                        f"rect {rect} at stage {si} stump {ci} exceeds the "
                        f"{cascade.window_w}x{cascade.window_h} base window")
                balance += weight * rect.area
                magnitude += abs(weight) * rect.area
            if abs(balance) > 1e-6 * max(magnitude, 1.0):
                raise ValidationError(
                    f"feature at stage {si} stump {ci} is unbalanced: "
                    f"sum(weight*area) = {balance}")
    return cascade


# ---------------------------------------------------------------------------
# legacy XML dialect

_LEGACY_TYPE_ID = "opencv-haar-classifier"


def _parse_legacy_rect(text: str) -> tuple[Rect, float]:
    parts = text.split()
    if len(parts) != 5:
        raise ParseError(f"expected 'x y w h weight', got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts[:4])
        weight = float(parts[4])
    except ValueError as exc:
        raise ParseError(f"bad rect entry {text!r}: {exc}") from None
    return Rect(x, y, w, h), weight


def _req_text(elem: ET.Element, tag: str) -> str:
    child = elem.find(tag)
    if child is None or child.text is None:
        raise ParseError(f"missing <{tag}> element")
    return child.text.strip()


def _parse_legacy_xml(root: ET.Element) -> Cascade:
    classifier = None
    if root.get("type_id") == _LEGACY_TYPE_ID:
        classifier = root
    else:
        for child in root:
            if child.get("type_id") == _LEGACY_TYPE_ID:
                classifier = child
                break
    if classifier is None:
        raise ParseError(
            f'no element with type_id="{_LEGACY_TYPE_ID}" found; '
            "not a legacy Haar cascade document")

    size = _req_text(classifier, "size").split()
    if len(size) != 2:
        raise ParseError(f"bad <size> content: {size!r}")
    window_w, window_h = int(size[0]), int(size[1])

    stages_elem = classifier.find("stages")
    if stages_elem is None:
        raise ParseError("missing <stages> element")

    stages = []
    for si, stage_elem in enumerate(stages_elem):
        trees_elem = stage_elem.find("trees")
        if trees_elem is None:
            raise ParseError(f"stage {si}: missing <trees>")
        stumps = []
        for ti, tree_elem in enumerate(trees_elem):
            nodes = list(tree_elem)
            if len(nodes) != 1:
                raise UnsupportedFeature(
                    f"stage {si} tree {ti} has {len(nodes)} nodes: "
                    "tree-structured weak classifiers are not supported "
                    "(stump-only subset)")
            node = nodes[0]
            if node.find("left_node") is not None or node.find("right_node") is not None:
                raise UnsupportedFeature(
                    f"stage {si} tree {ti} uses left_node/right_node: "
                    "tree-structured weak classifiers are not supported")
            feat_elem = node.find("feature")
            if feat_elem is None:
                raise ParseError(f"stage {si} tree {ti}: missing <feature>")
            rects_elem = feat_elem.find("rects")
            if rects_elem is None:
                raise ParseError(f"stage {si} tree {ti}: missing <rects>")
            rects = tuple(_parse_legacy_rect(r.text or "") for r in rects_elem)
            tilted = _req_text(feat_elem, "tilted") not in ("0", "")
            if tilted:
                raise UnsupportedFeature(
                    f"stage {si} tree {ti} uses a tilted feature: "
                    "tilted rects are not supported (upright subset)")
            stumps.append(WeakClassifier(
                feature=HaarFeature(rects=rects, tilted=False),
                threshold=float(_req_text(node, "threshold")),
                left_val=float(_req_text(node, "left_val")),
                right_val=float(_req_text(node, "right_val")),
            ))
        stages.append(Stage(
            classifiers=tuple(stumps),
            stage_threshold=float(_req_text(stage_elem, "stage_threshold")),
        ))

    name = classifier.tag if classifier.tag != "opencv_storage" else "cascade"
    return Cascade(name=name, window_w=window_w, window_h=window_h,
                   stages=tuple(stages))


# ---------------------------------------------------------------------------
# native text format

def _parse_native(lines: list[str]) -> Cascade:
    def fields(line: str, keyword: str, n: int) -> list[str]:
        parts = line.split()
        if parts[0] != keyword or len(parts) != n + 1:
            raise ParseError(f"expected '{keyword}' line with {n} fields, got {line!r}")
        return parts[1:]

    def to_int(token: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"expected an integer, got {token!r}") from None

    def to_float(token: str) -> float:
        try:
            return float(token)
        except ValueError:
            raise ParseError(f"expected a number, got {token!r}") from None

    it = iter(lines)

    def next_line() -> str:
        try:
            return next(it)
        except StopIteration:
            raise ParseError("unexpected end of cascade document") from None

    head = fields(next_line(), "CASCADE", 4)
    name = head[0]
    try:
        window_w, window_h, n_stages = int(head[1]), int(head[2]), int(head[3])
    except ValueError as exc:
        raise ParseError(f"bad CASCADE header: {exc}") from None

    stages = []
    for _ in range(n_stages):
        sh = fields(next_line(), "STAGE", 2)
        n_stumps = to_int(sh[0])
        stage_threshold = to_float(sh[1])
        stumps = []
        for _ in range(n_stumps):
            st = fields(next_line(), "STUMP", 4)
            threshold, left_val, right_val = (to_float(st[0]), to_float(st[1]),
                                              to_float(st[2]))
            n_rects = to_int(st[3])
            rects = []
            for _ in range(n_rects):
                rf = fields(next_line(), "RECT", 5)
                rects.append((Rect(to_int(rf[0]), to_int(rf[1]), to_int(rf[2]),
                                   to_int(rf[3])), to_float(rf[4])))
            stumps.append(WeakClassifier(
                feature=HaarFeature(rects=tuple(rects)),
                threshold=threshold, left_val=left_val, right_val=right_val))
        stages.append(Stage(classifiers=tuple(stumps), stage_threshold=stage_threshold))

    leftover = next(it, None)
    if leftover is not None:
        raise ParseError(f"trailing content after last stage: {leftover!r}")
    return Cascade(name=name, window_w=window_w, window_h=window_h,
                   stages=tuple(stages))


def serialize_cascade(cascade: Cascade) -> str:
    """Native text form; floats use repr so parse(serialize(x)) == x."""
    name = "_".join(cascade.name.split()) or "cascade"
    out = [f"CASCADE {name} {cascade.window_w} {cascade.window_h} {cascade.n_stages}"]
    for stage in cascade.stages:
        out.append(f"STAGE {len(stage.classifiers)} {stage.stage_threshold!r}")
        for stump in stage.classifiers:
            out.append(f"STUMP {stump.threshold!r} {stump.left_val!r} "
                       f"{stump.right_val!r} {len(stump.feature.rects)}")
            for rect, weight in stump.feature.rects:
                out.append(f"RECT {rect.x} {rect.y} {rect.w} {rect.h} {weight!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# entry points

def parse_cascade(source: str) -> Cascade:
    """Parse a cascade document (legacy XML dialect or native format)."""
    stripped = source.lstrip()
    if stripped.startswith("<"):
        try:
            root = ET.fromstring(source)
        except ET.ParseError as exc:
            raise ParseError(f"malformed XML: {exc}") from None
        return _validate(_parse_legacy_xml(root))
    lines = [ln.strip() for ln in source.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if lines and lines[0].startswith("CASCADE"):
        return _validate(_parse_native(lines))
    raise ParseError("unrecognized cascade document (expected XML or CASCADE header)")


def load_cascade(path: "str | os.PathLike[str]") -> Cascade:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_cascade(fh.read())


def save_cascade(cascade: Cascade, path: "str | os.PathLike[str]") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_cascade(cascade))


def make_cascade(name: str, window_w: int, window_h: int,
                 stages: Sequence[Stage]) -> Cascade:
    """Construct and validate a cascade built in code (mainly for tests)."""
    return _validate(Cascade(name=name, window_w=window_w, window_h=window_h,
                             stages=tuple(stages)))
