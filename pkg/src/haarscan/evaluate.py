"""Ground truth, confusion counting, rate metrics, ROC/AUC, fps benchmark.

Rates are computed in exact rational arithmetic (fractions.Fraction) so
identities like tpr * (tp + fn) == tp hold bit-for-bit; an undefined
rate (zero denominator) is returned as None, never coerced to 0 or 1.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cascade import Cascade
from .errors import (DuplicateFrame, MalformedCurve, MissingGroundTruth,
                     SchemaError)
from .geometry import Rect, iou
from .image import GrayImage
from .pipeline import FrameResult, PipelineConfig, detect_frame


# ---------------------------------------------------------------------------
# ground truth

@dataclass(frozen=True)
class GroundTruthRecord:
    frame_id: str
    face_present: bool
    face_box: Rect | None = None
    eyes_present: bool = False
    eye_boxes: tuple[Rect, ...] | None = None

    def __post_init__(self):
        if self.face_box is not None and not self.face_present:
            raise SchemaError(
                f"{self.frame_id}: face_box given but face_present is false")
        if self.eye_boxes is not None and not self.eyes_present:
            raise SchemaError(
                f"{self.frame_id}: eye_boxes given but eyes_present is false")

    def to_json(self) -> dict:
        out: dict = {"frame_id": self.frame_id,
                     "face_present": self.face_present}
        if self.face_box is not None:
            b = self.face_box
            out["face_box"] = [b.x, b.y, b.w, b.h]
        out["eyes_present"] = self.eyes_present
        if self.eye_boxes is not None:
            out["eye_boxes"] = [[b.x, b.y, b.w, b.h] for b in self.eye_boxes]
        return out


def _parse_box(value, where: str) -> Rect:
    if (not isinstance(value, (list, tuple)) or len(value) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise SchemaError(f"{where}: box must be [x, y, w, h] integers, got {value!r}")
    try:
        return Rect(*value)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def parse_ground_truth_record(obj: dict) -> GroundTruthRecord:
    if not isinstance(obj, dict):
        raise SchemaError(f"expected a JSON object, got {type(obj).__name__}")
    known = {"frame_id", "face_present", "face_box", "eyes_present", "eye_boxes"}
    unknown = set(obj) - known
    if unknown:
        raise SchemaError(f"unknown fields: {sorted(unknown)}")
    for name in ("frame_id", "face_present", "eyes_present"):
        if name not in obj:
            raise SchemaError(f"missing required field {name!r}")
    frame_id = obj["frame_id"]
    if not isinstance(frame_id, str) or not frame_id:
        raise SchemaError(f"frame_id must be a non-empty string, got {frame_id!r}")
    for name in ("face_present", "eyes_present"):
        if not isinstance(obj[name], bool):
            raise SchemaError(f"{frame_id}: {name} must be a boolean")
    face_box = None
    if obj.get("face_box") is not None:
        face_box = _parse_box(obj["face_box"], f"{frame_id}: face_box")
    eye_boxes = None
    if obj.get("eye_boxes") is not None:
        raw = obj["eye_boxes"]
        if not isinstance(raw, list):
            raise SchemaError(f"{frame_id}: eye_boxes must be a list of boxes")
        eye_boxes = tuple(_parse_box(b, f"{frame_id}: eye_boxes[{i}]")
                          for i, b in enumerate(raw))
    return GroundTruthRecord(frame_id=frame_id,
                             face_present=obj["face_present"],
                             face_box=face_box,
                             eyes_present=obj["eyes_present"],
                             eye_boxes=eye_boxes)


def load_ground_truth(path) -> list[GroundTruthRecord]:
    """Read a JSON-lines ground-truth file; duplicate frame_ids are an
    error, blank lines are ignored."""
    records: list[GroundTruthRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            try:
                rec = parse_ground_truth_record(obj)
            except SchemaError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
            if rec.frame_id in seen:
                raise DuplicateFrame(
                    f"{path}:{lineno}: duplicate frame_id {rec.frame_id!r}")
            seen.add(rec.frame_id)
            records.append(rec)
    return records


def save_ground_truth(records: Iterable[GroundTruthRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# confusion counting and rates

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def p(self) -> int:
        return self.tp + self.fn

    @property
    def n(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(results: Sequence[FrameResult],
              gt: Sequence[GroundTruthRecord],
              mode: str = "presence",
              iou_tau: float = 0.5) -> ConfusionCounts:
    """Frame-level confusion counts against ground truth.

    presence mode scores each frame on face presence alone. iou mode
    additionally requires the best detected box to reach IoU >= iou_tau
    against the annotated face box for a tp; a present frame detected in
    the wrong place scores fp (once — not also fn). A present frame with
    no annotated box falls back to presence scoring.
    """
    if mode not in ("presence", "iou"):
        raise ValueError(f"unknown mode {mode!r}")
    by_id = {rec.frame_id: rec for rec in gt}
    tp = fp = tn = fn = 0
    for res in results:
        rec = by_id.get(res.frame_id)
        if rec is None:
            raise MissingGroundTruth(
                f"no ground-truth record for frame {res.frame_id!r}")
        detected = bool(res.faces)
        if not rec.face_present:
            fp += detected
            tn += not detected
            continue
        if not detected:
            fn += 1
            continue
        if mode == "iou" and rec.face_box is not None:
            best = max(iou(d.rect, rec.face_box) for d in res.faces)
            if best >= iou_tau:
                tp += 1
            else:
                fp += 1
        else:
            tp += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def tpr(c: ConfusionCounts) -> Fraction | None:
    """True-positive rate tp / (tp + fn); None when undefined."""
    return Fraction(c.tp, c.p) if c.p else None


def fpr(c: ConfusionCounts) -> Fraction | None:
    """False-positive rate fp / (fp + tn); None when undefined."""
    return Fraction(c.fp, c.n) if c.n else None


def accuracy(c: ConfusionCounts) -> Fraction | None:
    """(tp + tn) / (p + n); None when undefined."""
    total = c.p + c.n
    return Fraction(c.tp + c.tn, total) if total else None


# ---------------------------------------------------------------------------
# ROC / AUC

@dataclass(frozen=True)
class RocPoint:
    fpr: Fraction
    tpr: Fraction
    threshold: Fraction | float  # +/-inf sentinels at the curve's ends


RocCurve = tuple[RocPoint, ...]


def frame_score(result: FrameResult) -> float:
    """Detector confidence of a frame: largest neighbor count over its
    grouped face detections, 0 when none."""
    return max((d.score for d in result.faces), default=0.0)


def roc_curve(scored_frames: Sequence[tuple[str, float]],
              gt: Sequence[GroundTruthRecord]) -> RocCurve:
    """Threshold-sweep ROC over per-frame scores.

    A frame classifies positive iff score >= threshold; thresholds run
    over the distinct scores plus +/-infinity sentinels, so the curve
    always starts at (0, 0) and ends at (1, 1). Points are deduplicated
    and sorted by ascending (fpr, tpr).
    """
    by_id = {rec.frame_id: rec for rec in gt}
    labeled: list[tuple[Fraction, bool]] = []
    for frame_id, score in scored_frames:
        rec = by_id.get(frame_id)
        if rec is None:
            raise MissingGroundTruth(
                f"no ground-truth record for frame {frame_id!r}")
        if not math.isfinite(score):
            raise ValueError(f"frame {frame_id!r} has non-finite score {score}")
        labeled.append((Fraction(score), rec.face_present))

    n_pos = sum(1 for _, label in labeled if label)
    n_neg = len(labeled) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MalformedCurve(
            "ROC needs at least one positive and one negative frame "
            f"(got {n_pos} positive, {n_neg} negative)")

    thresholds: list[Fraction | float] = [math.inf]
    thresholds += sorted({score for score, _ in labeled}, reverse=True)
    thresholds.append(-math.inf)

    points: list[RocPoint] = []
    seen: set[tuple[Fraction, Fraction]] = set()
    for thr in thresholds:
        tp = sum(1 for score, label in labeled if label and score >= thr)
        fp = sum(1 for score, label in labeled if not label and score >= thr)
        point = (Fraction(fp, n_neg), Fraction(tp, n_pos))
        if point not in seen:
            seen.add(point)
            points.append(RocPoint(fpr=point[0], tpr=point[1], threshold=thr))
    points.sort(key=lambda pt: (pt.fpr, pt.tpr))
    return tuple(points)


def auc(curve: RocCurve) -> Fraction:
    """Trapezoidal area under an ROC curve, exact rational result."""
    if len(curve) < 2:
        raise MalformedCurve("curve needs at least 2 points")
    if curve[0].fpr != 0 or curve[0].tpr != 0:
        raise MalformedCurve(f"curve must start at (0, 0), starts at "
                             f"({curve[0].fpr}, {curve[0].tpr})")
    if curve[-1].fpr != 1 or curve[-1].tpr != 1:
        raise MalformedCurve(f"curve must end at (1, 1), ends at "
                             f"({curve[-1].fpr}, {curve[-1].tpr})")
    area = Fraction(0)
    for a, b in zip(curve, curve[1:]):
        if b.fpr < a.fpr:
            raise MalformedCurve("curve not sorted by ascending fpr")
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2
    return area


# ---------------------------------------------------------------------------
# speed benchmark

WARMUP_FRAMES = 5


@dataclass(frozen=True)
class BenchRow:
    sf: float
    per_subject_fps: Mapping[str, float]
    mean_fps: float


def bench_speed(sequences: Mapping[str, Sequence[GrayImage]] | Sequence[GrayImage],
                sf_list: Sequence[float],
                cascades: tuple[Cascade, Cascade],
                cfg: PipelineConfig) -> list[BenchRow]:
    """Wall-clock frames/second of detect_frame per scale factor.

    The monotonic clock wraps detect_frame only (no decode); the first
    5 frames of each sequence warm caches and are excluded from timing
    when the sequence is long enough to spare them. Detections are
    deterministic, the timings of course are not.
    """
    if not isinstance(sequences, Mapping):
        sequences = {"seq0": list(sequences)}
    face_cascade, eye_cascade = cascades
    rows: list[BenchRow] = []
    for sf in sf_list:
        run_cfg = replace(cfg, sf=float(sf))
        per_subject: dict[str, float] = {}
        for subject in sorted(sequences):
            frames = sequences[subject]
            if not frames:
                raise ValueError(f"subject {subject!r} has no frames")
            warmup = WARMUP_FRAMES if len(frames) > WARMUP_FRAMES else 0
            for img in frames[:warmup]:
                detect_frame(img, face_cascade, eye_cascade, run_cfg)
            total = 0.0
            timed = frames[warmup:]
            for img in timed:
                t0 = time.perf_counter()
                detect_frame(img, face_cascade, eye_cascade, run_cfg)
                total += time.perf_counter() - t0
            per_subject[subject] = len(timed) / total if total > 0 else math.inf
        rows.append(BenchRow(sf=float(sf), per_subject_fps=per_subject,
                             mean_fps=sum(per_subject.values()) / len(per_subject)))
    return rows
