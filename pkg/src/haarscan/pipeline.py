"""Downsample-detect-remap pipeline.

Faces are scanned on a frame downsampled by a scale factor ``sf``
(cheap), the resulting boxes are remapped back onto the original frame,
and eyes are then searched inside regions cropped from the
full-resolution original — never from the downsampled copy — so the eye
stage keeps camera resolution. Tilted faces are handled by sweeping a
list of rotation angles over the downsampled frame and mapping the
first hit back through the inverse rotation.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from .cascade import Cascade
from .errors import FaceTooSmall
from .geometry import Rect, round_half_up
from .image import GrayImage, check_scale, downsample, grid_center, rotate, rotation_matrix
from .integral import integral_images
from .scan import Detection, ScanParams, best_detection, group_detections, scan_cascade

DEFAULT_TILT_ANGLES: tuple[float, ...] = (0.0, -15.0, 15.0, -30.0, 30.0)

ELAPSED_KEYS = ("downsample", "integral", "face_scan", "eye_scan", "tilt_extra")


@dataclass(frozen=True)
class EyeRoiSpec:
    """Fractional eye-search layout inside a face box.

    Both eye regions start ``top_frac`` of the face height below the
    face top (under the forehead) and are ``height_frac`` tall; each is
    ``width_frac`` wide, the left one anchored at the face's left edge
    and the right one mirrored at the horizontal midpoint.
    """

    top_frac: float = 0.20
    height_frac: float = 0.35
    width_frac: float = 0.50

    def __post_init__(self):
        for name in ("top_frac", "height_frac", "width_frac"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")


@dataclass(frozen=True)
class PipelineConfig:
    sf: float = 1.0
    face_params: ScanParams = field(default_factory=ScanParams)
    eye_params: ScanParams = field(default_factory=ScanParams)
    tilt_angles: tuple[float, ...] = DEFAULT_TILT_ANGLES
    eye_roi_spec: EyeRoiSpec = field(default_factory=EyeRoiSpec)

    def __post_init__(self):
        check_scale(self.sf)
        angles = tuple(float(a) for a in self.tilt_angles)
        object.__setattr__(self, "tilt_angles", angles)
        if 0.0 not in angles:
            raise ValueError("tilt_angles must contain 0")
        for a in angles:
            if not -45.0 <= a <= 45.0:
                raise ValueError(f"tilt angle {a} outside [-45, 45]")


@dataclass
class FrameResult:
    """Per-frame detection record; rects are in original frame coordinates."""

    frame_id: str
    faces: list[Detection]
    eyes: list[Detection]
    face_present: bool
    eyes_present: bool
    elapsed: dict[str, float]

    def to_json(self) -> dict:
        def det(d: Detection) -> dict:
            return {"rect": [d.rect.x, d.rect.y, d.rect.w, d.rect.h],
                    "score": d.score,
                    "sf_context": d.sf_context,
                    "angle_context": d.angle_context}
        return {"frame_id": self.frame_id,
                "faces": [det(d) for d in self.faces],
                "eyes": [det(d) for d in self.eyes],
                "face_present": self.face_present,
                "eyes_present": self.eyes_present,
                "elapsed": {k: self.elapsed[k] for k in ELAPSED_KEYS}}

    def to_json_line(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "FrameResult":
        def det(d: dict) -> Detection:
            x, y, w, h = d["rect"]
            return Detection(Rect(x, y, w, h), float(d["score"]),
                             float(d.get("sf_context", 1.0)),
                             float(d.get("angle_context", 0.0)))
        return cls(frame_id=obj["frame_id"],
                   faces=[det(d) for d in obj["faces"]],
                   eyes=[det(d) for d in obj["eyes"]],
                   face_present=bool(obj["face_present"]),
                   eyes_present=bool(obj["eyes_present"]),
                   elapsed={k: float(v) for k, v in obj["elapsed"].items()})


# ---------------------------------------------------------------------------

def remap_detection(det: Detection, sf: float,
                    frame_w: int | None = None,
                    frame_h: int | None = None) -> Detection:
    """Scale a detection from downsampled coordinates back to the
    original frame: each component rounded half-up after multiplying by
    sf, then width/height clamped to the frame when bounds are given.
    The sf context resets to 1 because the box now lives at full
    resolution."""
    check_scale(sf)
    x = round_half_up(sf * det.rect.x)
    y = round_half_up(sf * det.rect.y)
    w = round_half_up(sf * det.rect.w)
    h = round_half_up(sf * det.rect.h)
    if frame_w is not None:
        x = min(x, frame_w - 1)
        w = min(w, frame_w - x)
    if frame_h is not None:
        y = min(y, frame_h - 1)
        h = min(h, frame_h - y)
    return replace(det, rect=Rect(x, y, max(w, 1), max(h, 1)), sf_context=1.0)


def eye_roi(face: Rect, spec: EyeRoiSpec | None = None) -> tuple[Rect, Rect]:
    """Left and right eye-search rects inside a face box, per the
    fractional layout; raises FaceTooSmall below 8x8."""
    spec = spec or EyeRoiSpec()
    if face.w < 8 or face.h < 8:
        raise FaceTooSmall(f"face {face.w}x{face.h} is below the 8x8 minimum")
    y = face.y + round_half_up(spec.top_frac * face.h)
    w = round_half_up(spec.width_frac * face.w)
    h = round_half_up(spec.height_frac * face.h)
    h = min(h, face.y2 - y)
    left = Rect(face.x, y, w, h)
    rx = face.x + round_half_up(spec.width_frac * face.w)
    right = Rect(rx, y, min(w, face.x2 - rx), h)
    return left, right


def _crop(img: GrayImage, rect: Rect) -> GrayImage:
    return GrayImage(img.pixels[rect.y:rect.y2, rect.x:rect.x2])


def _scan_grouped(cascade: Cascade, img: GrayImage, params: ScanParams,
                  sf_context: float = 1.0) -> list[Detection]:
    ii, sqii = integral_images(img)
    raw = scan_cascade(cascade, ii, sqii, img.width, img.height, params,
                       sf_context=sf_context)
    return group_detections(raw, params.min_neighbors)


def _map_rotated_rect(rect: Rect, angle: float, frame_w: int,
                      frame_h: int) -> Rect:
    """Map a box found in a rotated frame back to the unrotated frame:
    only its center goes through the inverse rotation; the box stays
    axis-aligned with unchanged size."""
    cx, cy = grid_center(frame_w, frame_h)
    inv = rotation_matrix((cx, cy), angle).inverse()
    ox, oy = inv.apply(*rect.center)
    x = round_half_up(ox - rect.w / 2.0)
    y = round_half_up(oy - rect.h / 2.0)
    x = min(max(x, 0), max(frame_w - rect.w, 0))
    y = min(max(y, 0), max(frame_h - rect.h, 0))
    return Rect(x, y, rect.w, rect.h)


def _tilt_sweep(small: GrayImage, face_cascade: Cascade, cfg: PipelineConfig,
                ) -> tuple[list[Detection], float]:
    """First angle that yields a grouped detection wins; returns
    detections in downsampled-frame coordinates plus the sweep's extra
    wall-clock cost beyond the 0-degree scan (milliseconds)."""
    extra_ms = 0.0
    for angle in cfg.tilt_angles:
        t0 = time.perf_counter()
        frame = small if angle == 0.0 else rotate(small, angle)
        found = _scan_grouped(face_cascade, frame, cfg.face_params,
                              sf_context=cfg.sf)
        if angle != 0.0:
            extra_ms += (time.perf_counter() - t0) * 1000.0
        if found:
            if angle == 0.0:
                return found, extra_ms
            mapped = [replace(d,
                              rect=_map_rotated_rect(d.rect, angle,
                                                     small.width, small.height),
                              angle_context=angle)
                      for d in found]
            return mapped, extra_ms
    return [], extra_ms


def detect_tilted(img: GrayImage, face_cascade: Cascade,
                  cfg: PipelineConfig) -> list[Detection]:
    """Rotation-sweep face detection, remapped to original coordinates.

    With tilt_angles=[0] this equals detect_frame's face list exactly.
    """
    small = downsample(img, cfg.sf)
    found, _ = _tilt_sweep(small, face_cascade, cfg)
    return [remap_detection(d, cfg.sf, img.width, img.height) for d in found]


def detect_frame(img: GrayImage, face_cascade: Cascade,
                 eye_cascade: Cascade | None, cfg: PipelineConfig,
                 frame_id: str = "frame", tilt: bool = False) -> FrameResult:
    """Run the full pipeline on one frame.

    Downsample, face-scan the small frame, remap boxes to the original,
    then eye-scan full-resolution crops of the best face's eye regions.
    With ``tilt`` the face stage falls back to the rotation sweep when
    the upright scan finds nothing. Faces too small to host an eye
    region (or a missing eye cascade) simply produce no eye detections.
    """
    elapsed = dict.fromkeys(ELAPSED_KEYS, 0.0)

    t0 = time.perf_counter()
    small = downsample(img, cfg.sf)
    t1 = time.perf_counter()
    elapsed["downsample"] = (t1 - t0) * 1000.0

    ii, sqii = integral_images(small)
    t2 = time.perf_counter()
    elapsed["integral"] = (t2 - t1) * 1000.0

    raw = scan_cascade(face_cascade, ii, sqii, small.width, small.height,
                       cfg.face_params, sf_context=cfg.sf)
    found = group_detections(raw, cfg.face_params.min_neighbors)
    if tilt and not found:
        found, elapsed["tilt_extra"] = _tilt_sweep_nonzero(small, face_cascade, cfg)
    faces = [remap_detection(d, cfg.sf, img.width, img.height) for d in found]
    t3 = time.perf_counter()
    elapsed["face_scan"] = (t3 - t2) * 1000.0 - elapsed["tilt_extra"]

    eyes: list[Detection] = []
    best = best_detection(faces)
    if (eye_cascade is not None and best is not None
            and best.rect.w >= 8 and best.rect.h >= 8):
        for roi in eye_roi(best.rect, cfg.eye_roi_spec):
            if roi.w < eye_cascade.window_w or roi.h < eye_cascade.window_h:
                continue
            crop = _crop(img, roi)
            for d in _scan_grouped(eye_cascade, crop, cfg.eye_params):
                shifted = Rect(d.rect.x + roi.x, d.rect.y + roi.y,
                               d.rect.w, d.rect.h)
                eyes.append(replace(d, rect=shifted))
    t4 = time.perf_counter()
    elapsed["eye_scan"] = (t4 - t3) * 1000.0

    return FrameResult(frame_id=frame_id, faces=faces, eyes=eyes,
                       face_present=bool(faces), eyes_present=bool(eyes),
                       elapsed=elapsed)


def _tilt_sweep_nonzero(small: GrayImage, face_cascade: Cascade,
                        cfg: PipelineConfig) -> tuple[list[Detection], float]:
    """Sweep only the nonzero angles (the 0-degree scan already ran)."""
    nonzero = tuple(a for a in cfg.tilt_angles if a != 0.0)
    t0 = time.perf_counter()
    out: list[Detection] = []
    for angle in nonzero:
        frame = rotate(small, angle)
        found = _scan_grouped(face_cascade, frame, cfg.face_params,
                              sf_context=cfg.sf)
        if found:
            out = [replace(d,
                           rect=_map_rotated_rect(d.rect, angle,
                                                  small.width, small.height),
                           angle_context=angle)
                   for d in found]
            break
    return out, (time.perf_counter() - t0) * 1000.0
