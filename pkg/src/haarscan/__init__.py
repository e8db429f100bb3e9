"""haarscan: Haar-cascade face/eye detection with downsample-and-remap
acceleration.

Faces are found on a frame shrunk by a scale factor (SF), the boxes are
remapped onto the full-resolution frame, and eyes are then searched in
full-resolution crops of the face region — trading detection of small
faces for large throughput gains. In-plane-tilted faces are recovered
by an affine rotation sweep. An evaluation harness measures the
speed/accuracy trade-off (fps, accuracy, ROC/AUC as functions of SF).

The scan hot loop has two interchangeable backends — a compiled Cython
extension and a pure-NumPy fallback — selected at import time and
guaranteed to produce bit-identical detections.
"""

from .backend import BACKEND_NAME, HAVE_COMPILED
from .cascade import (Cascade, HaarFeature, Stage, WeakClassifier,
                      load_cascade, make_cascade, parse_cascade,
                      save_cascade, serialize_cascade)
from .errors import (DuplicateFrame, FaceTooSmall, FormatError, HaarscanError,
                     ImageTooSmall, InvalidScale, MalformedCurve,
                     MissingGroundTruth, OutOfBounds, ParseError, SchemaError,
                     SingularMatrix, UnsupportedFeature, ValidationError)
from .evaluate import (BenchRow, ConfusionCounts, GroundTruthRecord, RocPoint,
                       accuracy, auc, bench_speed, confusion, fpr,
                       frame_score, load_ground_truth, roc_curve, tpr)
from .geometry import Rect, iou, round_half_up
from .image import (AffineMatrix, GrayImage, downsample, encode_pgm,
                    encode_png, grid_center, load_image, luma_from_rgb,
                    rotate, rotation_matrix, save_pgm, save_png, warp_affine)
from .integral import IntegralImage, integral, integral_images, rect_sum, squared_integral
from .pipeline import (DEFAULT_TILT_ANGLES, EyeRoiSpec, FrameResult,
                       PipelineConfig, detect_frame, detect_tilted, eye_roi,
                       remap_detection)
from .scan import (Detection, ScanParams, detect_multiscale, eval_stage,
                   group_detections, window_mean_stddev)

__version__ = "0.1.0"

__all__ = [
    "AffineMatrix", "BACKEND_NAME", "BenchRow", "Cascade", "ConfusionCounts",
    "DEFAULT_TILT_ANGLES", "Detection", "DuplicateFrame", "EyeRoiSpec",
    "FaceTooSmall", "FormatError", "FrameResult", "GrayImage",
    "GroundTruthRecord", "HAVE_COMPILED", "HaarFeature", "HaarscanError",
    "ImageTooSmall", "IntegralImage", "InvalidScale", "MalformedCurve",
    "MissingGroundTruth", "OutOfBounds", "ParseError", "PipelineConfig",
    "Rect", "RocPoint", "ScanParams", "SchemaError", "SingularMatrix",
    "Stage", "UnsupportedFeature", "ValidationError", "WeakClassifier",
    "accuracy", "auc", "bench_speed", "confusion", "detect_frame",
    "detect_multiscale", "detect_tilted", "downsample", "encode_pgm",
    "encode_png", "eval_stage", "eye_roi", "fpr", "frame_score",
    "grid_center", "group_detections", "luma_from_rgb",
    "integral", "integral_images", "iou", "load_cascade", "load_ground_truth",
    "load_image", "make_cascade", "parse_cascade", "rect_sum",
    "remap_detection", "roc_curve", "rotate", "rotation_matrix",
    "round_half_up", "save_cascade", "save_pgm", "save_png",
    "serialize_cascade", "squared_integral", "tpr", "warp_affine",
    "window_mean_stddev",
]
