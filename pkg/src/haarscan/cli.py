"""Command-line interface.

Subcommands: detect (JSON-lines detection output), bench (fps-vs-SF
sweep), eval (accuracy against ground truth), roc (ROC/AUC sweep), and
annotate-serve (HTTP backend for the browser annotation tool).

Exit codes are a stable scripting contract: 0 success (including zero
detections — absence is data), 1 usage/IO/parse error, 2 empty input.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .backend import BACKEND_NAME
from .cascade import Cascade, load_cascade
from .errors import HaarscanError
from .evaluate import (accuracy, bench_speed, confusion, fpr, frame_score,
                       load_ground_truth, roc_curve, tpr)
from .evaluate import auc as compute_auc
from .geometry import Rect
from .image import GrayImage, check_scale, load_image, save_pgm
from .pipeline import DEFAULT_TILT_ANGLES, PipelineConfig, detect_frame
from .reports import emit_report, format_number
from .scan import ScanParams
from .server import list_frames, serve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2

DEFAULT_SF_LIST = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def error(self, message: str):
        raise UsageError(message)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated number list, got {text!r}")
    if not values:
        raise UsageError(f"empty number list: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="haarscan",
                     description="Haar-cascade face/eye detection with "
                                 "downsample-and-remap acceleration.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({BACKEND_NAME} backend)")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_cascade_flags(p, eye_required=False):
        p.add_argument("--face-cascade", required=True, metavar="PATH",
                       help="face cascade file (legacy XML or native text)")
        p.add_argument("--eye-cascade", metavar="PATH", required=eye_required,
                       help="eye cascade file (optional; omits the eye stage)")

    def add_scan_flags(p):
        p.add_argument("--min-neighbors", type=int, default=3, metavar="N",
                       help="drop detection clusters smaller than N (default 3)")
        p.add_argument("--scale-step", type=float, default=1.1, metavar="F",
                       help="multiplicative window growth per scan scale (default 1.1)")

    p_detect = sub.add_parser("detect", help="detect faces/eyes, print JSON lines")
    src = p_detect.add_mutually_exclusive_group(required=True)
    src.add_argument("--image", metavar="PATH", help="single input image (PGM or PNG)")
    src.add_argument("--dir", metavar="PATH", help="directory of frames")
    add_cascade_flags(p_detect)
    add_scan_flags(p_detect)
    p_detect.add_argument("--sf", type=float, default=1.0, metavar="K",
                          help="downsampling scale factor (default 1)")
    p_detect.add_argument("--tilt", action="store_true",
                          help="fall back to the rotation sweep when the "
                               "upright scan finds no face")
    p_detect.add_argument("--tilt-angles", type=_float_list,
                          default=DEFAULT_TILT_ANGLES, metavar="LIST",
                          help="sweep angles in degrees, 0 first "
                               "(default 0,-15,15,-30,30)")
    p_detect.add_argument("--out", metavar="PATH",
                          help="write JSON lines here instead of stdout")
    p_detect.add_argument("--out-dir", metavar="PATH", default=".",
                          help="directory for --draw output (default .)")
    p_detect.add_argument("--draw", action="store_true",
                          help="also write PGM copies with boxes burned in")
    p_detect.add_argument("--threads", type=int, default=1, metavar="N",
                          help="frames processed concurrently (default 1)")

    for name, help_text in (("bench", "fps-vs-SF benchmark"),
                            ("eval", "accuracy against ground truth"),
                            ("roc", "ROC curves and AUC per SF")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--dir", required=True, metavar="PATH",
                       help="directory of frames (bench: subdirectories "
                            "are treated as separate subjects)")
        add_cascade_flags(p)
        add_scan_flags(p)
        p.add_argument("--sf", type=_float_list, default=DEFAULT_SF_LIST,
                       metavar="LIST", help="comma-separated SF sweep "
                       "(default 1,2,4,6,8,10,12)")
        p.add_argument("--out-dir", required=True, metavar="PATH",
                       help="directory for CSV/SVG reports")
        if name != "bench":
            p.add_argument("--gt", required=True, metavar="PATH",
                           help="ground-truth JSON-lines file")
            p.add_argument("--mode", choices=("presence", "iou"),
                           default="presence", help="confusion scoring mode")
            p.add_argument("--iou-tau", type=float, default=0.5, metavar="T",
                           help="IoU threshold for --mode iou (default 0.5)")

    p_serve = sub.add_parser("annotate-serve",
                             help="serve the annotation UI and JSON API")
    p_serve.add_argument("--dir", required=True, metavar="PATH",
                         help="directory of frames to annotate")
    p_serve.add_argument("--gt", required=True, metavar="PATH",
                         help="ground-truth JSON-lines file (created if missing)")
    p_serve.add_argument("--face-cascade", metavar="PATH",
                         help="enables the live-detection overlay endpoint")
    p_serve.add_argument("--eye-cascade", metavar="PATH")
    p_serve.add_argument("--ui-dir", metavar="PATH",
                         help="static UI bundle to serve at / "
                              "(default: bundled build if present)")
    p_serve.add_argument("--host", default="127.0.0.1", metavar="ADDR",
                         help="bind address (default 127.0.0.1)")
    p_serve.add_argument("--port", type=int, default=8765, metavar="N",
                         help="TCP port (default 8765)")
    return parser


# ---------------------------------------------------------------------------
# shared helpers

def _load_frames_dir(path: str) -> list[tuple[str, str]]:
    if not os.path.isdir(path):
        raise UsageError(f"not a directory: {path}")
    return list_frames(path)


def _make_config(args, sf: float = 1.0) -> PipelineConfig:
    tilt_angles = tuple(getattr(args, "tilt_angles", DEFAULT_TILT_ANGLES))
    try:
        params = ScanParams(scale_step=args.scale_step,
                            min_neighbors=args.min_neighbors)
        return PipelineConfig(sf=check_scale(sf), face_params=params,
                              eye_params=ScanParams(min_neighbors=args.min_neighbors),
                              tilt_angles=tilt_angles)
    except ValueError as exc:  # bad flag combinations surface as usage errors
        raise UsageError(str(exc)) from None


def _load_cascades(args) -> tuple[Cascade, Cascade | None]:
    face = load_cascade(args.face_cascade)
    eye = load_cascade(args.eye_cascade) if args.eye_cascade else None
    return face, eye


def _burn_boxes(img: GrayImage, rects: list[Rect],
                thickness: int = 2, intensity: int = 255) -> GrayImage:
    pixels = img.pixels.copy()
    h, w = pixels.shape
    for r in rects:
        x0, y0 = max(r.x, 0), max(r.y, 0)
        x1, y1 = min(r.x2, w), min(r.y2, h)
        if x1 <= x0 or y1 <= y0:
            continue
        t = thickness
        pixels[y0:min(y0 + t, y1), x0:x1] = intensity
        pixels[max(y1 - t, y0):y1, x0:x1] = intensity
        pixels[y0:y1, x0:min(x0 + t, x1)] = intensity
        pixels[y0:y1, max(x1 - t, x0):x1] = intensity
    return GrayImage(pixels)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_detect(args) -> int:
    face_cascade, eye_cascade = _load_cascades(args)
    cfg = _make_config(args, args.sf)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")

    if args.image:
        frames = [(os.path.splitext(os.path.basename(args.image))[0], args.image)]
    else:
        frames = _load_frames_dir(args.dir)
        if not frames:
            print(f"no frames found in {args.dir}", file=sys.stderr)
            return EXIT_EMPTY

    def process(item: tuple[str, str]):
        frame_id, path = item
        img = load_image(path)
        result = detect_frame(img, face_cascade, eye_cascade, cfg,
                              frame_id=frame_id, tilt=args.tilt)
        return img, result

    if args.threads == 1:
        processed = [process(item) for item in frames]
    else:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            processed = list(pool.map(process, frames))

    lines = [result.to_json_line() for _, result in processed]
    text = "".join(line + "\n" for line in lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.draw:
        os.makedirs(args.out_dir, exist_ok=True)
        for img, result in processed:
            boxes = [d.rect for d in result.faces] + [d.rect for d in result.eyes]
            out_path = os.path.join(args.out_dir, f"{result.frame_id}.det.pgm")
            save_pgm(_burn_boxes(img, boxes), out_path)
    return EXIT_OK


def _bench_sequences(frames_dir: str) -> dict[str, list[str]]:
    """Subject name -> frame paths; subdirectories are subjects, a flat
    directory is a single subject named after itself."""
    subjects: dict[str, list[str]] = {}
    for entry in sorted(os.listdir(frames_dir)):
        full = os.path.join(frames_dir, entry)
        if os.path.isdir(full):
            paths = [p for _, p in list_frames(full)]
            if paths:
                subjects[entry] = paths
    if not subjects:
        paths = [p for _, p in list_frames(frames_dir)]
        if paths:
            subjects[os.path.basename(os.path.normpath(frames_dir)) or "seq0"] = paths
    return subjects


def _cmd_bench(args) -> int:
    face_cascade, eye_cascade = _load_cascades(args)
    cfg = _make_config(args)
    for sf in args.sf:
        check_scale(sf)
    subjects = _bench_sequences(args.dir)
    if not subjects:
        print(f"no frames found in {args.dir}", file=sys.stderr)
        return EXIT_EMPTY
    sequences = {name: [load_image(p) for p in paths]
                 for name, paths in subjects.items()}
    rows = bench_speed(sequences, args.sf, (face_cascade, eye_cascade), cfg)
    written, warnings = emit_report(args.out_dir, bench_rows=rows)
    print("sf,mean_fps")
    for row in rows:
        print(f"{format_number(row.sf)},{format_number(round(row.mean_fps, 3))}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(written)} report files to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


def _run_sweep(args, face_cascade, eye_cascade):
    """Detection results for every frame at every SF in the sweep."""
    frames = _load_frames_dir(args.dir)
    if not frames:
        return None, None
    gt = load_ground_truth(args.gt)
    results_by_sf = {}
    for sf in args.sf:
        cfg = _make_config(args, sf)
        results_by_sf[sf] = [
            detect_frame(load_image(path), face_cascade, eye_cascade, cfg,
                         frame_id=frame_id)
            for frame_id, path in frames]
    return results_by_sf, gt


def _cmd_eval(args) -> int:
    face_cascade, eye_cascade = _load_cascades(args)
    results_by_sf, gt = _run_sweep(args, face_cascade, eye_cascade)
    if results_by_sf is None:
        print(f"no frames found in {args.dir}", file=sys.stderr)
        return EXIT_EMPTY
    accuracy_by_sf = {}
    for sf, results in results_by_sf.items():
        counts = confusion(results, gt, mode=args.mode, iou_tau=args.iou_tau)
        acc = accuracy(counts)
        accuracy_by_sf[sf] = acc
        print(f"sf={format_number(sf)} tp={counts.tp} fp={counts.fp} "
              f"tn={counts.tn} fn={counts.fn} "
              f"tpr={_rate(tpr(counts))} fpr={_rate(fpr(counts))} "
              f"accuracy={_rate(acc)}")
    written, warnings = emit_report(args.out_dir, accuracy_by_sf=accuracy_by_sf)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(written)} report files to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


def _rate(value) -> str:
    return "undefined" if value is None else format_number(float(value))


def _cmd_roc(args) -> int:
    face_cascade, eye_cascade = _load_cascades(args)
    results_by_sf, gt = _run_sweep(args, face_cascade, eye_cascade)
    if results_by_sf is None:
        print(f"no frames found in {args.dir}", file=sys.stderr)
        return EXIT_EMPTY
    curves_by_sf = {}
    auc_by_sf = {}
    for sf, results in results_by_sf.items():
        scored = [(r.frame_id, frame_score(r)) for r in results]
        curve = roc_curve(scored, gt)
        curves_by_sf[sf] = curve
        auc_by_sf[sf] = compute_auc(curve)
        print(f"sf={format_number(sf)} auc={_rate(auc_by_sf[sf])} "
              f"points={len(curve)}")
    written, warnings = emit_report(args.out_dir, auc_by_sf=auc_by_sf,
                                    curves_by_sf=curves_by_sf)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(written)} report files to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


def _default_ui_dir() -> str | None:
    """The frontend build, when it exists next to the installed package
    or in a development checkout."""
    here = os.path.dirname(os.path.abspath(__file__))
    for candidate in (os.path.join(here, "ui"),
                      os.path.normpath(os.path.join(
                          here, "..", "..", "frontend", "dist"))):
        if os.path.isfile(os.path.join(candidate, "index.html")):
            return candidate
    return None


def _cmd_annotate_serve(args) -> int:
    if not os.path.isdir(args.dir):
        raise UsageError(f"not a directory: {args.dir}")
    face = load_cascade(args.face_cascade) if args.face_cascade else None
    eye = load_cascade(args.eye_cascade) if args.eye_cascade else None
    ui_dir = args.ui_dir or _default_ui_dir()
    try:
        httpd = serve(args.host, args.port, args.dir, args.gt,
                      face_cascade=face, eye_cascade=eye, ui_dir=ui_dir)
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    host, port = httpd.server_address[:2]
    print(f"serving on http://{host}:{port}/ "
          f"({len(httpd.frame_ids)} frames, ui={'yes' if ui_dir else 'no'})")
    sys.stdout.flush()
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return EXIT_OK


# ---------------------------------------------------------------------------

_COMMANDS = {"detect": _cmd_detect, "bench": _cmd_bench, "eval": _cmd_eval,
             "roc": _cmd_roc, "annotate-serve": _cmd_annotate_serve}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return EXIT_ERROR
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (HaarscanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
