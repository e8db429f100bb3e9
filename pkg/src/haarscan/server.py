"""Local HTTP backend for the browser annotation tool.

Serves the frame list and frame images, persists ground-truth records
(atomic temp-file + rename on every save, so a kill never loses an
acknowledged write), and exposes live detector output so the UI can
overlay machine boxes over the human's. Localhost-only by default; it
is a labeling tool, not a service.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .cascade import Cascade
from .errors import HaarscanError, SchemaError
from .evaluate import (GroundTruthRecord, load_ground_truth,
                       parse_ground_truth_record)
from .image import check_scale, encode_png, load_image
from .pipeline import PipelineConfig, detect_frame

FRAME_EXTENSIONS = (".pgm", ".png")
_MAX_BODY = 1 << 20  # ground-truth records are tiny; anything bigger is abuse


def list_frames(frames_dir) -> list[tuple[str, str]]:
    """(frame_id, path) pairs, sorted by frame_id; the id is the file
    stem. On a stem collision the lexicographically first file wins."""
    out: dict[str, str] = {}
    for name in sorted(os.listdir(frames_dir)):
        stem, ext = os.path.splitext(name)
        if ext.lower() in FRAME_EXTENSIONS and stem not in out:
            out[stem] = os.path.join(frames_dir, name)
    return sorted(out.items())


class AnnotationStore:
    """In-memory ground-truth map mirrored to a JSON-lines file.

    Every put rewrites the whole file through a temp file + rename in
    the same directory, so the on-disk state is always a complete,
    valid snapshot. Writes are serialized; last write wins per frame.
    """

    def __init__(self, gt_path: str):
        self.gt_path = gt_path
        self._lock = threading.Lock()
        self._records: dict[str, GroundTruthRecord] = {}
        if os.path.exists(gt_path):
            for rec in load_ground_truth(gt_path):
                self._records[rec.frame_id] = rec

    def get(self, frame_id: str) -> GroundTruthRecord | None:
        with self._lock:
            return self._records.get(frame_id)

    def annotated_ids(self) -> set[str]:
        with self._lock:
            return set(self._records)

    def put(self, record: GroundTruthRecord) -> None:
        with self._lock:
            self._records[record.frame_id] = record
            self._flush_locked()

    def _flush_locked(self) -> None:
        directory = os.path.dirname(os.path.abspath(self.gt_path)) or "."
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".gt-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                for frame_id in sorted(self._records):
                    fh.write(json.dumps(self._records[frame_id].to_json(),
                                        separators=(",", ":")) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_path, self.gt_path)
        except BaseException:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
            raise


class AnnotationServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, host: str, port: int, frames_dir: str, gt_path: str,
                 face_cascade: Cascade | None = None,
                 eye_cascade: Cascade | None = None,
                 ui_dir: str | None = None):
        self.frames = dict(list_frames(frames_dir))
        self.frame_ids = sorted(self.frames)
        self.store = AnnotationStore(gt_path)
        self.face_cascade = face_cascade
        self.eye_cascade = eye_cascade
        self.ui_dir = ui_dir
        super().__init__((host, port), _Handler)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: AnnotationServer

    # quiet by default; the CLI prints the URL once at startup
    def log_message(self, fmt, *args):
        pass

    # -- plumbing ----------------------------------------------------------

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _json(self, status: int, obj) -> None:
        self._send(status, json.dumps(obj, separators=(",", ":")).encode(),
                   "application/json")

    def _error(self, status: int, message: str) -> None:
        self._json(status, {"error": message})

    def _no_content(self) -> None:
        self.send_response(HTTPStatus.NO_CONTENT)
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- routing -----------------------------------------------------------

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        try:
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            if parts == ["api", "frames"]:
                return self._get_frames()
            if len(parts) == 4 and parts[:2] == ["api", "frames"] and parts[3] == "image":
                return self._get_image(parts[2])
            if len(parts) == 3 and parts[:2] == ["api", "annotations"]:
                return self._get_annotation(parts[2])
            if len(parts) == 3 and parts[:2] == ["api", "detections"]:
                return self._get_detections(parts[2], parse_qs(url.query))
            if not parts or not parts[0] == "api":
                return self._get_static(url.path)
            self._error(HTTPStatus.NOT_FOUND, f"unknown endpoint {url.path}")
        except BrokenPipeError:
            pass
        except Exception as exc:  # pragma: no cover - defensive
            self._error(HTTPStatus.INTERNAL_SERVER_ERROR, str(exc))

    def do_POST(self) -> None:  # noqa: N802
        try:
            parts = [p for p in urlparse(self.path).path.split("/") if p]
            if len(parts) == 3 and parts[:2] == ["api", "annotations"]:
                return self._post_annotation(parts[2])
            self._error(HTTPStatus.NOT_FOUND, f"unknown endpoint {self.path}")
        except BrokenPipeError:
            pass
        except Exception as exc:  # pragma: no cover - defensive
            self._error(HTTPStatus.INTERNAL_SERVER_ERROR, str(exc))

    # -- endpoints ---------------------------------------------------------

    def _get_frames(self) -> None:
        annotated = self.server.store.annotated_ids()
        self._json(HTTPStatus.OK,
                   [{"frame_id": fid, "annotated": fid in annotated}
                    for fid in self.server.frame_ids])

    def _get_image(self, frame_id: str) -> None:
        path = self.server.frames.get(frame_id)
        if path is None:
            return self._error(HTTPStatus.NOT_FOUND, f"unknown frame {frame_id!r}")
        if path.lower().endswith(".png"):
            with open(path, "rb") as fh:
                blob = fh.read()
        else:
            blob = encode_png(load_image(path))
        self._send(HTTPStatus.OK, blob, "image/png")

    def _get_annotation(self, frame_id: str) -> None:
        if frame_id not in self.server.frames:
            return self._error(HTTPStatus.NOT_FOUND, f"unknown frame {frame_id!r}")
        rec = self.server.store.get(frame_id)
        if rec is None:
            return self._error(HTTPStatus.NOT_FOUND,
                               f"frame {frame_id!r} has no annotation yet")
        self._json(HTTPStatus.OK, rec.to_json())

    def _get_detections(self, frame_id: str, query: dict) -> None:
        path = self.server.frames.get(frame_id)
        if path is None:
            return self._error(HTTPStatus.NOT_FOUND, f"unknown frame {frame_id!r}")
        if self.server.face_cascade is None:
            return self._error(HTTPStatus.SERVICE_UNAVAILABLE,
                               "server started without a face cascade; "
                               "detections are unavailable")
        try:
            sf = check_scale(float(query.get("sf", ["1"])[0]))
        except (ValueError, HaarscanError) as exc:
            return self._error(HTTPStatus.BAD_REQUEST, f"bad sf parameter: {exc}")
        cfg = PipelineConfig(sf=sf)
        result = detect_frame(load_image(path), self.server.face_cascade,
                              self.server.eye_cascade, cfg, frame_id=frame_id)
        self._json(HTTPStatus.OK, result.to_json())

    def _post_annotation(self, frame_id: str) -> None:
        if frame_id not in self.server.frames:
            return self._error(HTTPStatus.NOT_FOUND, f"unknown frame {frame_id!r}")
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            return self._error(HTTPStatus.BAD_REQUEST, "bad Content-Length")
        if not 0 < length <= _MAX_BODY:
            return self._error(HTTPStatus.BAD_REQUEST,
                               f"body length must be in (0, {_MAX_BODY}]")
        body = self.rfile.read(length)
        try:
            obj = json.loads(body)
        except json.JSONDecodeError as exc:
            return self._error(HTTPStatus.BAD_REQUEST, f"invalid JSON body: {exc}")
        if isinstance(obj, dict) and "frame_id" not in obj:
            obj = {**obj, "frame_id": frame_id}
        try:
            rec = parse_ground_truth_record(obj)
        except SchemaError as exc:
            return self._error(HTTPStatus.BAD_REQUEST, str(exc))
        if rec.frame_id != frame_id:
            return self._error(
                HTTPStatus.BAD_REQUEST,
                f"body frame_id {rec.frame_id!r} does not match URL {frame_id!r}")
        self.server.store.put(rec)
        self._no_content()

    # -- static UI ---------------------------------------------------------

    _PLACEHOLDER = (b"<!doctype html><title>annotation backend</title>"
                    b"<h1>annotation backend running</h1>"
                    b"<p>No UI bundle configured; the JSON API is live under "
                    b"<code>/api/</code>.</p>")

    _CONTENT_TYPES = {".html": "text/html; charset=utf-8",
                      ".js": "text/javascript; charset=utf-8",
                      ".css": "text/css; charset=utf-8",
                      ".map": "application/json",
                      ".svg": "image/svg+xml",
                      ".png": "image/png"}

    def _get_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            if path in ("/", "/index.html"):
                return self._send(HTTPStatus.OK, self._PLACEHOLDER,
                                  "text/html; charset=utf-8")
            return self._error(HTTPStatus.NOT_FOUND, f"no such path {path}")
        rel = path.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(ui_dir, rel))
        root = os.path.realpath(ui_dir)
        if not (full == root or full.startswith(root + os.sep)) or not os.path.isfile(full):
            return self._error(HTTPStatus.NOT_FOUND, f"no such path {path}")
        ext = os.path.splitext(full)[1].lower()
        with open(full, "rb") as fh:
            self._send(HTTPStatus.OK, fh.read(),
                       self._CONTENT_TYPES.get(ext, "application/octet-stream"))


def serve(host: str, port: int, frames_dir: str, gt_path: str,
          face_cascade: Cascade | None = None,
          eye_cascade: Cascade | None = None,
          ui_dir: str | None = None) -> AnnotationServer:
    """Bind and return the server (caller decides when to serve_forever)."""
    return AnnotationServer(host, port, frames_dir, gt_path,
                            face_cascade, eye_cascade, ui_dir)
