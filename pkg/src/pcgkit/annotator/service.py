"""HTTP/JSON service backing the segment-review UI.

Endpoints:
    GET  /segments?status=&page=&page_size=   paged review items
    GET  /segments/{id}/audio                 mono 16-bit WAV at native rate
    GET  /segments/{id}/image?kind=wst|stft   PNG of the feature map
    POST /segments/{id}/label {"to": ...}     confirm or relabel-to-Unknown
    GET  /export                              JSONL of relabeled segments

The single-page review UI, when a directory is supplied, is served statically
from /; CORS is answered for localhost origins so a dev-served UI can talk to
the API as well.
"""
from __future__ import annotations

import json
import threading
from dataclasses import asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from pcgkit import wavio
from pcgkit.annotator.render import DEFAULT_SCALE, render_feature_png
from pcgkit.annotator.state import ReviewState
from pcgkit.features import FeatureKind, FeatureParams, extract_feature_map
from pcgkit.pipeline.manifest import RelabelRuleError
from pcgkit.preprocess.store import SegmentStore

_IMAGE_KINDS = {"wst": FeatureKind.WST, "stft": FeatureKind.STFT}

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


class AnnotatorService:
    """Owns the review state, the segment store, and an image cache."""

    def __init__(self, workdir, ui_dir=None, feature_params: FeatureParams | None = None) -> None:
        self.workdir = Path(workdir)
        self.state = ReviewState(workdir)
        self.store = SegmentStore(workdir)
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self.params = feature_params or FeatureParams()
        self._image_cache: dict[tuple, bytes] = {}
        self._cache_lock = threading.Lock()

    def audio_bytes(self, segment_id: str) -> bytes:
        entry = self.store.get(segment_id)
        samples = self.store.load_samples(segment_id)
        peak = float(max(abs(samples.max()), abs(samples.min()), 1e-12))
        return wavio.wav_bytes(samples / peak, entry.sample_rate_hz, "int16")

    def image_bytes(self, segment_id: str, kind: str) -> bytes:
        key = (segment_id, kind, self.params.hash_hex(_IMAGE_KINDS[kind]), DEFAULT_SCALE)
        with self._cache_lock:
            cached = self._image_cache.get(key)
        if cached is not None:
            return cached
        entry = self.store.get(segment_id)
        samples = self.store.load_samples(segment_id)
        fm = extract_feature_map(
            samples, entry.sample_rate_hz, _IMAGE_KINDS[kind], self.params, log_scatter=False
        )
        png = render_feature_png(fm.data)
        with self._cache_lock:
            self._image_cache[key] = png
        return png

    def make_server(self, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
        service = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet by default
                pass

            def _cors_headers(self):
                origin = self.headers.get("Origin", "")
                if origin.startswith("http://localhost") or origin.startswith("http://127.0.0.1"):
                    self.send_header("Access-Control-Allow-Origin", origin)
                    self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                    self.send_header("Access-Control-Allow-Headers", "Content-Type")

            def _send(self, code: int, body: bytes, content_type: str):
                self.send_response(code)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self._cors_headers()
                self.end_headers()
                self.wfile.write(body)

            def _send_json(self, code: int, payload):
                self._send(code, json.dumps(payload, sort_keys=True).encode(), "application/json")

            def do_OPTIONS(self):
                self.send_response(204)
                self._cors_headers()
                self.send_header("Content-Length", "0")
                self.end_headers()

            def do_GET(self):
                url = urlparse(self.path)
                parts = [p for p in url.path.split("/") if p]
                query = {k: v[0] for k, v in parse_qs(url.query).items()}
                try:
                    if url.path == "/segments":
                        self._list_segments(query)
                    elif len(parts) == 3 and parts[0] == "segments" and parts[2] == "audio":
                        self._segment_audio(parts[1])
                    elif len(parts) == 3 and parts[0] == "segments" and parts[2] == "image":
                        self._segment_image(parts[1], query)
                    elif url.path == "/export":
                        self._export()
                    else:
                        self._static(url.path)
                except KeyError:
                    self._send_json(404, {"error": "unknown segment"})
                except ValueError as exc:
                    self._send_json(400, {"error": str(exc)})

            def _list_segments(self, query):
                try:
                    page = int(query.get("page", "0"))
                    page_size = int(query.get("page_size", "50"))
                except ValueError:
                    raise ValueError("page and page_size must be integers") from None
                status = query.get("status") or None
                items, total = service.state.list_items(status, page, page_size)
                self._send_json(
                    200,
                    {
                        "items": [asdict(i) for i in items],
                        "total": total,
                        "page": page,
                        "page_size": page_size,
                        "counts": service.state.class_counts(),
                    },
                )

            def _segment_audio(self, segment_id):
                self._send(200, service.audio_bytes(segment_id), "audio/wav")

            def _segment_image(self, segment_id, query):
                kind = query.get("kind", "wst")
                if kind not in _IMAGE_KINDS:
                    raise ValueError(f"kind must be one of {sorted(_IMAGE_KINDS)}")
                service.store.get(segment_id)  # 404 before rendering
                self._send(200, service.image_bytes(segment_id, kind), "image/png")

            def _export(self):
                lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in service.state.export_relabels())
                self._send(200, lines.encode(), "application/jsonl")

            def _static(self, path):
                if service.ui_dir is None:
                    self._send_json(404, {"error": "no such endpoint"})
                    return
                rel = "index.html" if path == "/" else path.lstrip("/")
                target = (service.ui_dir / rel).resolve()
                if not str(target).startswith(str(service.ui_dir)) or not target.is_file():
                    self._send_json(404, {"error": "not found"})
                    return
                ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
                self._send(200, target.read_bytes(), ctype)

            def do_POST(self):
                url = urlparse(self.path)
                parts = [p for p in url.path.split("/") if p]
                if len(parts) != 3 or parts[0] != "segments" or parts[2] != "label":
                    self._send_json(404, {"error": "no such endpoint"})
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    body = json.loads(self.rfile.read(length) or b"{}")
                    to = body["to"]
                except (ValueError, KeyError):
                    self._send_json(400, {"error": 'body must be JSON like {"to": "Unknown"}'})
                    return
                try:
                    item = service.state.decide(parts[1], to)
                except KeyError:
                    self._send_json(404, {"error": "unknown segment"})
                except RelabelRuleError as exc:
                    self._send_json(409, {"error": str(exc)})
                except ValueError as exc:
                    self._send_json(400, {"error": str(exc)})
                else:
                    self._send_json(200, asdict(item))

        return ThreadingHTTPServer((host, port), Handler)


def serve(workdir, host: str = "127.0.0.1", port: int = 8377, ui_dir=None) -> None:
    """Blocking entry point used by the CLI."""
    service = AnnotatorService(workdir, ui_dir=ui_dir)
    server = service.make_server(host, port)
    print(f"annotator listening on http://{host}:{server.server_address[1]}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
