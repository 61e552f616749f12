"""HTTP query service over a trained snapshot.

A snapshot bundles the text model, visual regressor, retrieval index,
and per-item metadata. The server reads one snapshot reference per
request and never mutates it, so replacing the snapshot is one atomic
assignment and in-flight requests finish on the version they started
with.

Endpoints (JSON unless noted):
  GET  /api/health               service and model status
  GET  /api/models               artifact metadata
  POST /api/query                weighted multimodal retrieval
  GET  /api/neighbors/{id}?k=N   neighbors of a stored item
  GET  /api/image/{id}           thumbnail bytes (PNG placeholder if absent)
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from .corpus import tokenize
from .errors import AllOOVError, JointSpaceError, ZeroVectorError
from .retrieval import compose_query, search


@dataclass
class ItemInfo:
    tags: tuple
    thumb: str


@dataclass
class ServiceSnapshot:
    text_model: object
    regressor: object
    index: object
    items: dict = field(default_factory=dict)  # id -> ItemInfo
    aggregation: str = "tfidf_mean"
    image_root: str | None = None

    def __post_init__(self):
        self.positions = {item_id: i for i, item_id in enumerate(self.index.ids)}


def build_snapshot(ds, text_model, regressor, index, aggregation="tfidf_mean",
                   image_root=None) -> ServiceSnapshot:
    items = {
        doc.id: ItemInfo(tags=tuple(sorted(doc.tags)), thumb=f"/api/image/{doc.id}")
        for doc in ds.documents
    }
    return ServiceSnapshot(
        text_model=text_model,
        regressor=regressor,
        index=index,
        items=items,
        aggregation=aggregation,
        image_root=image_root,
    )


class RequestProblem(Exception):
    """Client-side request fault carrying the HTTP status to answer with."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def resolve_term(snapshot: ServiceSnapshot, term) -> tuple[np.ndarray, float]:
    if not isinstance(term, dict):
        raise RequestProblem(400, "each term must be an object")
    kind = term.get("type")
    value = term.get("value")
    weight = term.get("weight", 1.0)
    if not isinstance(weight, (int, float)) or not np.isfinite(weight):
        raise RequestProblem(400, f"term weight must be a finite number, got {weight!r}")
    if kind == "text":
        if not isinstance(value, str):
            raise RequestProblem(400, "text term value must be a string")
        tokens = tokenize(value)
        try:
            vec = snapshot.text_model.embed_document(tokens, snapshot.aggregation)
        except AllOOVError:
            raise RequestProblem(400, f"text term {value!r} has no known word")
        return vec, float(weight)
    if kind == "image_id":
        pos = snapshot.positions.get(str(value))
        if pos is None:
            raise RequestProblem(400, f"image id {value!r} is not in the index")
        return snapshot.index.matrix[pos].astype(np.float64), float(weight)
    if kind == "vector":
        vec = np.asarray(value, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != snapshot.index.dim:
            raise RequestProblem(
                400, f"vector term must have dimension {snapshot.index.dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise RequestProblem(400, "vector term must be finite")
        return vec, float(weight)
    raise RequestProblem(400, f"unknown term type {kind!r}")


def run_query(snapshot: ServiceSnapshot, body) -> dict:
    if not isinstance(body, dict):
        raise RequestProblem(400, "request body must be an object")
    terms = body.get("terms")
    if not isinstance(terms, list) or not terms:
        raise RequestProblem(400, "terms must be a nonempty array")
    k = body.get("k", 5)
    if not isinstance(k, int) or k < 1:
        raise RequestProblem(400, "k must be a positive integer")
    resolved = [resolve_term(snapshot, t) for t in terms]
    try:
        qvec = compose_query(resolved)
        ranked = search(snapshot.index, qvec, k)
    except ZeroVectorError:
        raise RequestProblem(400, "query terms cancel out to a zero vector")
    results = []
    for item_id, score in ranked:
        info = snapshot.items.get(item_id)
        results.append(
            {
                "id": item_id,
                "score": score,
                "tags": list(info.tags) if info else [],
                "thumb": info.thumb if info else f"/api/image/{item_id}",
            }
        )
    return {"results": results}


def run_neighbors(snapshot: ServiceSnapshot, item_id: str, k: int) -> dict:
    pos = snapshot.positions.get(item_id)
    if pos is None:
        raise RequestProblem(404, f"unknown id {item_id!r}")
    if k < 1:
        raise RequestProblem(400, "k must be a positive integer")
    qvec = snapshot.index.matrix[pos].astype(np.float64)
    ranked = search(snapshot.index, qvec, k + 1)
    results = []
    for rid, score in ranked:
        if rid == item_id:
            continue
        info = snapshot.items.get(rid)
        results.append(
            {
                "id": rid,
                "score": score,
                "tags": list(info.tags) if info else [],
                "thumb": info.thumb if info else f"/api/image/{rid}",
            }
        )
    return {"id": item_id, "results": results[:k]}


def health_payload(snapshot: ServiceSnapshot) -> dict:
    return {
        "status": "ok",
        "method": snapshot.text_model.method,
        "dim": snapshot.index.dim,
        "index_size": len(snapshot.index),
    }


def models_payload(snapshot: ServiceSnapshot) -> dict:
    reg = snapshot.regressor
    return {
        "text": {
            "method": snapshot.text_model.method,
            "dim": snapshot.text_model.dim,
            "vocab_size": len(snapshot.text_model.vocab),
            "aggregation": snapshot.aggregation,
        },
        "regressor": {
            "layer_shapes": [list(w.shape) for w in reg.weights],
            "iterations": reg.iteration,
        },
        "index": {"size": len(snapshot.index), "dim": snapshot.index.dim},
    }


def placeholder_png(item_id: str, size: int = 50) -> bytes:
    """Deterministic solid-color PNG derived from the id."""
    h = 2166136261
    for byte in item_id.encode("utf-8"):
        h = ((h ^ byte) * 16777619) & 0xFFFFFFFF
    rgb = bytes(((h >> 16) & 0xFF, (h >> 8) & 0xFF, h & 0xFF))

    def chunk(kind: bytes, payload: bytes) -> bytes:
        raw = kind + payload
        return struct.pack(">I", len(payload)) + raw + struct.pack(">I", zlib.crc32(raw))

    ihdr = struct.pack(">IIBBBBB", size, size, 8, 2, 0, 0, 0)
    scanlines = (b"\x00" + rgb * size) * size
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(scanlines))
        + chunk(b"IEND", b"")
    )


def find_image_file(image_root: str | None, item_id: str):
    if not image_root:
        return None
    base = Path(image_root)
    if any(sep in item_id for sep in ("/", "\\", "..")):
        return None
    for ext in (".png", ".jpg", ".jpeg"):
        candidate = base / f"{item_id}{ext}"
        if candidate.is_file():
            return candidate
    return None


_CONTENT_TYPES = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg"}


class JointSpaceService:
    """Holds the current snapshot; swap_snapshot is the atomic reload."""

    def __init__(self, snapshot: ServiceSnapshot):
        self._snapshot = snapshot

    @property
    def snapshot(self) -> ServiceSnapshot:
        return self._snapshot

    def swap_snapshot(self, snapshot: ServiceSnapshot) -> None:
        self._snapshot = snapshot


class _Handler(BaseHTTPRequestHandler):
    service: JointSpaceService = None

    def log_message(self, fmt, *args):  # tests and demos want quiet servers
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _send_bytes(self, content_type: str, data: bytes) -> None:
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        snapshot = self.service.snapshot
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts == ["api", "health"]:
                self._send_json(200, health_payload(snapshot))
            elif parts == ["api", "models"]:
                self._send_json(200, models_payload(snapshot))
            elif len(parts) == 3 and parts[:2] == ["api", "neighbors"]:
                params = parse_qs(url.query)
                try:
                    k = int(params.get("k", ["5"])[0])
                except ValueError:
                    raise RequestProblem(400, "k must be an integer")
                self._send_json(200, run_neighbors(snapshot, parts[2], k))
            elif len(parts) == 3 and parts[:2] == ["api", "image"]:
                item_id = parts[2]
                if item_id not in snapshot.items and item_id not in snapshot.positions:
                    raise RequestProblem(404, f"unknown id {item_id!r}")
                found = find_image_file(snapshot.image_root, item_id)
                if found is not None:
                    self._send_bytes(
                        _CONTENT_TYPES[found.suffix.lower()], found.read_bytes()
                    )
                else:
                    self._send_bytes("image/png", placeholder_png(item_id))
            else:
                raise RequestProblem(404, f"no route for {url.path}")
        except RequestProblem as issue:
            self._send_json(issue.status, {"error": str(issue)})
        except JointSpaceError as issue:
            self._send_json(400, {"error": str(issue)})

    def do_POST(self):
        snapshot = self.service.snapshot
        url = urlparse(self.path)
        try:
            if url.path != "/api/query":
                raise RequestProblem(404, f"no route for {url.path}")
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            try:
                body = json.loads(raw.decode("utf-8")) if raw else {}
            except (UnicodeDecodeError, json.JSONDecodeError):
                raise RequestProblem(400, "request body must be valid JSON")
            self._send_json(200, run_query(snapshot, body))
        except RequestProblem as issue:
            self._send_json(issue.status, {"error": str(issue)})
        except JointSpaceError as issue:
            self._send_json(400, {"error": str(issue)})


def make_server(service: JointSpaceService, host: str = "127.0.0.1", port: int = 8765):
    """Build (not start) a threading HTTP server bound to the service."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
