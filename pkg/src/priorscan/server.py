"""Serve a knowledge base over HTTP with the batch ``/known`` endpoint.

The server holds an immutable snapshot of the KB set loaded at startup;
request handling is stateless and safe under concurrent connections.

Wire format:
  POST /known   body: JSON array of identifier strings (up to ``max_batch``)
                200: object with one key per distinct input identifier,
                value ``{"known": <bool>}``
                400: malformed body / malformed identifier / oversize batch
                413: body exceeds the byte limit
  GET  /health  200: ``{"status": "ok", "kb_size": <int>}``
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .ids import SwhidError, parse_swhid, render_swhid
from .kb import KbError, KbSet, load_kb_file

logger = logging.getLogger(__name__)

DEFAULT_MAX_BATCH = 1000
DEFAULT_MAX_BODY_BYTES = 4 * 1024 * 1024


@dataclass(frozen=True)
class ServerConfig:
    kb_path: str | Path
    host: str = "127.0.0.1"
    port: int = 8080
    max_batch: int = DEFAULT_MAX_BATCH
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.max_batch < 1:
            raise ValueError("max_batch must be positive")


class RequestError(Exception):
    """A client error; ``status`` is the HTTP status to answer with."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def handle_known(body: object, kb: KbSet, max_batch: int = DEFAULT_MAX_BATCH) -> dict:
    """Answer a decoded ``/known`` request body against the KB set.

    Returns one key per distinct input identifier; unknown ids get
    ``{"known": false}``, never an omission.

    Raises:
        RequestError: 400 for a non-array body, a malformed identifier, or a
            batch larger than ``max_batch``.
    """
    if not isinstance(body, list):
        raise RequestError(400, "request body must be a JSON array of SWHID strings")
    if len(body) > max_batch:
        raise RequestError(400, f"batch of {len(body)} ids exceeds max_batch={max_batch}")
    result: dict[str, dict] = {}
    for element in body:
        if not isinstance(element, str):
            raise RequestError(400, f"batch element is not a string: {element!r}")
        try:
            node_id = parse_swhid(element)
        except SwhidError as exc:
            raise RequestError(400, f"malformed identifier {element!r}: {exc}") from exc
        result[render_swhid(node_id)] = {"known": node_id in kb.ids}
    return result


class _KbRequestHandler(BaseHTTPRequestHandler):
    server_version = "priorscan-kb"
    protocol_version = "HTTP/1.1"

    # set by make_server()
    kb: KbSet
    max_batch: int
    max_body_bytes: int

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):  # noqa: N802 (http.server naming)
        if self.path != "/health":
            self._send_json(404, {"error": f"no such endpoint: {self.path}"})
            return
        self._send_json(200, {"status": "ok", "kb_size": len(self.kb)})

    def do_POST(self):  # noqa: N802
        if self.path != "/known":
            self._send_json(404, {"error": f"no such endpoint: {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            self._send_json(400, {"error": "invalid Content-Length"})
            return
        if length > self.max_body_bytes:
            self._send_json(413, {"error": f"body exceeds {self.max_body_bytes} bytes"})
            return
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except ValueError as exc:
            self._send_json(400, {"error": f"body is not valid JSON: {exc}"})
            return
        try:
            result = handle_known(body, self.kb, self.max_batch)
        except RequestError as exc:
            self._send_json(exc.status, {"error": str(exc)})
            return
        self._send_json(200, result)

    def log_message(self, format, *args):  # quiet by default, route to logging
        logger.debug("%s %s", self.address_string(), format % args)


def make_server(kb: KbSet, host: str = "127.0.0.1", port: int = 0,
                max_batch: int = DEFAULT_MAX_BATCH,
                max_body_bytes: int = DEFAULT_MAX_BODY_BYTES) -> ThreadingHTTPServer:
    """Bind a server for an already-loaded KB set (port 0 picks a free port)."""
    handler = type("KbRequestHandler", (_KbRequestHandler,), {
        "kb": kb, "max_batch": max_batch, "max_body_bytes": max_body_bytes,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve(config: ServerConfig) -> None:
    """Load the KB file and serve until terminated.

    Raises:
        KbError: the KB file cannot be loaded.
        OSError: the address cannot be bound.
    """
    kb = load_kb_file(config.kb_path)
    server = make_server(kb, config.host, config.port,
                         max_batch=config.max_batch,
                         max_body_bytes=config.max_body_bytes)
    host, port = server.server_address[:2]
    logger.info("serving %d known ids from %s on %s:%d", len(kb), config.kb_path, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
