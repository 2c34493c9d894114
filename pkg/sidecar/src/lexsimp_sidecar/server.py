"""HTTP server for the three model endpoints plus a health check.

Request handling is stateless; backends are resolved per (capability, model
identifier) through a registry whose lazy loads are lock-guarded, so
concurrent first requests for the same model cannot load it twice.

Endpoints (JSON in, JSON out):

* ``POST /fill_mask``  {model, text, k}                -> {model, results}
* ``POST /embed``      {model, sentence}               -> {model, vector}
* ``POST /generate``   {model, source, beam_width, max_candidates}
  -> {model, results}
* ``GET  /healthz``                                    -> {status, mode}

``results`` are [candidate, score] pairs ordered by descending score.
Errors come back as {"error": reason} with status 400 (bad payload),
404 (unknown route), or 500 (model failure).
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .stub import StubEmbedder, StubFillMask, StubGenerator


class RequestError(ValueError):
    pass


class ModelRegistry:
    """Resolves (capability, model id) to a backend, loading each at most once."""

    def __init__(self, mode: str = "stub",
                 fill_mask_table: dict[str, list[str]] | None = None,
                 generate_table: dict[str, list[str]] | None = None):
        if mode not in ("stub", "real"):
            raise ValueError(f"unknown sidecar mode {mode!r}")
        self.mode = mode
        self.fill_mask_table = fill_mask_table or {}
        self.generate_table = generate_table or {}
        self._backends: dict[tuple[str, str], object] = {}
        self._lock = threading.Lock()

    def _build(self, capability: str, model: str):
        if self.mode == "stub":
            if capability == "fill_mask":
                return StubFillMask(model, self.fill_mask_table)
            if capability == "embed":
                return StubEmbedder(model)
            return StubGenerator(model, self.generate_table)
        from . import models
        if capability == "fill_mask":
            return models.RealFillMask(model)
        if capability == "embed":
            return models.RealEmbedder(model)
        return models.RealGenerator(model)

    def get(self, capability: str, model: str):
        key = (capability, model)
        backend = self._backends.get(key)
        if backend is not None:
            return backend
        with self._lock:
            backend = self._backends.get(key)
            if backend is None:
                backend = self._build(capability, model)
                self._backends[key] = backend
        return backend


def _required_str(payload: dict, field: str) -> str:
    value = payload.get(field)
    if not isinstance(value, str) or not value.strip():
        raise RequestError(f"field {field!r} must be a non-empty string")
    return value


def _required_model(payload: dict) -> str:
    value = payload.get("model", "stub")
    if not isinstance(value, str) or not value:
        raise RequestError("field 'model' must be a non-empty string")
    return value


def handle_fill_mask(payload: dict, registry: ModelRegistry) -> dict:
    model = _required_model(payload)
    text = _required_str(payload, "text")
    k = payload.get("k", 10)
    if not isinstance(k, int) or k < 1:
        raise RequestError("field 'k' must be an integer >= 1")
    mask_count = text.count("[MASK]")
    if mask_count != 1:
        raise RequestError(
            f"payload must contain exactly one [MASK], found {mask_count}")
    backend = registry.get("fill_mask", model)
    results = [[candidate, score] for candidate, score
               in backend.fill_mask(text, k)
               if candidate and candidate.strip()]
    return {"model": model, "results": results}


def handle_embed(payload: dict, registry: ModelRegistry) -> dict:
    model = _required_model(payload)
    sentence = _required_str(payload, "sentence")
    backend = registry.get("embed", model)
    return {"model": model, "vector": backend.embed(sentence)}


def handle_generate(payload: dict, registry: ModelRegistry) -> dict:
    model = _required_model(payload)
    source = _required_str(payload, "source")
    beam_width = payload.get("beam_width", 15)
    max_candidates = payload.get("max_candidates", beam_width)
    if not isinstance(beam_width, int) or beam_width < 1:
        raise RequestError("field 'beam_width' must be an integer >= 1")
    if not isinstance(max_candidates, int) or max_candidates < 1:
        raise RequestError("field 'max_candidates' must be an integer >= 1")
    backend = registry.get("generate", model)
    results = backend.generate(source, beam_width, max_candidates)
    return {"model": model, "results": [[c, s] for c, s in results]}


_ROUTES = {
    "/fill_mask": handle_fill_mask,
    "/embed": handle_embed,
    "/generate": handle_generate,
}


class SidecarHandler(BaseHTTPRequestHandler):
    server_version = "lexsimp-sidecar/0.1"

    def log_message(self, *args):  # quiet by default; HTTP is the interface
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._reply(200, {"status": "ok", "mode": self.server.registry.mode})
        else:
            self._reply(404, {"error": f"no such endpoint {self.path}"})

    def do_POST(self):
        handler = _ROUTES.get(self.path)
        if handler is None:
            self._reply(404, {"error": f"no such endpoint {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length) or b"{}")
            if not isinstance(payload, dict):
                raise RequestError("request body must be a JSON object")
        except (ValueError, RequestError) as err:
            self._reply(400, {"error": f"bad request body: {err}"})
            return
        try:
            self._reply(200, handler(payload, self.server.registry))
        except RequestError as err:
            self._reply(400, {"error": str(err)})
        except Exception as err:  # model load/decode failures
            self._reply(500, {"error": str(err)})


class SidecarServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], registry: ModelRegistry):
        super().__init__(address, SidecarHandler)
        self.registry = registry


def create_server(host: str = "127.0.0.1", port: int = 0,
                  registry: ModelRegistry | None = None) -> SidecarServer:
    return SidecarServer((host, port), registry or ModelRegistry())
