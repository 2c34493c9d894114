"""HTTP client for the model-inference sidecar.

The sidecar exposes three JSON-over-HTTP endpoints plus a health check:

* ``POST /fill_mask``  {"model": str, "text": str, "k": int}
  -> {"model": str, "results": [[candidate, score], ...]} (score descending)
* ``POST /embed``      {"model": str, "sentence": str}
  -> {"model": str, "vector": [float, ...]}
* ``POST /generate``   {"model": str, "source": str, "beam_width": int,
  "max_candidates": int} -> {"model": str, "results": [[candidate, score], ...]}
* ``GET /healthz``     -> {"status": "ok", ...}

The core never loads models itself; model identifiers are opaque strings
passed through to the sidecar.
"""

from __future__ import annotations

from typing import Any, Sequence

import requests

from .errors import BackendError, BackendUnavailable

DEFAULT_TIMEOUT = 60.0


class SidecarClient:
    """Thin wrapper over the sidecar endpoints; safe for concurrent use."""

    def __init__(self, base_url: str, fill_mask_model: str = "stub",
                 embed_model: str = "stub", generate_model: str = "stub",
                 timeout: float = DEFAULT_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.fill_mask_model = fill_mask_model
        self.embed_model = embed_model
        self.generate_model = generate_model
        self.timeout = timeout
        self.name = f"sidecar@{self.base_url}"

    def _post(self, endpoint: str, payload: dict[str, Any]) -> dict[str, Any]:
        url = f"{self.base_url}/{endpoint.lstrip('/')}"
        try:
            response = requests.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as err:
            raise BackendUnavailable(f"cannot reach sidecar: {err}",
                                     backend=self.name) from err
        if response.status_code != 200:
            detail = ""
            try:
                detail = response.json().get("error", "")
            except ValueError:
                detail = response.text[:200]
            raise BackendError(
                f"{endpoint} returned HTTP {response.status_code}: {detail}",
                backend=self.name)
        try:
            body = response.json()
        except ValueError as err:
            raise BackendError(f"{endpoint} returned a non-JSON body",
                               backend=self.name) from err
        expected = payload.get("model")
        if expected is not None and body.get("model") != expected:
            raise BackendError(
                f"{endpoint} answered for model {body.get('model')!r}, "
                f"requested {expected!r}", backend=self.name)
        return body

    def healthz(self) -> dict[str, Any]:
        url = f"{self.base_url}/healthz"
        try:
            response = requests.get(url, timeout=self.timeout)
        except requests.RequestException as err:
            raise BackendUnavailable(f"cannot reach sidecar: {err}",
                                     backend=self.name) from err
        if response.status_code != 200:
            raise BackendError(f"healthz returned HTTP {response.status_code}",
                               backend=self.name)
        return response.json()

    def fill_mask(self, text: str, k: int) -> list[tuple[str, float]]:
        body = self._post("fill_mask", {
            "model": self.fill_mask_model, "text": text, "k": k})
        return [(str(candidate), float(score))
                for candidate, score in body.get("results", [])]

    def embed(self, sentence: str) -> list[float]:
        body = self._post("embed", {
            "model": self.embed_model, "sentence": sentence})
        return [float(x) for x in body.get("vector", [])]

    def generate(self, source: str, beam_width: int = 15,
                 max_candidates: int = 15) -> list[tuple[str, float]]:
        body = self._post("generate", {
            "model": self.generate_model, "source": source,
            "beam_width": beam_width, "max_candidates": max_candidates})
        return [(str(candidate), float(score))
                for candidate, score in body.get("results", [])]


class RemoteEmbedder:
    """EmbeddingProvider backed by the sidecar /embed endpoint."""

    def __init__(self, client: SidecarClient):
        self.client = client
        self.name = f"{client.name}/{client.embed_model}"
        self._dimension: int | None = None

    @property
    def dimension(self) -> int:
        if self._dimension is None:
            self._dimension = len(self.client.embed("the"))
        return self._dimension

    def embed(self, sentence: str) -> Sequence[float]:
        vector = self.client.embed(sentence)
        if self._dimension is None:
            self._dimension = len(vector)
        elif len(vector) != self._dimension:
            raise BackendError(
                f"embedding dimension changed from {self._dimension} to "
                f"{len(vector)}", backend=self.name)
        return vector
