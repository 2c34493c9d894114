"""Model-inference sidecar: fill-mask, sentence embeddings, and beam-search
generation behind a small JSON-over-HTTP protocol, with a deterministic
model-free stub mode for tests and offline runs."""

__version__ = "0.1.0"

from .server import ModelRegistry, SidecarServer, create_server
from .stub import StubEmbedder, StubFillMask, StubGenerator

__all__ = ["__version__", "ModelRegistry", "SidecarServer", "create_server",
           "StubEmbedder", "StubFillMask", "StubGenerator"]
