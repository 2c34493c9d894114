import threading

import pytest

from lexsimp_sidecar.server import ModelRegistry, create_server


@pytest.fixture
def sidecar_url():
    server = create_server(registry=ModelRegistry(mode="stub"))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}"
    finally:
        server.shutdown()
        server.server_close()
        thread.join()


@pytest.fixture
def make_sidecar():
    """Factory for extra server instances (restart-determinism checks)."""
    started = []

    def _start(registry=None):
        server = create_server(registry=registry or ModelRegistry(mode="stub"))
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        started.append((server, thread))
        return f"http://127.0.0.1:{server.server_port}"

    yield _start
    for server, thread in started:
        server.shutdown()
        server.server_close()
        thread.join()
