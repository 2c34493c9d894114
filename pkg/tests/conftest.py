import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from lexsimp.control_tokens import HashEmbedder
from lexsimp.corpus import Instance
from lexsimp.lexicon import Syllabifier, build_lexicon

# The worked English example used across the suite: one sentence, one
# annotated complex word, eight distinct gold substitutes with counts.
MOTIVE_SENTENCE = "The motive for the killings was not known."
MOTIVE_GOLD = (
    ("reason", 16), ("incentive", 2), ("intention", 2), ("aim", 1),
    ("cause", 1), ("motive", 1), ("inspiration", 1), ("object", 1),
)

WORD_POOL = [
    "the", "of", "and", "reason", "cause", "aim", "motive", "incentive",
    "intention", "inspiration", "object", "goal", "purpose", "idea", "plan",
    "answer", "basis", "excuse", "point", "target", "drive", "spur", "wish",
    "urge", "need", "want", "root", "seed", "core", "heart",
]


def make_instance(sentence=MOTIVE_SENTENCE, complex_word="motive",
                  gold=MOTIVE_GOLD, language="en", id="en-00001",
                  word_index=None):
    return Instance(id=id, language=language, sentence=sentence,
                    complex_word=complex_word, gold=tuple(gold),
                    word_index=word_index)


def random_instances(count, seed, language="en"):
    """Small synthetic instances with varied gold sizes and counts."""
    rng = random.Random(seed)
    instances = []
    for i in range(count):
        complex_word = rng.choice(WORD_POOL[3:])
        filler = rng.sample([w for w in WORD_POOL if w != complex_word], 4)
        sentence = (f"{filler[0].capitalize()} {filler[1]} {complex_word} "
                    f"{filler[2]} {filler[3]}.")
        gold_words = rng.sample([w for w in WORD_POOL if w != complex_word],
                                rng.randint(1, 6))
        gold = tuple((w, rng.randint(1, 8)) for w in gold_words)
        gold = tuple(sorted(gold, key=lambda pair: -pair[1]))
        instances.append(Instance(
            id=f"{language}-{i:05d}", language=language, sentence=sentence,
            complex_word=complex_word, gold=gold))
    return instances


@pytest.fixture
def motive_instance():
    return make_instance()


@pytest.fixture
def tiny_lexicon():
    # Frequency-descending; covers the motive-example words.
    return build_lexicon(
        ["the", "of", "and", "reason", "cause", "aim", "motive", "object",
         "intention", "incentive", "inspiration"], "en")


@pytest.fixture
def en_syllabifier():
    return Syllabifier("en")


@pytest.fixture
def hash_embedder():
    return HashEmbedder()


class _SidecarHandler(BaseHTTPRequestHandler):
    """Minimal in-test server speaking the sidecar wire protocol."""

    def log_message(self, *args):
        pass

    def _reply(self, status, payload):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._reply(200, {"status": "ok", "mode": "fake"})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        request = json.loads(self.rfile.read(length) or b"{}")
        behavior = self.server.behavior
        echoed = behavior.get("echo_model") or request.get("model")
        if self.path == "/fill_mask":
            if "[MASK]" not in request.get("text", ""):
                self._reply(400, {"error": "payload has no [MASK]",
                                  "model": echoed})
                return
            results = behavior["fill_mask"](request)
            self._reply(200, {"model": echoed, "results": results})
        elif self.path == "/embed":
            vector = behavior["embed"](request)
            self._reply(200, {"model": echoed, "vector": vector})
        elif self.path == "/generate":
            results = behavior["generate"](request)
            self._reply(200, {"model": echoed, "results": results})
        else:
            self._reply(404, {"error": "not found"})


@pytest.fixture
def fake_sidecar():
    """Start a protocol-compatible fake server; yields (url, behavior dict).

    Tests replace entries of the behavior dict to shape responses.
    """
    embedder = HashEmbedder()
    behavior = {
        "fill_mask": lambda request: [
            [w, 1.0 - 0.05 * i]
            for i, w in enumerate(["reason", "cause", "aim", "goal", "purpose",
                                   "plan", "idea", "point", "basis", "excuse",
                                   "answer", "target"])
        ][: request.get("k", 10)],
        "embed": lambda request: embedder.embed(request.get("sentence", "")),
        "generate": lambda request: [
            ["reason", 0.9], ["cause", 0.8], ["aim", 0.7],
        ][: request.get("beam_width", 15)],
    }
    server = ThreadingHTTPServer(("127.0.0.1", 0), _SidecarHandler)
    server.behavior = behavior
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", behavior
    finally:
        server.shutdown()
        thread.join()
