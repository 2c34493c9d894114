"""The five control-token values steering candidate generation.

For a (complex word, substitute, sentence) triple the tokens are:

* CR -- candidate ranking, from the gold position: piecewise map
  1 -> 1.00, 2 -> 0.75, 3 -> 0.50, 4 -> 0.25, 5+ -> 0.10.
* WL -- character-length ratio substitute / complex word (Unicode scalars).
* WR -- frequency-rank ratio substitute / complex word.
* WS -- syllable-count ratio substitute / complex word.
* SS -- cosine similarity between sentence embeddings of the original
  sentence and the sentence with the complex word replaced, clamped to [0, 1].

WL/WR/WS/SS are quantized to the 0.05 grid inside [0.50, 2.00] (a closed
31-value vocabulary per token, the same grid the inference-time value search
samples). CR keeps its five fixed values and is never clamped.
"""

from __future__ import annotations

import hashlib
import math
import re
import struct
from dataclasses import dataclass
from typing import Protocol, Sequence

from .corpus import Instance, replace_complex_word
from .errors import EmbedderError, ToolkitError
from .lexicon import FrequencyLexicon, Syllabifier, rank_of

GRID_MIN = 0.50
GRID_MAX = 2.00
GRID_STEP = 0.05

# Candidate-ranking values by gold position (1-based); position >= 5 -> 0.10.
CR_BY_POSITION = {1: 1.00, 2: 0.75, 3: 0.50, 4: 0.25}
CR_SATURATION = 0.10
CR_VALUES = (1.00, 0.75, 0.50, 0.25, 0.10)

TOKEN_ORDER = ("CR", "WL", "WR", "WS", "SS")

_TOKEN_BLOCK = re.compile(
    r"<CR_(\d+\.\d\d)> <WL_(\d+\.\d\d)> <WR_(\d+\.\d\d)> <WS_(\d+\.\d\d)> <SS_(\d+\.\d\d)>"
)


def grid_values() -> list[float]:
    """All 31 quantized token values, ascending."""
    steps = int(round((GRID_MAX - GRID_MIN) / GRID_STEP))
    return [round(GRID_MIN + i * GRID_STEP, 2) for i in range(steps + 1)]


def is_on_grid(value: float) -> bool:
    scaled = value / GRID_STEP
    return (abs(scaled - round(scaled)) < 1e-9
            and GRID_MIN - 1e-9 <= value <= GRID_MAX + 1e-9)


def quantize(value: float) -> float:
    """Round to the nearest 0.05 (half away from zero), clamp to [0.50, 2.00]."""
    if not math.isfinite(value):
        raise ToolkitError(f"cannot quantize non-finite value {value!r}")
    if value < 0:
        raise ToolkitError(f"cannot quantize negative value {value!r}")
    # Snap the scaled value to 9 decimals first so decimal ties like 1.025
    # (stored as 1.024999...) still round half away from zero.
    step_index = math.floor(round(value / GRID_STEP, 9) + 0.5)
    snapped = round(step_index * GRID_STEP, 2)
    return min(max(snapped, GRID_MIN), GRID_MAX)


def cr_for_position(gold_position: int) -> float:
    if gold_position < 1:
        raise ToolkitError(f"gold position must be >= 1, got {gold_position}")
    return CR_BY_POSITION.get(gold_position, CR_SATURATION)


@dataclass(frozen=True)
class TokenVector:
    """Raw token values paired with their quantized grid values."""

    cr: float
    wl: float
    wr: float
    ws: float
    ss: float
    cr_q: float
    wl_q: float
    wr_q: float
    ws_q: float
    ss_q: float

    @classmethod
    def from_raw(cls, cr: float, wl: float, wr: float, ws: float,
                 ss: float) -> "TokenVector":
        if round(cr, 2) not in CR_VALUES:
            raise ToolkitError(f"cr value {cr!r} outside the ranking map")
        return cls(
            cr=cr, wl=wl, wr=wr, ws=ws, ss=ss,
            cr_q=round(cr, 2),
            wl_q=quantize(wl),
            wr_q=quantize(wr),
            ws_q=quantize(ws),
            ss_q=quantize(ss),
        )

    @classmethod
    def from_grid(cls, wl: float, wr: float, ws: float, ss: float,
                  cr: float = 1.00) -> "TokenVector":
        """Build from values already on the grid (search / eval paths)."""
        for name, value in (("wl", wl), ("wr", wr), ("ws", ws), ("ss", ss)):
            if not is_on_grid(value):
                raise ToolkitError(f"{name} value {value!r} is not on the grid")
        return cls.from_raw(cr=cr, wl=wl, wr=wr, ws=ws, ss=ss)

    @classmethod
    def all_default(cls) -> "TokenVector":
        """The validation/test default: every token set to 1.00."""
        return cls.from_grid(1.00, 1.00, 1.00, 1.00)

    def quantized_values(self) -> tuple[float, float, float, float, float]:
        return (self.cr_q, self.wl_q, self.wr_q, self.ws_q, self.ss_q)

    def check_quantized(self) -> None:
        if round(self.cr_q, 2) not in CR_VALUES:
            raise ToolkitError(f"cr value {self.cr_q!r} outside the ranking map")
        for name, value in (("wl", self.wl_q), ("wr", self.wr_q),
                            ("ws", self.ws_q), ("ss", self.ss_q)):
            if not is_on_grid(value):
                raise ToolkitError(
                    f"{name} value {value!r} is not a quantized grid value")


def render_tokens(vector: TokenVector) -> str:
    """Render `<CR_x.xx> <WL_x.xx> <WR_x.xx> <WS_x.xx> <SS_x.xx>`."""
    vector.check_quantized()
    cr, wl, wr, ws, ss = vector.quantized_values()
    return f"<CR_{cr:.2f}> <WL_{wl:.2f}> <WR_{wr:.2f}> <WS_{ws:.2f}> <SS_{ss:.2f}>"


def parse_tokens(text: str) -> TokenVector:
    """Inverse of `render_tokens` on its own output (raw == quantized)."""
    match = _TOKEN_BLOCK.fullmatch(text.strip())
    if not match:
        raise ToolkitError(f"not a control-token block: {text!r}")
    cr, wl, wr, ws, ss = (float(g) for g in match.groups())
    vector = TokenVector(cr=cr, wl=wl, wr=wr, ws=ws, ss=ss,
                         cr_q=cr, wl_q=wl, wr_q=wr, ws_q=ws, ss_q=ss)
    vector.check_quantized()
    return vector


class EmbeddingProvider(Protocol):
    """Sentence embedding backend: same input must yield the same vector."""

    name: str
    dimension: int

    def embed(self, sentence: str) -> Sequence[float]: ...


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


class HashEmbedder:
    """Deterministic model-free embedding stub.

    Each whitespace token maps to a fixed pseudo-random vector derived from
    its SHA-256 digest; a sentence embeds as the sum of its token vectors.
    Replacing one word therefore moves the embedding a little, which is
    enough structure for offline similarity scores and tests.
    """

    def __init__(self, dimension: int = 32, name: str = "hash-embedder"):
        self.dimension = dimension
        self.name = name
        self._token_cache: dict[str, tuple[float, ...]] = {}

    def _token_vector(self, token: str) -> tuple[float, ...]:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        values = []
        counter = 0
        material = token.encode("utf-8")
        while len(values) < self.dimension:
            digest = hashlib.sha256(material + counter.to_bytes(4, "big")).digest()
            for offset in range(0, len(digest) - 3, 4):
                (word,) = struct.unpack_from(">I", digest, offset)
                values.append(word / 0xFFFFFFFF * 2.0 - 1.0)
                if len(values) == self.dimension:
                    break
            counter += 1
        vector = tuple(values)
        self._token_cache[token] = vector
        return vector

    def embed(self, sentence: str) -> list[float]:
        acc = [0.0] * self.dimension
        for token in sentence.split():
            for i, x in enumerate(self._token_vector(token)):
                acc[i] += x
        return acc


def sentence_similarity(sentence: str, modified: str,
                        embedder: EmbeddingProvider) -> float:
    """Clamped cosine similarity between the embeddings of two sentences."""
    if modified == sentence:
        return 1.0
    try:
        u = embedder.embed(sentence)
        v = embedder.embed(modified)
    except Exception as err:
        name = getattr(embedder, "name", embedder.__class__.__name__)
        raise EmbedderError(str(err), backend=name) from err
    return min(max(cosine(u, v), 0.0), 1.0)


def compute_token_vector(instance: Instance, substitute: str, gold_position: int,
                         lexicon: FrequencyLexicon, syllabifier: Syllabifier,
                         embedder: EmbeddingProvider) -> TokenVector:
    """Compute all five token values for one candidate of an instance."""
    substitute = substitute.strip()
    if not substitute:
        raise ToolkitError("empty substitute")
    complex_word = instance.complex_word
    if not complex_word:
        raise ToolkitError("empty complex word")

    wl = len(substitute) / len(complex_word)
    wr = rank_of(substitute, lexicon) / rank_of(complex_word, lexicon)
    ws = syllabifier.count(substitute) / syllabifier.count(complex_word)
    cr = cr_for_position(gold_position)
    modified = replace_complex_word(instance.sentence, complex_word, substitute)
    ss = sentence_similarity(instance.sentence, modified, embedder)
    return TokenVector.from_raw(cr=cr, wl=wl, wr=wr, ws=ws, ss=ss)
