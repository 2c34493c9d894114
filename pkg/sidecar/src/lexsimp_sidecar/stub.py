"""Deterministic model-free backends.

Stub mode exists so the whole toolkit test suite and demos run with no
models downloaded: every response is a pure function of (model identifier,
payload), identical across processes and restarts.
"""

from __future__ import annotations

import hashlib
import struct

EMBED_DIMENSION = 48

# Candidate pool for hash-derived fill-mask answers; all plain lowercase
# vocabulary words so the whole-word contract holds by construction.
_FALLBACK_WORDS = [
    "reason", "cause", "aim", "goal", "purpose", "plan", "idea", "answer",
    "basis", "point", "target", "motive", "choice", "result", "change",
    "effect", "origin", "source", "ground", "object", "intent", "drive",
    "spur", "wish", "need", "want", "root", "seed", "core", "heart",
    "case", "fact", "view", "sign", "mark", "form", "kind", "sort",
]


def _digest_ints(material: str, count: int) -> list[int]:
    values: list[int] = []
    counter = 0
    encoded = material.encode("utf-8")
    while len(values) < count:
        digest = hashlib.sha256(encoded + counter.to_bytes(4, "big")).digest()
        for offset in range(0, len(digest) - 3, 4):
            (word,) = struct.unpack_from(">I", digest, offset)
            values.append(word)
            if len(values) == count:
                break
        counter += 1
    return values


class StubFillMask:
    """Table-driven fill-mask with a hash-derived fallback.

    The table maps the full query text to an ordered candidate list. For
    queries outside the table, candidates are drawn from a fixed word pool
    by hashing (model, query), so answers vary by model identifier but never
    change between calls.
    """

    def __init__(self, model: str, table: dict[str, list[str]] | None = None):
        self.model = model
        self.table = dict(table or {})

    def fill_mask(self, text: str, k: int) -> list[tuple[str, float]]:
        listed = self.table.get(text)
        if listed is not None:
            chosen = list(listed)[:k]
        else:
            pool = list(_FALLBACK_WORDS)
            chosen = []
            for value in _digest_ints(f"fill|{self.model}|{text}", k):
                if not pool:
                    break
                chosen.append(pool.pop(value % len(pool)))
        return [(word, round(0.9 ** i, 6)) for i, word in enumerate(chosen)]


class StubEmbedder:
    """Additive token-hash sentence embeddings of fixed dimension."""

    def __init__(self, model: str, dimension: int = EMBED_DIMENSION):
        self.model = model
        self.dimension = dimension
        self._cache: dict[str, list[float]] = {}

    def _token_vector(self, token: str) -> list[float]:
        cached = self._cache.get(token)
        if cached is None:
            ints = _digest_ints(f"embed|{self.model}|{token}", self.dimension)
            cached = [v / 0xFFFFFFFF * 2.0 - 1.0 for v in ints]
            self._cache[token] = cached
        return cached

    def embed(self, sentence: str) -> list[float]:
        acc = [0.0] * self.dimension
        for token in sentence.split():
            for i, x in enumerate(self._token_vector(token)):
                acc[i] += x
        if not sentence.split():
            acc[0] = 1.0  # degenerate whitespace-only input, still non-zero
        return acc


class StubGenerator:
    """Echoes the candidate tail of a serialized source, or hash-fallback words.

    Source strings end with ``</s> <complex word> : <candidates...>`` when
    masked-LM candidates were appended; replaying that list in order is a
    deterministic stand-in for a fine-tuned model's beams.
    """

    def __init__(self, model: str, table: dict[str, list[str]] | None = None):
        self.model = model
        self.table = dict(table or {})

    def generate(self, source: str, beam_width: int,
                 max_candidates: int) -> list[tuple[str, float]]:
        limit = max(0, min(beam_width, max_candidates))
        listed = self.table.get(source)
        if listed is not None:
            chosen = list(listed)[:limit]
        else:
            chosen = self._from_source_tail(source, limit)
        return [(word, round(0.9 ** i, 6)) for i, word in enumerate(chosen)]

    def _from_source_tail(self, source: str, limit: int) -> list[str]:
        separator_at = source.rfind("</s>")
        if separator_at >= 0:
            tail = source[separator_at + len("</s>"):].strip()
            if " : " in tail:
                _, _, candidate_text = tail.partition(" : ")
                candidates = [c for c in candidate_text.split() if c]
                if candidates:
                    return candidates[:limit]
        pool = list(_FALLBACK_WORDS)
        chosen = []
        for value in _digest_ints(f"generate|{self.model}|{source}", limit):
            if not pool:
                break
            chosen.append(pool.pop(value % len(pool)))
        return chosen
