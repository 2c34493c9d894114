"""Candidate generation backends, masked-LM candidate extraction, and filtering.

Backends are pluggable and must be deterministic for a fixed configuration
and input. Remote backends speak the model-sidecar wire protocol; the mock
and lexicon backends exist so the whole pipeline runs offline.

Post-filtering removes duplicates and candidates equal to the complex word
(both judged after normalization plus punctuation stripping) and truncates
to the configured limit, preserving backend order.
"""

from __future__ import annotations

import abc
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .control_tokens import TokenVector
from .corpus import Instance, replace_complex_word
from .errors import (BackendError, BackendReturnedNothing, BackendUnavailable,
                     DataError)
from .lexicon import FrequencyLexicon
from .metrics import normalize_term, potential_at_k
from .serializer import SerializationOptions, build_eval_source

MASK_TOKEN = "[MASK]"

_PUNCT = string.punctuation + "¡¿«»“”‘’…"


def normalize_candidate(s: str) -> str:
    """`normalize_term` plus leading/trailing punctuation stripping."""
    return normalize_term(s).strip(_PUNCT + " ")


@dataclass(frozen=True)
class CandidateList:
    """Ordered post-filtered substitutes for one instance."""

    instance_id: str
    candidates: tuple[str, ...]
    backend: str
    raw_count: int


class GeneratorBackend(abc.ABC):
    """Produces raw (unfiltered) candidates for an instance.

    `source` carries the serialized model input; backends that work from the
    instance fields directly may ignore it.
    """

    kind: str = "abstract"
    name: str = "abstract"

    @abc.abstractmethod
    def raw_candidates(self, instance: Instance, source: str | None = None,
                       beam_width: int = 15) -> list[str]:
        ...


class MockTableBackend(GeneratorBackend):
    """Answers from a fixed instance-id -> candidates table (tests, demos)."""

    kind = "mock_table"

    def __init__(self, table: Mapping[str, Sequence[str]], name: str = "mock_table"):
        self.table = {k: list(v) for k, v in table.items()}
        self.name = name

    def raw_candidates(self, instance: Instance, source: str | None = None,
                       beam_width: int = 15) -> list[str]:
        return list(self.table.get(instance.id, ()))[:beam_width]


class LexiconBaselineBackend(GeneratorBackend):
    """Synonym-table lookup ordered by frequency rank (most frequent first).

    A deterministic offline baseline for exercising the pipeline; it makes
    no claim to quality.
    """

    kind = "lexicon_baseline"

    def __init__(self, synonyms: Mapping[str, Sequence[str]],
                 lexicon: FrequencyLexicon, name: str = "lexicon_baseline"):
        self.synonyms = {normalize_term(k): list(v) for k, v in synonyms.items()}
        self.lexicon = lexicon
        self.name = name

    def raw_candidates(self, instance: Instance, source: str | None = None,
                       beam_width: int = 15) -> list[str]:
        neighbours = self.synonyms.get(normalize_term(instance.complex_word), [])
        ranked = sorted(neighbours, key=lambda w: self.lexicon.rank(w.casefold()))
        return ranked[:beam_width]


class FillMaskClient(Protocol):
    def fill_mask(self, text: str, k: int) -> list[tuple[str, float]]: ...


class GenerateClient(Protocol):
    def generate(self, source: str, beam_width: int,
                 max_candidates: int) -> list[tuple[str, float]]: ...


class RemoteSeq2SeqBackend(GeneratorBackend):
    """Delegates to the sidecar /generate endpoint (beam search, no sampling)."""

    kind = "remote_seq2seq"

    def __init__(self, client: GenerateClient, name: str = "remote_seq2seq"):
        self.client = client
        self.name = name

    def raw_candidates(self, instance: Instance, source: str | None = None,
                       beam_width: int = 15) -> list[str]:
        if source is None:
            raise BackendError("seq2seq backend requires a serialized source",
                               backend=self.name)
        scored = self.client.generate(source, beam_width=beam_width,
                                      max_candidates=beam_width)
        return [candidate for candidate, _ in scored]


class RemoteFillMaskBackend(GeneratorBackend):
    """Uses masked-LM predictions for the complex word as candidates."""

    kind = "remote_fill_mask"

    def __init__(self, client: FillMaskClient, name: str = "remote_fill_mask"):
        self.client = client
        self.name = name

    def raw_candidates(self, instance: Instance, source: str | None = None,
                       beam_width: int = 15) -> list[str]:
        return extract_mlm_candidates(instance.sentence, instance.complex_word,
                                      k=beam_width, client=self.client)


def postfilter(raw: Sequence[str], complex_word: str, limit: int = 10) -> list[str]:
    """Stable-order dedup, complex-word removal, truncation to `limit`."""
    target = normalize_candidate(complex_word)
    seen = set()
    out = []
    for candidate in raw:
        key = normalize_candidate(candidate)
        if not key or key == target or key in seen:
            continue
        seen.add(key)
        out.append(candidate.strip())
        if len(out) == limit:
            break
    return out


def generate_candidates(instance: Instance, backend: GeneratorBackend,
                        serialized_source: str | None = None,
                        beam_width: int = 15, limit: int = 10) -> CandidateList:
    """Run one backend on one instance and post-filter its raw beams."""
    raw = backend.raw_candidates(instance, source=serialized_source,
                                 beam_width=beam_width)
    if not raw:
        raise BackendReturnedNothing(
            f"no raw candidates for instance {instance.id}", backend=backend.name)
    filtered = postfilter(raw, instance.complex_word, limit)
    return CandidateList(
        instance_id=instance.id,
        candidates=tuple(filtered),
        backend=backend.name,
        raw_count=len(raw),
    )


def build_mask_query(sentence: str, complex_word: str) -> str:
    """`<sentence> </s> <sentence with the complex word masked>`."""
    masked = replace_complex_word(sentence, complex_word, MASK_TOKEN)
    return f"{sentence} </s> {masked}"


def _is_whole_word(candidate: str) -> bool:
    candidate = candidate.strip()
    if not candidate or "##" in candidate or candidate.startswith("▁"):
        return False
    return any(ch.isalnum() for ch in candidate)


def extract_mlm_candidates(sentence: str, complex_word: str, k: int = 10,
                           client: FillMaskClient | None = None) -> list[str]:
    """Top-k masked-LM predictions for the complex word, probability-descending.

    Subword continuation pieces and punctuation-only outputs are dropped
    before truncating to k, so the client is asked for extra headroom.
    """
    if k < 1:
        raise DataError("k must be >= 1")
    if client is None:
        raise BackendUnavailable("no fill-mask client configured")
    query = build_mask_query(sentence, complex_word)
    try:
        scored = client.fill_mask(query, k=max(2 * k, k + 5))
    except BackendError:
        raise
    except Exception as err:
        name = getattr(client, "name", client.__class__.__name__)
        raise BackendUnavailable(str(err), backend=name) from err

    ordered = sorted(scored, key=lambda pair: -pair[1])
    seen = set()
    out = []
    for candidate, _score in ordered:
        candidate = candidate.strip()
        if not _is_whole_word(candidate) or candidate in seen:
            continue
        seen.add(candidate)
        out.append(candidate)
        if len(out) == k:
            break
    return out


@dataclass(frozen=True)
class BackendPotential:
    """One row of the backend-comparison report."""

    backend: str
    potential: float | None
    error: str | None = None


def rank_generators_by_potential(instances: Sequence[Instance],
                                 backends: Sequence[GeneratorBackend],
                                 k: int = 10) -> list[BackendPotential]:
    """Score each backend's raw top-k candidates with Potential@k, best first.

    A backend that fails on any instance gets a diagnostic row instead of a
    score; the remaining backends are still reported.
    """
    views = [instance.gold_view() for instance in instances]
    default_options = SerializationOptions(include_mlm=False)
    rows = []
    for backend in backends:
        predictions: list[list[str]] = []
        try:
            for instance in instances:
                source = build_eval_source(instance, TokenVector.all_default(),
                                           (), default_options)
                raw = backend.raw_candidates(instance, source=source, beam_width=k)
                predictions.append(list(raw)[:k])
        except Exception as err:
            rows.append(BackendPotential(backend=backend.name, potential=None,
                                         error=str(err)))
            continue
        rows.append(BackendPotential(
            backend=backend.name,
            potential=potential_at_k(k, predictions, views),
        ))
    rows.sort(key=lambda row: (row.potential is None,
                               -(row.potential or 0.0)))
    return rows


def write_predictions(instances: Sequence[Instance],
                      candidate_lists: Sequence[CandidateList],
                      path: str | Path) -> None:
    """TSAR submission-shaped TSV: sentence, complex word, candidates."""
    by_id = {cl.instance_id: cl for cl in candidate_lists}
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            candidates = by_id.get(instance.id)
            cols = [instance.sentence, instance.complex_word]
            if candidates:
                cols.extend(candidates.candidates)
            handle.write("\t".join(cols) + "\n")


def read_predictions(path: str | Path) -> list[tuple[str, str, list[str]]]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) < 2:
                raise DataError(
                    f"{path}: line {line_number}: expected at least sentence "
                    f"and complex word columns")
            rows.append((cols[0], cols[1], [c for c in cols[2:] if c.strip()]))
    return rows
