"""Model input/target string construction and parsing.

A source string has the fixed shape::

    simplify <lang>: <CR_x.xx> <WL_x.xx> <WR_x.xx> <WS_x.xx> <SS_x.xx> \
[#i-j ]<sentence with complex word wrapped as "[T] word [/T]"> </s> \
<complex word>[ : <mlm candidate> <mlm candidate> ...]

The optional ``#i-j`` span marker is the 0-based whitespace-token index
range of the complex word (the instance's annotated word index when the
dataset provides one). Training fan-out produces one (source, target) pair
per distinct gold substitute, in gold order, with the ranking token taken
from the substitute's gold position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .control_tokens import (EmbeddingProvider, TokenVector, compute_token_vector,
                             parse_tokens, render_tokens)
from .corpus import Instance, find_complex_word_span
from .errors import (BackendError, MarkerConflict, MissingMarkers, MissingPrefix,
                     MissingSeparator, SourceFormatError)
from .lexicon import FrequencyLexicon, Syllabifier

LANGUAGE_PREFIXES = {"en": "simplify en:", "es": "simplify es:", "pt": "simplify pt:"}

OPEN_MARKER = "[T]"
CLOSE_MARKER = "[/T]"
SEPARATOR = "</s>"


@dataclass(frozen=True)
class SerializationOptions:
    """Per-run switches for source construction; record them in run metadata."""

    include_mlm: bool = True
    mlm_top_k: int = 10
    include_span_marker: bool = False

    def __post_init__(self):
        if self.mlm_top_k < 0:
            raise SourceFormatError("mlm_top_k must be >= 0")


@dataclass(frozen=True)
class SerializedExample:
    source: str
    target: str
    instance_id: str
    candidate: str
    token_vector: TokenVector


@dataclass(frozen=True)
class ParsedSource:
    language: str
    token_vector: TokenVector
    sentence: str
    complex_word: str
    mlm_candidates: tuple[str, ...]
    span: tuple[int, int] | None = None


def token_span(sentence: str, complex_word: str) -> tuple[int, int]:
    """0-based whitespace-token index range covering the complex word."""
    start, end = find_complex_word_span(sentence, complex_word)
    first = last = None
    offset = 0
    for i, token in enumerate(sentence.split()):
        token_start = sentence.index(token, offset)
        token_end = token_start + len(token)
        offset = token_end
        if token_end > start and first is None:
            first = i
        if token_start < end:
            last = i
    if first is None or last is None:
        raise SourceFormatError(
            f"could not locate {complex_word!r} among sentence tokens")
    return first, last


def _prepared_candidates(mlm_candidates: Sequence[str],
                         options: SerializationOptions) -> list[str]:
    seen = set()
    out = []
    for candidate in mlm_candidates:
        candidate = candidate.strip()
        if not candidate or candidate in seen:
            continue
        seen.add(candidate)
        out.append(candidate)
        if len(out) == options.mlm_top_k:
            break
    return out


def build_source(instance: Instance, token_vector: TokenVector,
                 mlm_candidates: Sequence[str] = (),
                 options: SerializationOptions = SerializationOptions()) -> str:
    """Construct the single-line source string for one instance."""
    sentence = instance.sentence
    for fragment in (OPEN_MARKER, CLOSE_MARKER, SEPARATOR):
        if fragment in sentence:
            raise MarkerConflict(
                f"sentence already contains the reserved fragment {fragment!r}")

    start, end = find_complex_word_span(sentence, instance.complex_word)
    marked = (f"{sentence[:start]}{OPEN_MARKER} {instance.complex_word} "
              f"{CLOSE_MARKER}{sentence[end:]}")

    pieces = [LANGUAGE_PREFIXES[instance.language], render_tokens(token_vector)]
    if options.include_span_marker:
        if instance.word_index is not None:
            first = last = instance.word_index
        else:
            first, last = token_span(sentence, instance.complex_word)
        pieces.append(f"#{first}-{last}")
    pieces.append(marked)
    pieces.append(SEPARATOR)
    pieces.append(instance.complex_word)
    if options.include_mlm:
        candidates = _prepared_candidates(mlm_candidates, options)
        if candidates:
            pieces.append(":")
            pieces.append(" ".join(candidates))
    return " ".join(pieces)


def build_eval_source(instance: Instance, token_values: TokenVector,
                      mlm_candidates: Sequence[str] = (),
                      options: SerializationOptions = SerializationOptions()) -> str:
    """Source string for validation/test with caller-supplied token values.

    The ranking token is always 1.00 at evaluation time regardless of the
    supplied vector.
    """
    vector = token_values
    if vector.cr_q != 1.00:
        vector = replace(vector, cr=1.00, cr_q=1.00)
    return build_source(instance, vector, mlm_candidates, options)


def build_training_examples(instance: Instance, lexicon: FrequencyLexicon,
                            syllabifier: Syllabifier, embedder: EmbeddingProvider,
                            mlm_candidates: Sequence[str] = (),
                            options: SerializationOptions = SerializationOptions(),
                            ) -> list[SerializedExample]:
    """Fan one instance out into one training example per gold substitute.

    Example k carries the token vector computed against gold position k and
    targets that substitute, so emission order reproduces the gold ranking.
    """
    examples = []
    for position, (substitute, _count) in enumerate(instance.gold, start=1):
        try:
            vector = compute_token_vector(
                instance, substitute, position, lexicon, syllabifier, embedder)
            source = build_source(instance, vector, mlm_candidates, options)
        except BackendError:
            raise
        except Exception as err:
            raise SourceFormatError(
                f"instance {instance.id}, candidate {substitute!r}: {err}") from err
        examples.append(SerializedExample(
            source=source,
            target=substitute,
            instance_id=instance.id,
            candidate=substitute,
            token_vector=vector,
        ))
    return examples


def parse_source(text: str) -> ParsedSource:
    """Parse a source string back into its components (inverse of building)."""
    language = None
    for lang, prefix in LANGUAGE_PREFIXES.items():
        if text.startswith(prefix + " "):
            language = lang
            rest = text[len(prefix) + 1:]
            break
    if language is None:
        raise MissingPrefix("source does not start with a language prefix")

    # The control-token block is the next five space-separated fields.
    parts = rest.split(" ", 5)
    if len(parts) < 6:
        raise SourceFormatError("source is missing the control-token block")
    try:
        vector = parse_tokens(" ".join(parts[:5]))
    except Exception as err:
        raise SourceFormatError(f"bad control-token block: {err}") from err
    rest = parts[5]

    span = None
    if rest.startswith("#"):
        marker, _, remainder = rest.partition(" ")
        body = marker[1:]
        first_text, sep, last_text = body.partition("-")
        if sep and first_text.isdigit() and last_text.isdigit():
            span = (int(first_text), int(last_text))
            rest = remainder

    separator = f" {SEPARATOR} "
    if separator not in rest:
        raise MissingSeparator(f"source does not contain the {SEPARATOR!r} separator")
    marked_sentence, _, tail = rest.partition(separator)

    open_at = marked_sentence.find(OPEN_MARKER + " ")
    close_at = marked_sentence.find(" " + CLOSE_MARKER)
    if open_at < 0 or close_at < 0 or close_at <= open_at:
        raise MissingMarkers("complex-word markers are missing or out of order")
    if (marked_sentence.count(OPEN_MARKER) != 1
            or marked_sentence.count(CLOSE_MARKER) != 1):
        raise MissingMarkers("expected exactly one [T] ... [/T] pair")
    complex_word = marked_sentence[open_at + len(OPEN_MARKER) + 1:close_at]
    sentence = (marked_sentence[:open_at] + complex_word
                + marked_sentence[close_at + len(CLOSE_MARKER) + 1:])

    if " : " in tail:
        tail_word, _, candidate_text = tail.partition(" : ")
        candidates = tuple(candidate_text.split(" "))
    else:
        tail_word, candidates = tail, ()
    if tail_word != complex_word:
        raise SourceFormatError(
            f"complex word after separator ({tail_word!r}) does not match "
            f"the marked word ({complex_word!r})")

    return ParsedSource(
        language=language,
        token_vector=vector,
        sentence=sentence,
        complex_word=complex_word,
        mlm_candidates=candidates,
        span=span,
    )


def write_training_file(examples: Iterable[SerializedExample], path: str | Path,
                        options: SerializationOptions,
                        token_provenance: str = "gold") -> None:
    """Write a two-column `source<TAB>target` file plus a JSON sidecar
    recording the serialization options and where token values came from."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(f"{example.source}\t{example.target}\n")
    meta = {
        "include_mlm": options.include_mlm,
        "mlm_top_k": options.mlm_top_k,
        "include_span_marker": options.include_span_marker,
        "token_values": token_provenance,
    }
    with open(path.with_suffix(path.suffix + ".meta.json"), "w",
              encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_inference_file(sources: Iterable[str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for source in sources:
            handle.write(source + "\n")
