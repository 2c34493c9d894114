"""Parsing, aggregation, validation, and splitting of lexical simplification datasets.

Three TSV ingestion formats are supported, one instance per line:

* ``tsar_aggregated`` -- ``sentence<TAB>complex_word<TAB>sub:count<TAB>...``
  (gold substitutes carry annotator counts).
* ``tsar_raw`` -- ``sentence<TAB>complex_word<TAB>sub<TAB>sub<TAB>...``
  (one column per annotation, repetitions included).
* ``rank_prefixed`` -- ``sentence<TAB>complex_word<TAB>word_index<TAB>rank:sub<TAB>...``
  (LexMTurk / BenchLS / NNSeval style; gold order follows the rank numbers).

Instances also round-trip through a line-delimited JSON form (one object per
line) for interchange with other tools.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ComplexWordNotInSentence, CorpusError, EmptyGold, MalformedLine
from .metrics import GoldView, gold_view, normalize_term

LANGUAGES = ("en", "es", "pt")
FORMATS = ("tsar_aggregated", "tsar_raw", "rank_prefixed")

_WS_RUN = re.compile(r"\s+")


def _normalize_ws(text: str) -> str:
    return _WS_RUN.sub(" ", text.strip())


@dataclass(frozen=True)
class Instance:
    """One sentence with an annotated complex word and ranked gold substitutes.

    ``gold`` is ordered by annotator count descending, ties broken by first
    appearance in the source annotations. ``word_index`` is the 0-based
    whitespace-token index of the complex word when the source format
    provides one (rank_prefixed datasets do), else None.
    """

    id: str
    language: str
    sentence: str
    complex_word: str
    gold: tuple[tuple[str, int], ...]
    word_index: int | None = None

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise CorpusError(f"unsupported language {self.language!r}")
        if not self.complex_word:
            raise CorpusError("empty complex word")
        if self.complex_word not in self.sentence:
            raise ComplexWordNotInSentence(
                f"complex word {self.complex_word!r} not found in sentence"
            )
        if not self.gold:
            raise EmptyGold("instance has no gold substitutes")
        seen = set()
        for sub, count in self.gold:
            if count < 1:
                raise CorpusError(f"gold count for {sub!r} must be >= 1")
            key = normalize_term(sub)
            if key in seen:
                raise CorpusError(f"duplicate gold substitute {sub!r}")
            seen.add(key)

    def gold_view(self) -> GoldView:
        return gold_view(self.gold)

    def gold_substitutes(self) -> list[str]:
        return [sub for sub, _ in self.gold]


@dataclass(frozen=True)
class DatasetStats:
    instance_count: int
    min_tokens: int
    max_tokens: int
    avg_tokens: float


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions plus the shuffle seed.

    Fractions must sum to 1; validation and test sizes are floor-rounded and
    the remainder goes to train, so the partition is always disjoint and
    covering.
    """

    train_fraction: float = 0.70
    validation_fraction: float = 0.15
    test_fraction: float = 0.15
    seed: int = 0

    def __post_init__(self):
        for name, f in (("train", self.train_fraction),
                        ("validation", self.validation_fraction),
                        ("test", self.test_fraction)):
            if not 0.0 <= f <= 1.0:
                raise CorpusError(f"{name} fraction {f} outside [0, 1]")
        total = self.train_fraction + self.validation_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise CorpusError(f"split fractions sum to {total}, expected 1.0")
        if self.train_fraction <= 0.0:
            raise CorpusError("train fraction must be positive")


def find_complex_word_span(sentence: str, complex_word: str) -> tuple[int, int]:
    """Character span of the annotated occurrence of the complex word.

    Prefers the first occurrence at word boundaries so that a word embedded
    inside a longer token is not matched; falls back to the first raw
    substring occurrence. Raises if the word does not occur at all.
    """
    if not complex_word:
        raise CorpusError("empty complex word")
    pattern = re.compile(r"(?<!\w)" + re.escape(complex_word) + r"(?!\w)")
    match = pattern.search(sentence)
    if match:
        return match.start(), match.end()
    start = sentence.find(complex_word)
    if start < 0:
        raise ComplexWordNotInSentence(
            f"complex word {complex_word!r} not found in sentence")
    return start, start + len(complex_word)


def replace_complex_word(sentence: str, complex_word: str, replacement: str) -> str:
    """Rewrite the annotated occurrence of the complex word."""
    start, end = find_complex_word_span(sentence, complex_word)
    return sentence[:start] + replacement + sentence[end:]


def aggregate_gold(raw: Sequence[str]) -> list[tuple[str, int]]:
    """Merge repeated annotations into (substitute, count) pairs.

    Output counts sum to ``len(raw)``. Ordering is count-descending with
    ties broken by first appearance, then lexicographically. Annotations
    that collide after `normalize_term` are merged; the first-seen surface
    form is kept.
    """
    cleaned = [_normalize_ws(s) for s in raw]
    if not cleaned or any(not s for s in cleaned):
        raise EmptyGold("raw gold annotations must be non-empty strings")
    counts: dict[str, int] = {}
    surface: dict[str, str] = {}
    first_index: dict[str, int] = {}
    for i, sub in enumerate(cleaned):
        key = normalize_term(sub)
        if key not in counts:
            counts[key] = 0
            surface[key] = sub
            first_index[key] = i
        counts[key] += 1
    ordered = sorted(counts, key=lambda k: (-counts[k], first_index[k], surface[k]))
    return [(surface[k], counts[k]) for k in ordered]


def parse_instance(line: str, format: str, language: str,
                   line_number: int = 1) -> Instance:
    """Parse one TSV dataset line into an Instance.

    Gold annotations are aggregated into counts and ordered; the complex
    word must occur in the sentence (exact match after collapsing repeated
    whitespace). Errors report the offending line number.
    """
    if format not in FORMATS:
        raise CorpusError(f"unknown format {format!r}", line_number)
    cols = line.rstrip("\n").split("\t")
    min_cols = 4 if format == "rank_prefixed" else 3
    if len(cols) < min_cols:
        raise MalformedLine(
            f"expected at least {min_cols} tab-separated columns, got {len(cols)}",
            line_number,
        )

    sentence = _normalize_ws(cols[0])
    complex_word = _normalize_ws(cols[1])
    word_index: int | None = None

    if format == "tsar_aggregated":
        pairs = []
        for col in cols[2:]:
            col = col.strip()
            if not col:
                continue
            sub, sep, count_text = col.rpartition(":")
            if not sep or not count_text.strip().isdigit():
                raise MalformedLine(
                    f"gold column {col!r} is not in sub:count form", line_number)
            pairs.append((_normalize_ws(sub), int(count_text)))
        raw = [sub for sub, count in pairs for _ in range(count)]
    elif format == "tsar_raw":
        raw = [c for c in (col.strip() for col in cols[2:]) if c]
    else:  # rank_prefixed
        index_text = cols[2].strip()
        if not index_text.lstrip("-").isdigit():
            raise MalformedLine(
                f"word index column {index_text!r} is not an integer", line_number)
        word_index = int(index_text)
        entries = []
        for col in cols[3:]:
            col = col.strip()
            if not col:
                continue
            rank_text, sep, sub = col.partition(":")
            if not sep or not rank_text.strip().isdigit():
                raise MalformedLine(
                    f"gold column {col!r} is not in rank:sub form", line_number)
            entries.append((int(rank_text), _normalize_ws(sub)))
        entries.sort(key=lambda e: e[0])
        raw = [sub for _, sub in entries]

    if not raw:
        raise EmptyGold("no gold substitutes on line", line_number)
    try:
        gold = tuple(aggregate_gold(raw))
        return Instance(
            id=f"{language}-{line_number:05d}",
            language=language,
            sentence=sentence,
            complex_word=complex_word,
            gold=gold,
            word_index=word_index,
        )
    except CorpusError as err:
        if err.line_number is None:
            raise type(err)(str(err), line_number) from err
        raise


def format_instance(instance: Instance, format: str = "tsar_aggregated") -> str:
    """Render an Instance back to a TSV dataset line (inverse of parsing)."""
    if format == "tsar_aggregated":
        gold_cols = [f"{sub}:{count}" for sub, count in instance.gold]
        return "\t".join([instance.sentence, instance.complex_word, *gold_cols])
    if format == "tsar_raw":
        cols = [sub for sub, count in instance.gold for _ in range(count)]
        return "\t".join([instance.sentence, instance.complex_word, *cols])
    if format == "rank_prefixed":
        index = instance.word_index
        if index is None:
            index = _default_word_index(instance.sentence, instance.complex_word)
        gold_cols = [f"{rank}:{sub}" for rank, (sub, _) in enumerate(instance.gold, 1)]
        return "\t".join(
            [instance.sentence, instance.complex_word, str(index), *gold_cols])
    raise CorpusError(f"unknown format {format!r}")


def _default_word_index(sentence: str, complex_word: str) -> int:
    head = complex_word.split()[0]
    for i, token in enumerate(sentence.split()):
        if token == head or token.strip(".,;:!?\"'()[]") == head:
            return i
    return 0


def load_dataset(path: str | Path, format: str, language: str) -> list[Instance]:
    """Read a UTF-8 TSV dataset file, one instance per non-empty line."""
    instances = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            instances.append(parse_instance(line, format, language, line_number))
    if not instances:
        raise CorpusError(f"dataset {path} contains no instances")
    return instances


def save_dataset(instances: Iterable[Instance], path: str | Path,
                 format: str = "tsar_aggregated") -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            handle.write(format_instance(instance, format) + "\n")


def instance_to_json(instance: Instance) -> str:
    record = {
        "id": instance.id,
        "language": instance.language,
        "sentence": instance.sentence,
        "complex_word": instance.complex_word,
        "gold": [[sub, count] for sub, count in instance.gold],
    }
    if instance.word_index is not None:
        record["word_index"] = instance.word_index
    return json.dumps(record, ensure_ascii=False)


def instance_from_json(text: str) -> Instance:
    record = json.loads(text)
    return Instance(
        id=record["id"],
        language=record["language"],
        sentence=record["sentence"],
        complex_word=record["complex_word"],
        gold=tuple((sub, int(count)) for sub, count in record["gold"]),
        word_index=record.get("word_index"),
    )


def save_jsonl(instances: Iterable[Instance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            handle.write(instance_to_json(instance) + "\n")


def load_jsonl(path: str | Path) -> list[Instance]:
    with open(path, encoding="utf-8") as handle:
        return [instance_from_json(line) for line in handle if line.strip()]


def dataset_stats(instances: Sequence[Instance]) -> DatasetStats:
    """Whitespace-token statistics over the sentences of a dataset."""
    if not instances:
        raise CorpusError("cannot compute statistics of an empty dataset")
    lengths = [len(instance.sentence.split()) for instance in instances]
    return DatasetStats(
        instance_count=len(instances),
        min_tokens=min(lengths),
        max_tokens=max(lengths),
        avg_tokens=sum(lengths) / len(lengths),
    )


def split_dataset(instances: Sequence[Instance], spec: SplitSpec,
                  ) -> tuple[list[Instance], list[Instance], list[Instance]]:
    """Deterministic disjoint train/validation/test partition.

    Validation and test sizes are floor(n * fraction); the remainder goes to
    train. The same spec always produces the same partition.
    """
    n = len(instances)
    if n == 0:
        raise CorpusError("cannot split an empty dataset")
    validation_n = int(n * spec.validation_fraction)
    test_n = int(n * spec.test_fraction)
    train_n = n - validation_n - test_n

    shuffled = list(instances)
    random.Random(spec.seed).shuffle(shuffled)
    train = shuffled[:train_n]
    validation = shuffled[train_n:train_n + validation_n]
    test = shuffled[train_n + validation_n:]
    return train, validation, test
