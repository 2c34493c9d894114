"""Word-frequency ranks and syllable counts for English, Spanish, and Portuguese.

Frequency lexicons are plain word-list files, one token per line, most
frequent first (the order exported from a pretrained embedding vocabulary
works as-is). Syllable counting defaults to a vowel-group heuristic; a
hyphenation-dictionary callback can be plugged in instead.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .errors import LexiconError

# Vowel inventories used by the heuristic syllabifier. "y" is treated as a
# vowel in English; accented vowels cover Spanish and Portuguese orthography.
_VOWELS = {
    "en": set("aeiouy"),
    "es": set("aeiouáéíóúü"),
    "pt": set("aeiouáéíóúâêôãõà"),
}


@dataclass(frozen=True)
class FrequencyLexicon:
    """Frequency-descending vocabulary with a 1-based rank index."""

    language: str
    words: tuple[str, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.words:
            raise LexiconError("frequency lexicon must be non-empty")
        index = {}
        for position, word in enumerate(self.words, start=1):
            index.setdefault(word, position)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self._index

    def rank(self, word: str) -> int:
        return self._index.get(word, len(self.words) + 1)


def load_frequency_lexicon(path: str | Path, language: str) -> FrequencyLexicon:
    """Load a one-word-per-line frequency list; duplicates keep their first rank."""
    seen = set()
    words = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.strip().casefold()
            if not word or word in seen:
                continue
            seen.add(word)
            words.append(word)
    if not words:
        raise LexiconError(f"frequency list {path} is empty")
    return FrequencyLexicon(language=language, words=tuple(words))


def build_lexicon(words: Iterable[str], language: str) -> FrequencyLexicon:
    """Build a lexicon from an in-memory frequency-descending word sequence."""
    deduped = []
    seen = set()
    for word in words:
        w = word.strip().casefold()
        if w and w not in seen:
            seen.add(w)
            deduped.append(w)
    return FrequencyLexicon(language=language, words=tuple(deduped))


def rank_of(word: str, lexicon: FrequencyLexicon) -> int:
    """1-based frequency rank of `word` (case-folded); out-of-vocabulary
    words rank one past the vocabulary size."""
    if not word or not word.strip():
        raise LexiconError("cannot rank an empty word")
    return lexicon.rank(word.strip().casefold())


def _strip_nonalpha(word: str) -> str:
    return "".join(ch for ch in word if ch.isalpha())


def _vowel_groups(word: str, vowels: set[str]) -> int:
    groups = 0
    in_group = False
    for ch in word:
        if ch in vowels:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    return groups


def _heuristic_syllables(word: str, language: str) -> int:
    vowels = _VOWELS[language]
    count = _vowel_groups(word, vowels)
    # Final silent e: "motive" has vowel groups o/i/e but two spoken syllables.
    if language == "en" and count > 1 and word.endswith("e") and word[-2] not in vowels:
        count -= 1
    return max(count, 1)


def syllable_count(word: str, language: str,
                   hyphenator: Callable[[str, str], int] | None = None) -> int:
    """Count syllables of a word, summing over hyphen/space-separated parts.

    The default backend counts maximal contiguous vowel groups over the
    language's vowel set, with an English final-silent-e adjustment, floored
    at 1 per part. Pass `hyphenator(word, language) -> int` to use a
    hyphenation dictionary instead.
    """
    if language not in _VOWELS:
        raise LexiconError(f"unsupported language {language!r}")
    parts = [p for chunk in word.split() for p in chunk.split("-") if p]
    cleaned = [_strip_nonalpha(unicodedata.normalize("NFC", p.casefold()))
               for p in parts]
    cleaned = [p for p in cleaned if p]
    if not cleaned:
        raise LexiconError(f"cannot count syllables of {word!r}")
    if hyphenator is not None:
        return sum(max(hyphenator(p, language), 1) for p in cleaned)
    return sum(_heuristic_syllables(p, language) for p in cleaned)


@dataclass(frozen=True)
class Syllabifier:
    """Per-language syllable counter with a pluggable backend."""

    language: str
    rule_set: str = "heuristic"
    hyphenator: Callable[[str, str], int] | None = None

    def count(self, word: str) -> int:
        return syllable_count(word, self.language, self.hyphenator)
