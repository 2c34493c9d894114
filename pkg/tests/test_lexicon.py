import pytest

from lexsimp.errors import LexiconError
from lexsimp.lexicon import (FrequencyLexicon, Syllabifier, build_lexicon,
                             load_frequency_lexicon, rank_of, syllable_count)


@pytest.fixture
def small_lexicon():
    return build_lexicon(["the", "of", "reason"], "en")


class TestRankOf:
    def test_in_vocabulary_rank(self, small_lexicon):
        assert rank_of("reason", small_lexicon) == 3

    def test_oov_is_size_plus_one(self, small_lexicon):
        assert rank_of("zzxqy", small_lexicon) == 4

    def test_lookup_is_case_folded(self, small_lexicon):
        assert rank_of("The", small_lexicon) == 1

    def test_empty_word_rejected(self, small_lexicon):
        with pytest.raises(LexiconError):
            rank_of("", small_lexicon)
        with pytest.raises(LexiconError):
            rank_of("   ", small_lexicon)

    def test_ranks_are_injective_and_ordered(self, small_lexicon):
        ranks = [rank_of(w, small_lexicon) for w in small_lexicon.words]
        assert ranks == [1, 2, 3]
        assert rank_of("of", small_lexicon) <= len(small_lexicon)
        assert rank_of("missing", small_lexicon) > len(small_lexicon)


class TestLexiconLoading:
    def test_load_from_file(self, tmp_path):
        path = tmp_path / "freq.en.txt"
        path.write_text("the\nof\nThe\nreason\n\n", encoding="utf-8")
        lexicon = load_frequency_lexicon(path, "en")
        # Duplicate "The" keeps its first (case-folded) rank.
        assert lexicon.words == ("the", "of", "reason")

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "freq.en.txt"
        path.write_text("\n\n", encoding="utf-8")
        with pytest.raises(LexiconError):
            load_frequency_lexicon(path, "en")

    def test_empty_vocabulary_rejected(self):
        with pytest.raises(LexiconError):
            FrequencyLexicon(language="en", words=())


class TestSyllableCount:
    def test_motive_silent_e(self):
        assert syllable_count("motive", "en") == 2

    def test_single_letter_floors_at_one(self):
        assert syllable_count("a", "en") == 1

    def test_praga_portuguese(self):
        assert syllable_count("praga", "pt") == 2

    @pytest.mark.parametrize("word,expected", [
        ("reason", 2),
        ("the", 1),
        ("trophies", 2),
        ("incentive", 3),
        ("aim", 1),
        ("inspiration", 4),
    ])
    def test_english_words(self, word, expected):
        assert syllable_count(word, "en") == expected

    @pytest.mark.parametrize("word,lang,expected", [
        ("peste", "pt", 2),
        ("jurisdicción", "es", 4),
        ("zona", "es", 2),
    ])
    def test_accented_words(self, word, lang, expected):
        assert syllable_count(word, lang) == expected

    def test_multiword_sums_parts(self):
        assert syllable_count("el territorio", "es") == (
            syllable_count("el", "es") + syllable_count("territorio", "es"))

    def test_hyphenated_sums_parts(self):
        assert syllable_count("well-known", "en") == (
            syllable_count("well", "en") + syllable_count("known", "en"))

    def test_non_alphabetic_rejected(self):
        with pytest.raises(LexiconError):
            syllable_count("1234", "en")
        with pytest.raises(LexiconError):
            syllable_count("", "en")

    def test_always_at_least_one(self):
        for word in ["strengths", "rhythm", "fly", "why", "mrs"]:
            assert syllable_count(word, "en") >= 1

    def test_pluggable_hyphenator(self):
        syllabifier = Syllabifier("en", rule_set="hyphenation-dictionary",
                                  hyphenator=lambda w, lang: len(w) // 3)
        assert syllabifier.count("motive") == 2
        assert syllabifier.count("a") == 1  # floor still applies

    def test_unsupported_language(self):
        with pytest.raises(LexiconError):
            syllable_count("wort", "de")
