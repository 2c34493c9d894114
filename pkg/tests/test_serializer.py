import random

import pytest

from lexsimp.control_tokens import HashEmbedder, TokenVector, render_tokens
from lexsimp.errors import (MarkerConflict, MissingMarkers, MissingPrefix,
                            MissingSeparator, SourceFormatError)
from lexsimp.lexicon import Syllabifier, build_lexicon
from lexsimp.serializer import (SerializationOptions, build_eval_source,
                                build_source, build_training_examples,
                                parse_source, token_span, write_inference_file,
                                write_training_file)

from conftest import WORD_POOL, make_instance, random_instances

# The documented worked example: a searched token set serialized with the
# span marker and ten masked-LM candidates.
TROPHIES_SENTENCE = ("I want to continue playing at the highest level and win "
                     "as many trophies as possible.")
TROPHIES_MLM = ["trophies", "titles", "trophy", "competitions", "championships",
                "tournaments", "prizes", "awards", "cups", "medals"]
TROPHIES_SOURCE = (
    "simplify en: <CR_1.00> <WL_1.25> <WR_1.05> <WS_1.60> <SS_1.00> #8-8 "
    "I want to continue playing at the highest level and win as many "
    "[T] trophies [/T] as possible. </s> trophies : trophies titles trophy "
    "competitions championships tournaments prizes awards cups medals"
)


def trophies_instance():
    return make_instance(sentence=TROPHIES_SENTENCE, complex_word="trophies",
                         gold=(("awards", 5), ("medals", 2)), word_index=8)


class TestBuildSource:
    def test_worked_example_byte_exact(self):
        vector = TokenVector.from_grid(wl=1.25, wr=1.05, ws=1.60, ss=1.00)
        options = SerializationOptions(include_span_marker=True)
        source = build_eval_source(trophies_instance(), vector, TROPHIES_MLM,
                                   options)
        assert source == TROPHIES_SOURCE

    def test_without_mlm_ends_at_complex_word(self):
        vector = TokenVector.all_default()
        options = SerializationOptions(include_mlm=False)
        source = build_source(trophies_instance(), vector, TROPHIES_MLM, options)
        assert source.endswith("</s> trophies")

    def test_empty_mlm_list_ends_at_complex_word(self):
        vector = TokenVector.all_default()
        source = build_source(trophies_instance(), vector, [],
                              SerializationOptions(include_mlm=True))
        assert source.endswith("</s> trophies")

    def test_spanish_prefix(self):
        instance = make_instance(
            sentence="Estaban en la jurisdicción de Santiago.",
            complex_word="jurisdicción", gold=(("zona", 3),), language="es")
        source = build_source(instance, TokenVector.all_default())
        assert source.startswith("simplify es: ")

    def test_no_trailing_whitespace(self):
        source = build_source(trophies_instance(), TokenVector.all_default(),
                              TROPHIES_MLM)
        assert source == source.rstrip()

    def test_candidates_deduplicated_and_truncated(self):
        options = SerializationOptions(mlm_top_k=3)
        source = build_source(trophies_instance(), TokenVector.all_default(),
                              ["a", "a", "b", "c", "d"], options)
        assert source.endswith("</s> trophies : a b c")

    def test_sentence_with_reserved_fragment_rejected(self):
        instance = make_instance(sentence="bad [T] motive here",
                                 complex_word="motive", gold=(("reason", 1),))
        with pytest.raises(MarkerConflict):
            build_source(instance, TokenVector.all_default())

    def test_default_span_marker_uses_token_index(self, motive_instance):
        options = SerializationOptions(include_span_marker=True,
                                       include_mlm=False)
        source = build_source(motive_instance, TokenVector.all_default(), [],
                              options)
        # "The(0) motive(1) ..." -> #1-1
        assert " #1-1 The [T] motive [/T] for" in source


class TestEvalSource:
    def test_ranking_token_forced_to_one(self):
        vector = TokenVector.from_raw(cr=0.25, wl=1.0, wr=1.0, ws=1.0, ss=1.0)
        source = build_eval_source(trophies_instance(), vector)
        assert "<CR_1.00>" in source
        assert "<CR_0.25>" not in source

    def test_validation_defaults(self, motive_instance):
        source = build_eval_source(motive_instance, TokenVector.all_default())
        assert "<CR_1.00> <WL_1.00> <WR_1.00> <WS_1.00> <SS_1.00>" in source


class TestTokenSpan:
    def test_single_word(self):
        assert token_span(TROPHIES_SENTENCE, "trophies") == (13, 13)

    def test_multiword(self):
        assert token_span("uno el territorio dos", "el territorio") == (1, 2)

    def test_first_token(self):
        assert token_span("motive is first", "motive") == (0, 0)


class TestTrainingFanOut:
    @pytest.fixture
    def deps(self, tiny_lexicon, en_syllabifier, hash_embedder):
        return dict(lexicon=tiny_lexicon, syllabifier=en_syllabifier,
                    embedder=hash_embedder)

    def test_one_example_per_gold_substitute(self, motive_instance, deps):
        examples = build_training_examples(motive_instance, **deps)
        assert len(examples) == 8
        assert [e.token_vector.cr for e in examples] == [
            1.00, 0.75, 0.50, 0.25, 0.10, 0.10, 0.10, 0.10]
        assert examples[0].target == "reason"

    def test_targets_follow_gold_order(self, motive_instance, deps):
        examples = build_training_examples(motive_instance, **deps)
        assert [e.target for e in examples] == \
            [sub for sub, _ in motive_instance.gold]

    def test_single_gold_candidate(self, deps):
        instance = make_instance(gold=(("reason", 4),))
        examples = build_training_examples(instance, **deps)
        assert len(examples) == 1
        assert examples[0].token_vector.cr == 1.00

    def test_nine_candidates_give_nine_examples(self, deps):
        gold = tuple((w, 9 - i) for i, w in enumerate(
            ["reason", "cause", "aim", "goal", "purpose", "plan", "idea",
             "point", "basis"]))
        instance = make_instance(gold=gold)
        examples = build_training_examples(instance, **deps)
        assert len(examples) == 9

    def test_sources_carry_mlm_candidates(self, motive_instance, deps):
        examples = build_training_examples(
            motive_instance, mlm_candidates=["reason", "cause"], **deps)
        assert all(e.source.endswith("</s> motive : reason cause")
                   for e in examples)


class TestParseSource:
    def test_worked_example_components(self):
        parsed = parse_source(TROPHIES_SOURCE)
        assert parsed.language == "en"
        assert parsed.complex_word == "trophies"
        assert parsed.sentence == TROPHIES_SENTENCE
        assert len(parsed.mlm_candidates) == 10
        assert parsed.span == (8, 8)
        assert render_tokens(parsed.token_vector) == (
            "<CR_1.00> <WL_1.25> <WR_1.05> <WS_1.60> <SS_1.00>")

    def test_missing_separator(self):
        broken = TROPHIES_SOURCE.replace(" </s> ", " ")
        with pytest.raises(MissingSeparator):
            parse_source(broken)

    def test_missing_prefix(self):
        with pytest.raises(MissingPrefix):
            parse_source(TROPHIES_SOURCE.removeprefix("simplify en: "))

    def test_missing_markers(self):
        broken = TROPHIES_SOURCE.replace("[T] ", "").replace(" [/T]", "")
        with pytest.raises(MissingMarkers):
            parse_source(broken)

    def test_missing_token_block(self):
        with pytest.raises(SourceFormatError):
            parse_source("simplify en: no tokens here </s> here")

    def test_round_trip_fuzzed(self):
        rng = random.Random(17)
        embedder = HashEmbedder()
        lexicon = build_lexicon(WORD_POOL, "en")
        syllabifier = Syllabifier("en")
        for instance in random_instances(300, seed=23):
            candidates = rng.sample(WORD_POOL, rng.randint(0, 6))
            options = SerializationOptions(
                include_mlm=rng.random() < 0.8,
                include_span_marker=rng.random() < 0.5,
            )
            position = rng.randint(1, len(instance.gold))
            examples = build_training_examples(
                instance, lexicon, syllabifier, embedder, candidates, options)
            source = examples[position - 1].source
            parsed = parse_source(source)
            assert parsed.language == instance.language
            assert parsed.sentence == instance.sentence
            assert parsed.complex_word == instance.complex_word
            expected = []
            for c in candidates:
                if c not in expected:
                    expected.append(c)
            if options.include_mlm and expected:
                assert list(parsed.mlm_candidates) == expected[:options.mlm_top_k]
            else:
                assert parsed.mlm_candidates == ()
            rebuilt = build_source(
                make_instance(sentence=parsed.sentence,
                              complex_word=parsed.complex_word,
                              gold=instance.gold, language=parsed.language,
                              word_index=parsed.span[0] if parsed.span else None),
                parsed.token_vector, parsed.mlm_candidates, options)
            assert rebuilt == source


class TestFileWriters:
    def test_training_file_and_meta(self, tmp_path, motive_instance,
                                    tiny_lexicon, en_syllabifier, hash_embedder):
        examples = build_training_examples(
            motive_instance, tiny_lexicon, en_syllabifier, hash_embedder)
        out = tmp_path / "train.tsv"
        options = SerializationOptions()
        write_training_file(examples, out, options, token_provenance="gold")
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 8
        assert all(len(line.split("\t")) == 2 for line in lines)
        meta = (tmp_path / "train.tsv.meta.json").read_text(encoding="utf-8")
        assert '"token_values": "gold"' in meta

    def test_inference_file(self, tmp_path):
        out = tmp_path / "sources.txt"
        write_inference_file(["a source", "another source"], out)
        assert out.read_text(encoding="utf-8") == "a source\nanother source\n"
