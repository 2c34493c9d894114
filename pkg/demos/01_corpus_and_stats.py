# Parsing lexical simplification datasets, aggregating gold annotations,
# and splitting them reproducibly.
#
# Datasets arrive as UTF-8 TSV, one instance per line. Three layouts are
# supported: `tsar_aggregated` (substitutes carry annotator counts),
# `tsar_raw` (one column per annotation, repeats included), and
# `rank_prefixed` (an extra word-index column and rank:substitute entries).

from pathlib import Path

from lexsimp import (SplitSpec, aggregate_gold, dataset_stats, load_dataset,
                     parse_instance, split_dataset)

DATA = Path(__file__).parent / "data"

# Load the English sample and look at one instance.

instances = load_dataset(DATA / "sample.en.tsv", "tsar_aggregated", "en")
first = instances[0]
print("sentence:     ", first.sentence)
print("complex word: ", first.complex_word)
print("gold:         ", first.gold[:4], "...")

# Gold substitutes are ordered by annotator count, so the most-suggested
# substitute always comes first. Raw annotation lists with repetitions
# aggregate to the same shape:

print()
print("aggregated:", aggregate_gold(["reason", "aim", "reason", "cause",
                                     "reason"]))

# The other layouts parse to the same Instance model.

raw_line = "The motive for it.\tmotive\treason\treason\taim"
print("tsar_raw:  ", parse_instance(raw_line, "tsar_raw", "en").gold)

ranked_line = "A big dog barked.\tbig\t1\t1:huge\t2:large\t3:giant"
ranked = parse_instance(ranked_line, "rank_prefixed", "en")
print("ranked:    ", ranked.gold, "word_index:", ranked.word_index)

# Whitespace-token statistics for a quick sanity check of a corpus.

stats = dataset_stats(instances)
print()
print(f"{stats.instance_count} instances, tokens min={stats.min_tokens} "
      f"max={stats.max_tokens} avg={stats.avg_tokens:.2f}")

# A 70/15/15 split with a fixed seed is fully reproducible: validation and
# test sizes are floored, the remainder goes to train.

train, validation, test = split_dataset(
    instances, SplitSpec(0.70, 0.15, 0.15, seed=42))
print(f"split: train={len(train)} validation={len(validation)} "
      f"test={len(test)}")
again, _, _ = split_dataset(instances, SplitSpec(0.70, 0.15, 0.15, seed=42))
print("same seed, same train split:", [i.id for i in train] == [i.id for i in again])
