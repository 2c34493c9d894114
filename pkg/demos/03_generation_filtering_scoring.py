# Candidate generation through pluggable backends, post-filtering, and the
# full evaluation suite (ACC@1, ACC@N@Top1, MAP@K, Potential@K).

import json
from pathlib import Path

from lexsimp import (LexiconBaselineBackend, MockTableBackend, TokenVector,
                     evaluate_all, generate_candidates, load_dataset,
                     load_frequency_lexicon, postfilter,
                     rank_generators_by_potential)
from lexsimp.metrics import report_to_table
from lexsimp.serializer import SerializationOptions, build_eval_source

DATA = Path(__file__).parent / "data"

instances = load_dataset(DATA / "sample.en.tsv", "tsar_aggregated", "en")
lexicon = load_frequency_lexicon(DATA / "freq.en.txt", "en")
synonyms = json.loads((DATA / "synonyms.en.json").read_text("utf-8"))

# Post-filtering drops duplicates and the complex word itself, preserving
# the backend's order, then truncates to the limit.

raw_beams = ["awards", "titles", "trophies", "Titles", "medals", "prizes"]
print("raw beams:", raw_beams)
print("filtered: ", postfilter(raw_beams, "trophies", limit=10))

# Backends share one interface. The mock table replays fixed answers (here:
# the gold substitutes); the lexicon baseline looks substitutes up in a
# synonym table and orders them most-frequent-first.

mock = MockTableBackend({i.id: [s for s, _ in i.gold] for i in instances})
baseline = LexiconBaselineBackend(synonyms, lexicon)

options = SerializationOptions(include_mlm=False)
predictions = {"gold-mock": [], "lexicon-baseline": []}
for instance in instances:
    source = build_eval_source(instance, TokenVector.all_default(), (), options)
    for name, backend in (("gold-mock", mock), ("lexicon-baseline", baseline)):
        result = generate_candidates(instance, backend, source)
        predictions[name].append(list(result.candidates))

# Score both systems with the ten-metric suite and print the standard table.

views = [instance.gold_view() for instance in instances]
reports = {name: evaluate_all(preds, views)
           for name, preds in predictions.items()}
print()
print(report_to_table(reports))

# Backends can also be compared by Potential@k on their raw top-k output,
# best first; a failing backend gets a diagnostic row instead of a score.

rows = rank_generators_by_potential(instances, [mock, baseline], k=10)
for row in rows:
    print(f"{row.backend:18s} Potential@10 = {row.potential:.4f}")
