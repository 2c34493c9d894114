# Computing the five control tokens and fanning instances out into
# source/target training pairs.
#
# For each (complex word, substitute) pair we compute:
#   CR  ranking token from the substitute's gold position
#       (1.00, 0.75, 0.50, 0.25, then 0.10 for everything past fourth)
#   WL  character-length ratio        substitute / complex word
#   WR  frequency-rank ratio          substitute / complex word
#   WS  syllable-count ratio          substitute / complex word
#   SS  clamped cosine similarity of the sentence before and after the swap
#
# WL/WR/WS/SS snap to a 0.05 grid inside [0.50, 2.00]; CR keeps its fixed
# five values. One training example is emitted per gold substitute.

import tempfile
from pathlib import Path

from lexsimp import (HashEmbedder, Syllabifier, TokenVector,
                     build_training_examples, load_dataset,
                     load_frequency_lexicon, render_tokens)
from lexsimp.serializer import SerializationOptions, write_training_file

DATA = Path(__file__).parent / "data"

instances = load_dataset(DATA / "sample.en.tsv", "tsar_aggregated", "en")
lexicon = load_frequency_lexicon(DATA / "freq.en.txt", "en")
syllabifier = Syllabifier("en")

# The embedder here is the deterministic hash stub, so everything runs
# offline; swap in RemoteEmbedder(SidecarClient(url)) for model embeddings.
embedder = HashEmbedder()

instance = instances[0]
examples = build_training_examples(instance, lexicon, syllabifier, embedder)

print(f"{len(instance.gold)} gold substitutes -> {len(examples)} examples\n")
for example in examples[:3]:
    print("target:", example.target)
    print("tokens:", render_tokens(example.token_vector))
    print("source:", example.source[:100] + "...")
    print()

# The ranking token follows the gold position and saturates at 0.10:

print("CR sequence:", [e.token_vector.cr for e in examples])

# Validation and test sources use all-1.00 token values by default:

print("defaults:   ", render_tokens(TokenVector.all_default()))

# Writing a training file produces `source<TAB>target` lines plus a JSON
# sidecar recording the serialization options.

outdir = Path(tempfile.mkdtemp(prefix="lexsimp-demo-"))
all_examples = []
for inst in instances:
    all_examples.extend(
        build_training_examples(inst, lexicon, syllabifier, embedder))
write_training_file(all_examples, outdir / "train.tsv",
                    SerializationOptions(), token_provenance="gold")
print(f"\nwrote {len(all_examples)} pairs to {outdir / 'train.tsv'}")
