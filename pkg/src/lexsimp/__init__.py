"""Multilingual controllable lexical simplification toolkit.

Corpus parsing and splitting, control-token computation, model input/target
serialization, candidate generation with pluggable backends, TSAR-style
evaluation metrics, and inference-time token-value search. Model inference
is delegated to an HTTP sidecar; everything here runs without ML frameworks.
"""

__version__ = "0.1.0"

from .control_tokens import (HashEmbedder, TokenVector, compute_token_vector,
                             quantize, render_tokens)
from .corpus import (DatasetStats, Instance, SplitSpec, aggregate_gold,
                     dataset_stats, load_dataset, parse_instance, split_dataset)
from .generation import (CandidateList, GeneratorBackend, LexiconBaselineBackend,
                         MockTableBackend, RemoteFillMaskBackend,
                         RemoteSeq2SeqBackend, extract_mlm_candidates,
                         generate_candidates, postfilter,
                         rank_generators_by_potential)
from .lexicon import (FrequencyLexicon, Syllabifier, load_frequency_lexicon,
                      rank_of, syllable_count)
from .metrics import (GoldView, MetricReport, acc_at_1, acc_at_n_top1,
                      evaluate_all, gold_view, map_at_k, normalize_term,
                      potential_at_k)
from .serializer import (SerializationOptions, SerializedExample, build_eval_source,
                         build_source, build_training_examples, parse_source)
from .sidecar_client import RemoteEmbedder, SidecarClient
from .token_search import (SearchResult, TokenValueSet, best_token_set,
                           evaluate_token_set, run_search)

__all__ = [
    "__version__",
    "aggregate_gold", "dataset_stats", "load_dataset", "parse_instance",
    "split_dataset", "Instance", "DatasetStats", "SplitSpec",
    "FrequencyLexicon", "Syllabifier", "load_frequency_lexicon", "rank_of",
    "syllable_count",
    "TokenVector", "HashEmbedder", "compute_token_vector", "quantize",
    "render_tokens",
    "SerializationOptions", "SerializedExample", "build_source",
    "build_eval_source", "build_training_examples", "parse_source",
    "CandidateList", "GeneratorBackend", "MockTableBackend",
    "LexiconBaselineBackend", "RemoteSeq2SeqBackend", "RemoteFillMaskBackend",
    "extract_mlm_candidates", "generate_candidates", "postfilter",
    "rank_generators_by_potential",
    "GoldView", "MetricReport", "acc_at_1", "acc_at_n_top1", "evaluate_all",
    "gold_view", "map_at_k", "normalize_term", "potential_at_k",
    "TokenValueSet", "SearchResult", "run_search", "evaluate_token_set",
    "best_token_set",
    "SidecarClient", "RemoteEmbedder",
]
