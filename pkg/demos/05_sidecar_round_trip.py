# Driving the model sidecar over HTTP: masked-LM candidates, sentence
# embeddings, and beam-search generation.
#
# The sidecar lives in the separate `lexsimp-sidecar` package
# (sidecar/ directory). Its stub mode is deterministic and model-free, so
# this demo starts one in-process; point SidecarClient at a long-running
# `lexsimp-sidecar --mode real` deployment for actual model inference.

import threading

try:
    from lexsimp_sidecar.server import ModelRegistry, create_server
except ImportError:
    raise SystemExit(
        "lexsimp-sidecar is not installed; run `pip install -e sidecar/` "
        "first (or start one manually and use SidecarClient directly).")

from lexsimp import TokenVector, extract_mlm_candidates, load_dataset
from lexsimp.control_tokens import cosine
from lexsimp.corpus import Instance
from lexsimp.generation import RemoteSeq2SeqBackend, generate_candidates
from lexsimp.serializer import SerializationOptions, build_eval_source
from lexsimp.sidecar_client import RemoteEmbedder, SidecarClient

server = create_server(registry=ModelRegistry(mode="stub"))
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_port}"
client = SidecarClient(url)
print("sidecar health:", client.healthz())

instance = Instance(
    id="en-00001", language="en",
    sentence="The motive for the killings was not known.",
    complex_word="motive",
    gold=(("reason", 16), ("cause", 2), ("aim", 1)))

# Masked-LM candidate extraction sends the sentence pair
# `<sentence> </s> <sentence with the complex word masked>` and keeps the
# top-k whole-word predictions.

candidates = extract_mlm_candidates(instance.sentence, instance.complex_word,
                                    k=5, client=client)
print("MLM candidates:", candidates)

# Sentence embeddings back the similarity token; identical sentences embed
# identically.

embedder = RemoteEmbedder(client)
u = embedder.embed(instance.sentence)
v = embedder.embed("The reason for the killings was not known.")
print(f"embedding dimension {embedder.dimension}, "
      f"self-cosine {cosine(u, u):.6f}, edited-cosine {cosine(u, v):.3f}")

# Generation consumes the serialized source. The stub echoes the source's
# candidate tail, so the pipeline (serialize -> generate -> filter) is
# exercised end to end without a trained checkpoint.

source = build_eval_source(instance, TokenVector.all_default(),
                           mlm_candidates=candidates,
                           options=SerializationOptions())
result = generate_candidates(instance, RemoteSeq2SeqBackend(client), source)
print("generated + filtered:", result.candidates)

server.shutdown()
