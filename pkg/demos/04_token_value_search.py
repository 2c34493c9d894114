# Inference-time search over control-token values.
#
# The search samples WL/WR/WS/SS sets uniformly from the 31^4 grid
# (0.50..2.00, step 0.05), holds each set fixed for the whole validation
# set, and ranks sets by ACC@1@Top1. The ranking token is never searched.
#
# A real run points the backend at a fine-tuned model via the sidecar; this
# demo uses a synthetic backend whose accuracy peaks when the searched
# values sit near 1.00, so the search has something to find.

import tempfile
from pathlib import Path

from lexsimp import Instance
from lexsimp.generation import GeneratorBackend
from lexsimp.serializer import SerializationOptions, parse_source
from lexsimp.token_search import best_token_set, evaluate_token_set, run_search

RADII = (0.35, 0.55, 0.75, 0.95)


class BumpBackend(GeneratorBackend):
    """Answers correctly iff the searched values are close to all-1.00."""

    kind = "synthetic"
    name = "bump"

    def __init__(self, radius_by_id):
        self.radius_by_id = radius_by_id

    def raw_candidates(self, instance, source=None, beam_width=15):
        vector = parse_source(source).token_vector
        distance = max(abs(vector.wl_q - 1.0), abs(vector.wr_q - 1.0),
                       abs(vector.ws_q - 1.0), abs(vector.ss_q - 1.0))
        if distance <= self.radius_by_id[instance.id] + 1e-9:
            return [instance.gold[0][0], "filler", "padding"]
        return ["filler", "padding"]


validation = []
for i, radius in enumerate(RADII):
    validation.append(Instance(
        id=f"en-val-{i}", language="en",
        sentence=f"plain words surround target{i} here",
        complex_word=f"target{i}",
        gold=((f"best{i}", 5), (f"alt{i}", 1))))
backend = BumpBackend({inst.id: r for inst, r in zip(validation, RADII)})

options = SerializationOptions(include_mlm=False)
log_path = Path(tempfile.mkdtemp(prefix="lexsimp-demo-")) / "search.log"

result = run_search(validation, backend, trials=200, seed=0, options=options,
                    log_path=log_path)

print("top 5 sets by validation ACC@1@Top1:")
for trial in result.top_sets[:5]:
    v = trial.values
    print(f"  trial {trial.index:3d}  WL={v.wl:.2f} WR={v.wr:.2f} "
          f"WS={v.ws:.2f} SS={v.ss:.2f}  ->  {trial.objective:.2f}")

# Every trial went to the log, so the same call resumes for free (nothing is
# re-evaluated) and reproduces the identical result.

resumed = run_search(validation, backend, trials=200, seed=0, options=options,
                     log_path=log_path)
print("\nresume from log reproduces the result:", resumed == result)

# Final protocol: take the single best set and score the test set once.

best = best_token_set(result)
report = evaluate_token_set(validation, best, backend, options=options)
print(f"best set on held-out evaluation: ACC@1@Top1 = {report.acc_at_1_top1:.2f}")
