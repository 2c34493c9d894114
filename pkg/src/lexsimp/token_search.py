"""Inference-time search over control-token values.

Samples WL/WR/WS/SS value sets uniformly from the 31^4 quantization grid
(without replacement while the grid lasts), holds each set fixed for every
validation instance, scores the resulting predictions with ACC@1@Top1, and
keeps the ten best sets. The ranking token is never searched; it stays at
1.00 throughout.

Trials append to a line-delimited log, and a run can be resumed from the
log plus the original seed: already-logged trials are not re-evaluated.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .control_tokens import TokenVector, grid_values, is_on_grid
from .corpus import Instance
from .errors import BackendError, SearchError
from .generation import GeneratorBackend, generate_candidates
from .metrics import MetricReport, acc_at_n_top1, evaluate_all
from .serializer import SerializationOptions, build_eval_source

logger = logging.getLogger(__name__)

TOP_SETS = 10


@dataclass(frozen=True)
class TokenValueSet:
    """One grid point of the search space; the ranking token is fixed."""

    wl: float
    wr: float
    ws: float
    ss: float

    def __post_init__(self):
        for name, value in (("wl", self.wl), ("wr", self.wr),
                            ("ws", self.ws), ("ss", self.ss)):
            if not is_on_grid(value):
                raise SearchError(f"{name} value {value!r} is off the search grid")

    @property
    def cr(self) -> float:
        return 1.00

    def to_vector(self) -> TokenVector:
        return TokenVector.from_grid(self.wl, self.wr, self.ws, self.ss)


@dataclass(frozen=True)
class Trial:
    index: int
    values: TokenValueSet
    objective: float | None


@dataclass(frozen=True)
class SearchResult:
    trials: tuple[Trial, ...]
    top_sets: tuple[Trial, ...]
    seed: int
    trial_budget: int


def sample_token_sets(trials: int, seed: int) -> list[TokenValueSet]:
    """Deterministic uniform sample of grid points, without replacement
    until the grid is exhausted."""
    grid = grid_values()
    total = len(grid) ** 4
    rng = random.Random(seed)
    seen: set[tuple[int, int, int, int]] = set()
    sets = []
    for _ in range(trials):
        while True:
            point = (rng.randrange(len(grid)), rng.randrange(len(grid)),
                     rng.randrange(len(grid)), rng.randrange(len(grid)))
            if point not in seen:
                seen.add(point)
                break
            if len(seen) >= total:
                break
        sets.append(TokenValueSet(wl=grid[point[0]], wr=grid[point[1]],
                                  ws=grid[point[2]], ss=grid[point[3]]))
    return sets


def _predictions(instances: Sequence[Instance], vector: TokenVector,
                 backend: GeneratorBackend, options: SerializationOptions,
                 mlm_lookup: Mapping[str, Sequence[str]] | None,
                 beam_width: int, limit: int,
                 tolerate_failures: bool) -> list[list[str]]:
    predictions = []
    for instance in instances:
        candidates = (mlm_lookup or {}).get(instance.id, ())
        source = build_eval_source(instance, vector, candidates, options)
        try:
            result = generate_candidates(instance, backend, source,
                                         beam_width=beam_width, limit=limit)
        except BackendError as err:
            if not tolerate_failures:
                raise
            logger.warning("backend failed on instance %s: %s", instance.id, err)
            predictions.append([])
            continue
        predictions.append(list(result.candidates))
    return predictions


def evaluate_token_set(instances: Sequence[Instance], values: TokenValueSet,
                       backend: GeneratorBackend,
                       options: SerializationOptions = SerializationOptions(),
                       mlm_lookup: Mapping[str, Sequence[str]] | None = None,
                       beam_width: int = 15, limit: int = 10) -> MetricReport:
    """Serialize, generate, filter, and score a test set with fixed values.

    Per-instance backend failures are logged and scored as empty predictions.
    """
    predictions = _predictions(instances, values.to_vector(), backend, options,
                               mlm_lookup, beam_width, limit,
                               tolerate_failures=True)
    views = [instance.gold_view() for instance in instances]
    return evaluate_all(predictions, views)


def _log_header(seed: int, trials: int) -> dict:
    return {"kind": "token-search", "seed": seed, "trial_budget": trials,
            "grid": "0.50:2.00:0.05"}


def load_search_log(path: str | Path) -> tuple[dict, dict[int, Trial]]:
    """Read a search log into (header, completed trials keyed by index)."""
    header = None
    completed: dict[int, Trial] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            if record.get("kind") == "token-search":
                header = record
                continue
            values = TokenValueSet(wl=record["wl"], wr=record["wr"],
                                   ws=record["ws"], ss=record["ss"])
            completed[record["trial"]] = Trial(
                index=record["trial"], values=values,
                objective=record["objective"])
    if header is None:
        raise SearchError(f"search log {path} has no header line")
    return header, completed


def run_search(validation: Sequence[Instance], backend: GeneratorBackend,
               trials: int = 200, seed: int = 0,
               options: SerializationOptions = SerializationOptions(),
               mlm_lookup: Mapping[str, Sequence[str]] | None = None,
               beam_width: int = 15, limit: int = 10,
               log_path: str | Path | None = None) -> SearchResult:
    """Search token values on a validation set, maximizing ACC@1@Top1.

    Deterministic for a fixed seed. A backend failure aborts that trial
    (logged, budget still consumed). With `log_path`, finished trials are
    appended as they complete and re-running resumes from the log.
    """
    if not validation:
        raise SearchError("validation set is empty")
    if trials < 1:
        raise SearchError("trial budget must be >= 1")

    candidates = sample_token_sets(trials, seed)
    views = [instance.gold_view() for instance in validation]

    completed: dict[int, Trial] = {}
    log_handle = None
    if log_path is not None:
        log_path = Path(log_path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        if log_path.exists() and log_path.stat().st_size > 0:
            header, completed = load_search_log(log_path)
            if header.get("seed") != seed or header.get("trial_budget") != trials:
                raise SearchError(
                    f"log {log_path} was produced by a different search "
                    f"(seed {header.get('seed')}, trials {header.get('trial_budget')})")
            for index, trial in completed.items():
                if index >= trials or trial.values != candidates[index]:
                    raise SearchError(
                        f"log {log_path} does not match the seeded trial sequence")
            log_handle = open(log_path, "a", encoding="utf-8")
        else:
            log_handle = open(log_path, "w", encoding="utf-8")
            log_handle.write(json.dumps(_log_header(seed, trials)) + "\n")
            log_handle.flush()

    try:
        results = []
        for index, values in enumerate(candidates):
            if index in completed:
                results.append(completed[index])
                continue
            objective: float | None
            try:
                predictions = _predictions(
                    validation, values.to_vector(), backend, options,
                    mlm_lookup, beam_width, limit, tolerate_failures=False)
                objective = acc_at_n_top1(1, predictions, views)
            except BackendError as err:
                logger.warning("trial %d aborted: %s", index, err)
                objective = None
            trial = Trial(index=index, values=values, objective=objective)
            results.append(trial)
            if log_handle is not None:
                record = {"trial": index, "wl": values.wl, "wr": values.wr,
                          "ws": values.ws, "ss": values.ss,
                          "objective": objective}
                log_handle.write(json.dumps(record) + "\n")
                log_handle.flush()
    finally:
        if log_handle is not None:
            log_handle.close()

    scored = [t for t in results if t.objective is not None]
    scored.sort(key=lambda t: (-t.objective, t.index))
    return SearchResult(
        trials=tuple(results),
        top_sets=tuple(scored[:TOP_SETS]),
        seed=seed,
        trial_budget=trials,
    )


def best_token_set(result: SearchResult) -> TokenValueSet:
    """The single set that maximized the validation objective."""
    if not result.top_sets:
        raise SearchError("search produced no successful trials")
    return result.top_sets[0].values
