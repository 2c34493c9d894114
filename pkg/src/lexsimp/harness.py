"""Command-line front door: corpus -> tokens -> serialization -> generation
-> metrics -> search, with a run manifest next to every artifact.

Subcommands: stats, split, preprocess, mlm-candidates, generate, score,
search-tokens, rank-backends. Configuration precedence is flags > config
file (``--config``, JSON) > environment (``LEXSIMP_SIDECAR_URL``,
``LEXSIMP_FREQ_DIR``).

Exit codes: 0 success, 2 usage, 3 data error, 4 backend error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .control_tokens import HashEmbedder, TokenVector
from .corpus import (FORMATS, LANGUAGES, SplitSpec, dataset_stats, load_dataset,
                     save_dataset, split_dataset)
from .errors import BackendError, DataError, ToolkitError
from .generation import (GeneratorBackend, LexiconBaselineBackend,
                         MockTableBackend, RemoteFillMaskBackend,
                         RemoteSeq2SeqBackend, extract_mlm_candidates,
                         generate_candidates, rank_generators_by_potential,
                         read_predictions, write_predictions)
from .lexicon import Syllabifier, load_frequency_lexicon
from .metrics import evaluate_all, gold_view, normalize_term, report_to_kv, \
    report_to_table
from .serializer import (SerializationOptions, build_eval_source,
                         build_training_examples, write_training_file)
from .sidecar_client import RemoteEmbedder, SidecarClient
from .token_search import TokenValueSet, run_search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_BACKEND = 4


# --------------------------------------------------------------------------
# Manifest plumbing

def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class RunManifest:
    """Recipe and output record for one subcommand invocation.

    The recipe digest (command + inputs + parameters + toolkit version) is
    available before outputs are written so structured outputs can embed it;
    ``manifest.json`` is written once per artifact directory.
    """

    def __init__(self, command: str, argv: list[str]):
        self.command = command
        self.argv = list(argv)
        self.inputs: dict[str, str] = {}
        self.parameters: dict = {}
        self.outputs: dict[str, str] = {}

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = _sha256_file(path)

    def recipe_digest(self) -> str:
        recipe = {
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "toolkit_version": __version__,
        }
        return _sha256_text(json.dumps(recipe, sort_keys=True, ensure_ascii=False))

    def add_output(self, path: str | Path) -> None:
        self.outputs[str(path)] = _sha256_file(path)

    def write(self, directory: str | Path) -> Path:
        payload = {
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "toolkit_version": __version__,
            "manifest_digest": self.recipe_digest(),
            "outputs": self.outputs,
        }
        path = Path(directory) / "manifest.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True, ensure_ascii=False)
            handle.write("\n")
        return path


# --------------------------------------------------------------------------
# Configuration resolution

def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _setting(flag_value, config: dict, key: str, env_name: str, default=None):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    if env_name in os.environ:
        return os.environ[env_name]
    return default


def _resolve_sidecar_url(args) -> str | None:
    config = _load_config(getattr(args, "config", None))
    return _setting(getattr(args, "sidecar_url", None), config,
                    "sidecar_url", "LEXSIMP_SIDECAR_URL")


def _resolve_freq_path(args) -> Path:
    config = _load_config(getattr(args, "config", None))
    freq_file = getattr(args, "freq_file", None)
    if freq_file:
        return Path(freq_file)
    freq_dir = _setting(getattr(args, "freq_dir", None), config,
                        "freq_dir", "LEXSIMP_FREQ_DIR")
    if freq_dir is None:
        raise DataError("no frequency lexicon configured "
                        "(--freq-file, --freq-dir, or LEXSIMP_FREQ_DIR)")
    return Path(freq_dir) / f"freq.{args.language}.txt"


def _make_client(args, url: str | None) -> SidecarClient:
    if not url:
        raise BackendError("no sidecar URL configured "
                           "(--sidecar-url or LEXSIMP_SIDECAR_URL)")
    model = getattr(args, "model", None) or "stub"
    return SidecarClient(url, fill_mask_model=model, embed_model=model,
                         generate_model=model)


def _make_backend(args) -> GeneratorBackend:
    kind = args.backend
    if kind == "mock_table":
        if not args.table:
            raise DataError("mock_table backend needs --table")
        with open(args.table, encoding="utf-8") as handle:
            table = json.load(handle)
        return MockTableBackend(table)
    if kind == "lexicon_baseline":
        if not args.synonyms:
            raise DataError("lexicon_baseline backend needs --synonyms")
        with open(args.synonyms, encoding="utf-8") as handle:
            synonyms = json.load(handle)
        lexicon = load_frequency_lexicon(_resolve_freq_path(args), args.language)
        return LexiconBaselineBackend(synonyms, lexicon)
    client = _make_client(args, _resolve_sidecar_url(args))
    if kind == "remote_seq2seq":
        return RemoteSeq2SeqBackend(client)
    if kind == "remote_fill_mask":
        return RemoteFillMaskBackend(client)
    raise DataError(f"unknown backend kind {args.backend!r}")


def _load_mlm_file(path: str | None) -> dict[str, list[str]]:
    if not path:
        return {}
    lookup: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                record = json.loads(line)
                lookup[record["id"]] = list(record["candidates"])
    return lookup


def _serialization_options(args) -> SerializationOptions:
    return SerializationOptions(
        include_mlm=not getattr(args, "no_mlm", False),
        mlm_top_k=getattr(args, "mlm_top_k", 10),
        include_span_marker=getattr(args, "span_marker", False),
    )


def _prepare_out(path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------
# Subcommands

def _cmd_stats(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    stats = dataset_stats(instances)
    lines = [
        f"instances\t{stats.instance_count}",
        f"min_tokens\t{stats.min_tokens}",
        f"max_tokens\t{stats.max_tokens}",
        f"avg_tokens\t{stats.avg_tokens:.2f}",
    ]
    print("\n".join(lines))
    if args.out:
        manifest = RunManifest("stats", args.argv)
        manifest.add_input(args.dataset)
        manifest.parameters = {"format": args.format, "language": args.language}
        out = _prepare_out(args.out)
        with open(out, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
            handle.write(f"manifest_digest\t{manifest.recipe_digest()}\n")
        manifest.add_output(out)
        manifest.write(out.parent)
    return EXIT_OK


def _cmd_split(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    spec = SplitSpec(train_fraction=args.train, validation_fraction=args.val,
                     test_fraction=args.test, seed=args.seed)
    train, validation, test = split_dataset(instances, spec)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    manifest = RunManifest("split", args.argv)
    manifest.add_input(args.dataset)
    manifest.parameters = {
        "format": args.format, "language": args.language,
        "train_fraction": args.train, "validation_fraction": args.val,
        "test_fraction": args.test, "seed": args.seed,
    }
    for name, part in (("train", train), ("validation", validation),
                       ("test", test)):
        path = outdir / f"{name}.tsv"
        save_dataset(part, path, "tsar_aggregated")
        manifest.add_output(path)
    manifest.write(outdir)
    print(f"split sizes: train={len(train)} validation={len(validation)} "
          f"test={len(test)}")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    lexicon = load_frequency_lexicon(_resolve_freq_path(args), args.language)
    syllabifier = Syllabifier(args.language)
    url = _resolve_sidecar_url(args)
    if args.embedder == "sidecar":
        embedder = RemoteEmbedder(_make_client(args, url))
    else:
        embedder = HashEmbedder()
    options = _serialization_options(args)
    mlm_lookup = _load_mlm_file(args.mlm_file)

    examples = []
    for instance in instances:
        examples.extend(build_training_examples(
            instance, lexicon, syllabifier, embedder,
            mlm_lookup.get(instance.id, ()), options))

    out = _prepare_out(args.out)
    manifest = RunManifest("preprocess", args.argv)
    manifest.add_input(args.dataset)
    if args.mlm_file:
        manifest.add_input(args.mlm_file)
    manifest.parameters = {
        "format": args.format, "language": args.language,
        "include_mlm": options.include_mlm, "mlm_top_k": options.mlm_top_k,
        "include_span_marker": options.include_span_marker,
        "embedder": args.embedder,
    }
    write_training_file(examples, out, options, token_provenance="gold")
    manifest.add_output(out)
    manifest.write(out.parent)
    print(f"wrote {len(examples)} training examples to {out}")
    return EXIT_OK


def _cmd_mlm_candidates(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    client = _make_client(args, _resolve_sidecar_url(args))

    def worker(instance):
        return extract_mlm_candidates(instance.sentence, instance.complex_word,
                                      k=args.k, client=client)
    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        all_candidates = list(pool.map(worker, instances))

    out = _prepare_out(args.out)
    manifest = RunManifest("mlm-candidates", args.argv)
    manifest.add_input(args.dataset)
    manifest.parameters = {"format": args.format, "language": args.language,
                           "k": args.k, "model": args.model}
    with open(out, "w", encoding="utf-8") as handle:
        for instance, candidates in zip(instances, all_candidates):
            handle.write(json.dumps(
                {"id": instance.id, "candidates": candidates},
                ensure_ascii=False) + "\n")
    manifest.add_output(out)
    manifest.write(out.parent)
    print(f"wrote MLM candidates for {len(instances)} instances to {out}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    backend = _make_backend(args)
    options = _serialization_options(args)
    mlm_lookup = _load_mlm_file(args.mlm_file)
    vector = TokenVector.from_grid(args.wl, args.wr, args.ws, args.ss)

    def worker(instance):
        source = build_eval_source(instance, vector,
                                   mlm_lookup.get(instance.id, ()), options)
        return generate_candidates(instance, backend, source,
                                   beam_width=args.beam, limit=args.limit)
    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        candidate_lists = list(pool.map(worker, instances))

    out = _prepare_out(args.out)
    manifest = RunManifest("generate", args.argv)
    manifest.add_input(args.dataset)
    manifest.parameters = {
        "format": args.format, "language": args.language,
        "backend": args.backend, "beam_width": args.beam, "limit": args.limit,
        "tokens": {"wl": args.wl, "wr": args.wr, "ws": args.ws, "ss": args.ss},
    }
    write_predictions(instances, candidate_lists, out)
    manifest.add_output(out)
    manifest.write(out.parent)
    print(f"wrote predictions for {len(instances)} instances to {out}")
    return EXIT_OK


def _cmd_score(args) -> int:
    gold_instances = load_dataset(args.gold, args.format, args.language)
    rows = read_predictions(args.pred)
    if len(rows) != len(gold_instances):
        raise DataError(f"prediction file has {len(rows)} rows, gold has "
                        f"{len(gold_instances)} instances")
    predictions = []
    for row, instance in zip(rows, gold_instances):
        sentence, complex_word, candidates = row
        if normalize_term(complex_word) != normalize_term(instance.complex_word):
            raise DataError(
                f"prediction row for {complex_word!r} does not line up with "
                f"gold instance {instance.id} ({instance.complex_word!r})")
        predictions.append(candidates)
    views = [instance.gold_view() for instance in gold_instances]
    report = evaluate_all(predictions, views)
    print(report_to_table({args.system: report}), end="")

    if args.out:
        out = _prepare_out(args.out)
        manifest = RunManifest("score", args.argv)
        manifest.add_input(args.pred)
        manifest.add_input(args.gold)
        manifest.parameters = {"format": args.format, "language": args.language,
                               "system": args.system}
        kv = report_to_kv(report,
                          extra={"manifest_digest": manifest.recipe_digest()})
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(kv)
        manifest.add_output(out)
        manifest.write(out.parent)
    return EXIT_OK


def _cmd_search_tokens(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    backend = _make_backend(args)
    options = _serialization_options(args)
    mlm_lookup = _load_mlm_file(args.mlm_file)
    result = run_search(instances, backend, trials=args.trials, seed=args.seed,
                        options=options, mlm_lookup=mlm_lookup,
                        beam_width=args.beam, limit=args.limit,
                        log_path=args.log)

    out = _prepare_out(args.out)
    manifest = RunManifest("search-tokens", args.argv)
    manifest.add_input(args.dataset)
    manifest.parameters = {
        "format": args.format, "language": args.language,
        "backend": args.backend, "trials": args.trials, "seed": args.seed,
    }
    payload = {
        "manifest_digest": manifest.recipe_digest(),
        "seed": result.seed,
        "trial_budget": result.trial_budget,
        "top_sets": [
            {"trial": t.index, "wl": t.values.wl, "wr": t.values.wr,
             "ws": t.values.ws, "ss": t.values.ss, "cr": t.values.cr,
             "objective": t.objective}
            for t in result.top_sets
        ],
    }
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    manifest.add_output(out)
    if args.log:
        manifest.add_output(args.log)
    manifest.write(out.parent)
    if result.top_sets:
        best = result.top_sets[0]
        print(f"best set: WL={best.values.wl:.2f} WR={best.values.wr:.2f} "
              f"WS={best.values.ws:.2f} SS={best.values.ss:.2f} "
              f"ACC@1@Top1={best.objective:.4f}")
    return EXIT_OK


def _cmd_rank_backends(args) -> int:
    instances = load_dataset(args.dataset, args.format, args.language)
    url = _resolve_sidecar_url(args)
    backends = []
    for model in args.models:
        client = SidecarClient(url or "", fill_mask_model=model) if url else None
        if client is None:
            raise BackendError("rank-backends needs a sidecar URL")
        backends.append(RemoteFillMaskBackend(client, name=model))
    rows = rank_generators_by_potential(instances, backends, k=args.k)

    out = _prepare_out(args.out)
    manifest = RunManifest("rank-backends", args.argv)
    manifest.add_input(args.dataset)
    manifest.parameters = {"format": args.format, "language": args.language,
                           "k": args.k, "models": list(args.models)}
    with open(out, "w", encoding="utf-8") as handle:
        for row in rows:
            if row.potential is None:
                handle.write(f"{row.backend}\tERROR\t{row.error}\n")
            else:
                handle.write(f"{row.backend}\t{row.potential:.4f}\n")
    manifest.add_output(out)
    manifest.write(out.parent)
    for row in rows:
        detail = f"{row.potential:.4f}" if row.potential is not None \
            else f"ERROR ({row.error})"
        print(f"{row.backend}\t{detail}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser

def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="input TSV file")
    parser.add_argument("--format", choices=FORMATS, default="tsar_aggregated")
    parser.add_argument("--language", choices=LANGUAGES, default="en")


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", default="mock_table",
                        choices=["mock_table", "lexicon_baseline",
                                 "remote_seq2seq", "remote_fill_mask"])
    parser.add_argument("--table", help="JSON instance-id -> candidates table")
    parser.add_argument("--synonyms", help="JSON word -> synonyms table")
    parser.add_argument("--sidecar-url")
    parser.add_argument("--model", help="model identifier for remote backends")
    parser.add_argument("--freq-dir")
    parser.add_argument("--freq-file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexsimp",
        description="Multilingual controllable lexical simplification toolkit")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("stats", help="dataset token statistics")
    _add_dataset_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("split", help="train/validation/test partition")
    _add_dataset_flags(p)
    p.add_argument("--train", type=float, default=0.70)
    p.add_argument("--val", type=float, default=0.15)
    p.add_argument("--test", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("preprocess", help="build source/target training pairs")
    _add_dataset_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--freq-dir")
    p.add_argument("--freq-file")
    p.add_argument("--sidecar-url")
    p.add_argument("--model")
    p.add_argument("--embedder", choices=["hash", "sidecar"], default="hash")
    p.add_argument("--mlm-file", help="JSONL from the mlm-candidates subcommand")
    p.add_argument("--no-mlm", action="store_true")
    p.add_argument("--mlm-top-k", type=int, default=10)
    p.add_argument("--span-marker", action="store_true")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("mlm-candidates", help="extract masked-LM candidates")
    _add_dataset_flags(p)
    p.add_argument("--sidecar-url")
    p.add_argument("--model", default="stub")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mlm_candidates)

    p = sub.add_parser("generate", help="produce candidate predictions")
    _add_dataset_flags(p)
    _add_backend_flags(p)
    p.add_argument("--beam", type=int, default=15)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--wl", type=float, default=1.00)
    p.add_argument("--wr", type=float, default=1.00)
    p.add_argument("--ws", type=float, default=1.00)
    p.add_argument("--ss", type=float, default=1.00)
    p.add_argument("--mlm-file")
    p.add_argument("--no-mlm", action="store_true")
    p.add_argument("--mlm-top-k", type=int, default=10)
    p.add_argument("--span-marker", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("score", help="evaluate a prediction file")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--format", choices=FORMATS, default="tsar_aggregated")
    p.add_argument("--language", choices=LANGUAGES, default="en")
    p.add_argument("--system", default="system")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("search-tokens", help="token-value search on validation")
    _add_dataset_flags(p)
    _add_backend_flags(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beam", type=int, default=15)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--mlm-file")
    p.add_argument("--no-mlm", action="store_true")
    p.add_argument("--mlm-top-k", type=int, default=10)
    p.add_argument("--span-marker", action="store_true")
    p.add_argument("--log", help="resumable trial log (JSONL)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_search_tokens)

    p = sub.add_parser("rank-backends",
                       help="rank fill-mask models by Potential@k")
    _add_dataset_flags(p)
    p.add_argument("--sidecar-url")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank_backends)

    return parser


def run_command(argv: list[str]) -> int:
    """Parse and execute one CLI invocation; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    args.argv = list(argv)
    try:
        return args.func(args)
    except BackendError as err:
        print(f"backend error: {err}", file=sys.stderr)
        return EXIT_BACKEND
    except (DataError, ToolkitError, OSError, json.JSONDecodeError,
            ValueError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
