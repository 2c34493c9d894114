"""Evaluation metrics for lexical simplification predictions.

Implements the TSAR-2022 shared-task metric suite over ranked candidate
lists: ACC@1, ACC@N@Top1 for N in {1, 2, 3}, and MAP@K / Potential@K for
K in {3, 5, 10}.

Matching is exact string equality after `normalize_term` (no lemmatization,
no morphological credit). All aggregation is done in exact rational
arithmetic (integer numerators and denominators, one division at the end),
so serial and parallel evaluation agree bit-for-bit and results can be
compared exactly against an independent scorer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import MetricsError

ACC_TOP1_NS = (1, 2, 3)
MAP_POTENTIAL_KS = (3, 5, 10)

_WS_RUN = re.compile(r"\s+")


def normalize_term(s: str) -> str:
    """Casefold, trim, and collapse internal whitespace to single spaces."""
    return _WS_RUN.sub(" ", s.strip()).casefold()


@dataclass(frozen=True)
class GoldView:
    """Normalized gold substitutes plus the most-suggested subset.

    `top_gold` holds the substitutes with the maximal annotator count (the
    reference set for the @Top1 metrics); it is always a subset of
    `gold_set` and both are non-empty.
    """

    gold_set: frozenset[str]
    top_gold: frozenset[str]

    def __post_init__(self):
        if not self.gold_set or not self.top_gold:
            raise MetricsError("gold view must be non-empty")
        if not self.top_gold <= self.gold_set:
            raise MetricsError("top_gold must be a subset of gold_set")


def gold_view(pairs: Iterable[tuple[str, int]]) -> GoldView:
    """Build a GoldView from (substitute, annotator_count) pairs.

    Substitutes that collide after normalization have their counts summed.
    """
    counts: dict[str, int] = {}
    for term, count in pairs:
        key = normalize_term(term)
        if not key:
            continue
        counts[key] = counts.get(key, 0) + int(count)
    if not counts:
        raise MetricsError("empty gold substitute list")
    top = max(counts.values())
    return GoldView(
        gold_set=frozenset(counts),
        top_gold=frozenset(t for t, c in counts.items() if c == top),
    )


@dataclass(frozen=True)
class MetricReport:
    """The ten metric values for one prediction set over one dataset."""

    acc_at_1: float
    acc_at_1_top1: float
    acc_at_2_top1: float
    acc_at_3_top1: float
    map_at_3: float
    map_at_5: float
    map_at_10: float
    potential_at_3: float
    potential_at_5: float
    potential_at_10: float
    instance_count: int

    def as_dict(self) -> dict[str, float]:
        return {
            "ACC@1": self.acc_at_1,
            "ACC@1@Top1": self.acc_at_1_top1,
            "ACC@2@Top1": self.acc_at_2_top1,
            "ACC@3@Top1": self.acc_at_3_top1,
            "MAP@3": self.map_at_3,
            "MAP@5": self.map_at_5,
            "MAP@10": self.map_at_10,
            "Potential@3": self.potential_at_3,
            "Potential@5": self.potential_at_5,
            "Potential@10": self.potential_at_10,
        }


def _check_aligned(predictions: Sequence[Sequence[str]], gold: Sequence[GoldView]) -> int:
    if len(predictions) != len(gold):
        raise MetricsError(
            f"prediction/gold count mismatch: {len(predictions)} vs {len(gold)}"
        )
    if not gold:
        raise MetricsError("cannot score an empty dataset")
    return len(gold)


def _normalized(preds: Sequence[str]) -> list[str]:
    return [normalize_term(p) for p in preds]


def _hit_in_top(preds: Sequence[str], reference: frozenset[str], n: int) -> bool:
    return any(p in reference for p in preds[:n])


def _ap_at_k(preds: Sequence[str], gold_set: frozenset[str], k: int,
             denominator: int | None = None) -> Fraction:
    """Average precision of the top-k predictions with binary relevance.

    The sum runs over i = 1..min(k, len(preds)); the denominator is k unless
    an alternative is supplied (used by cross-checking scorers).
    """
    hits = 0
    total = Fraction(0)
    for i, p in enumerate(preds[:k], start=1):
        if p in gold_set:
            hits += 1
            total += Fraction(hits, i)
    return total / (denominator if denominator is not None else k)


def acc_at_1(predictions: Sequence[Sequence[str]], gold: Sequence[GoldView]) -> float:
    """Fraction of instances whose first prediction is a gold substitute.

    Empty prediction lists count as misses.
    """
    n = _check_aligned(predictions, gold)
    hits = sum(
        1
        for preds, view in zip(predictions, gold)
        if preds and normalize_term(preds[0]) in view.gold_set
    )
    return float(Fraction(hits, n))


def acc_at_n_top1(n: int, predictions: Sequence[Sequence[str]],
                  gold: Sequence[GoldView]) -> float:
    """Fraction of instances where any top-n prediction is a most-suggested gold."""
    if n < 1:
        raise MetricsError("n must be >= 1")
    total = _check_aligned(predictions, gold)
    hits = sum(
        1
        for preds, view in zip(predictions, gold)
        if _hit_in_top(_normalized(preds), view.top_gold, n)
    )
    return float(Fraction(hits, total))


def potential_at_k(k: int, predictions: Sequence[Sequence[str]],
                   gold: Sequence[GoldView]) -> float:
    """Fraction of instances where any top-k prediction is a gold substitute."""
    if k < 1:
        raise MetricsError("k must be >= 1")
    total = _check_aligned(predictions, gold)
    hits = sum(
        1
        for preds, view in zip(predictions, gold)
        if _hit_in_top(_normalized(preds), view.gold_set, k)
    )
    return float(Fraction(hits, total))


def map_at_k(k: int, predictions: Sequence[Sequence[str]],
             gold: Sequence[GoldView]) -> float:
    """Mean average precision of the top-k predictions (binary relevance)."""
    if k < 1:
        raise MetricsError("k must be >= 1")
    total = _check_aligned(predictions, gold)
    acc = Fraction(0)
    for preds, view in zip(predictions, gold):
        acc += _ap_at_k(_normalized(preds), view.gold_set, k)
    return float(acc / total)


def evaluate_all(predictions: Sequence[Sequence[str]],
                 gold: Sequence[GoldView]) -> MetricReport:
    """Compute the full metric suite in one pass over the dataset."""
    n = _check_aligned(predictions, gold)
    acc1_hits = 0
    top1_hits = {t: 0 for t in ACC_TOP1_NS}
    pot_hits = {k: 0 for k in MAP_POTENTIAL_KS}
    ap_sums = {k: Fraction(0) for k in MAP_POTENTIAL_KS}

    for preds, view in zip(predictions, gold):
        norm = _normalized(preds)
        if norm and norm[0] in view.gold_set:
            acc1_hits += 1
        for t in ACC_TOP1_NS:
            if _hit_in_top(norm, view.top_gold, t):
                top1_hits[t] += 1
        for k in MAP_POTENTIAL_KS:
            if _hit_in_top(norm, view.gold_set, k):
                pot_hits[k] += 1
            ap_sums[k] += _ap_at_k(norm, view.gold_set, k)

    return MetricReport(
        acc_at_1=float(Fraction(acc1_hits, n)),
        acc_at_1_top1=float(Fraction(top1_hits[1], n)),
        acc_at_2_top1=float(Fraction(top1_hits[2], n)),
        acc_at_3_top1=float(Fraction(top1_hits[3], n)),
        map_at_3=float(ap_sums[3] / n),
        map_at_5=float(ap_sums[5] / n),
        map_at_10=float(ap_sums[10] / n),
        potential_at_3=float(Fraction(pot_hits[3], n)),
        potential_at_5=float(Fraction(pot_hits[5], n)),
        potential_at_10=float(Fraction(pot_hits[10], n)),
        instance_count=n,
    )


def report_to_kv(report: MetricReport, extra: Mapping[str, str] | None = None) -> str:
    """Flat key-value text rendering, one `name\\tvalue` line per metric."""
    lines = [f"{k}\t{v:.6f}" for k, v in report.as_dict().items()]
    lines.append(f"instances\t{report.instance_count}")
    for k, v in (extra or {}).items():
        lines.append(f"{k}\t{v}")
    return "\n".join(lines) + "\n"


def report_to_table(reports: Mapping[str, MetricReport]) -> str:
    """Fixed-width table with one row per system, TSAR column layout.

    Columns: ACC@1, ACC@1@Top1, ACC@2@Top1, ACC@3@Top1, MAP@3, MAP@5,
    MAP@10, Potential@3, Potential@5, Potential@10.
    """
    headers = ["System", "ACC@1", "ACC@1@Top1", "ACC@2@Top1", "ACC@3@Top1",
               "MAP@3", "MAP@5", "MAP@10", "Potential@3", "Potential@5",
               "Potential@10"]
    rows = [headers]
    for name, report in reports.items():
        rows.append([name] + [f"{v:.4f}" for v in report.as_dict().values()])
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"
