"""Independent brute-force scorer used to cross-check the metrics module.

Deliberately a separate implementation: everything is computed per instance
from first principles with `fractions.Fraction`, enumerating precision at
every cutoff instead of accumulating hits. Terms are compared after a local
lower/strip normalization, so the scorer shares no helper code with the
package.
"""

from fractions import Fraction


def _norm(term):
    return " ".join(term.split()).lower()


def _precision_at(preds, gold, i):
    hits = sum(1 for p in preds[:i] if p in gold)
    return Fraction(hits, i)


def brute_force_ap(preds, gold, k, denominator="k"):
    """Average precision over the top-k predictions.

    denominator="k" divides by k; denominator="min" divides by
    min(k, len(gold)) to cross-check the alternative convention.
    """
    preds = [_norm(p) for p in preds]
    gold = {_norm(g) for g in gold}
    total = Fraction(0)
    for i in range(1, min(k, len(preds)) + 1):
        if preds[i - 1] in gold:
            total += _precision_at(preds, gold, i)
    if denominator == "min":
        return total / min(k, len(gold))
    return total / k


def brute_force_report(prediction_lists, gold_sets, top_gold_sets):
    """All ten metric values, as floats of exact rationals.

    `prediction_lists` is one ranked list per instance; `gold_sets` and
    `top_gold_sets` are the full and most-suggested gold sets.
    """
    n = len(prediction_lists)
    assert n == len(gold_sets) == len(top_gold_sets) and n > 0

    normalized = [[_norm(p) for p in preds] for preds in prediction_lists]
    golds = [{_norm(g) for g in gold} for gold in gold_sets]
    tops = [{_norm(g) for g in top} for top in top_gold_sets]

    def fraction_where(flags):
        return Fraction(sum(1 for f in flags if f), n)

    report = {}
    report["ACC@1"] = float(fraction_where(
        bool(preds) and preds[0] in gold
        for preds, gold in zip(normalized, golds)))
    for t in (1, 2, 3):
        report[f"ACC@{t}@Top1"] = float(fraction_where(
            any(p in top for p in preds[:t])
            for preds, top in zip(normalized, tops)))
    for k in (3, 5, 10):
        report[f"Potential@{k}"] = float(fraction_where(
            any(p in gold for p in preds[:k])
            for preds, gold in zip(normalized, golds)))
        ap_total = Fraction(0)
        for preds, gold in zip(normalized, golds):
            ap_total += brute_force_ap(preds, gold, k)
        report[f"MAP@{k}"] = float(ap_total / n)
    return report
