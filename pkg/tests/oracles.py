"""Independent reference implementations used to pin expected test values.

Nothing here shares code with the paths under test: the matcher oracle
is a naive sliding-window scan over token strings, the tokenizer oracle
is a regex/character-class reimplementation, and the hinge oracle is a
coarse-to-fine grid search over the two effective parameters of a
single-binary-feature problem.
"""

from __future__ import annotations

import re
import unicodedata

from motifkit.corpus import USAGE_ORDER

CLITICS = ("'s", "’s")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def oracle_tokenize(text: str) -> list[tuple[str, int, int]]:
    """Regex-driven re-derivation of the fallback tokenizer contract."""
    out: list[tuple[str, int, int]] = []
    for m in re.finditer(r"\S+", text):
        chunk, start = m.group(), m.start()
        k = 0
        while k < len(chunk) and _is_punct(chunk[k]):
            k += 1
        t = len(chunk)
        while t > k and _is_punct(chunk[t - 1]):
            t -= 1
        for idx in range(k):
            out.append((chunk[idx], start + idx, start + idx + 1))
        if k < t:
            core = chunk[k:t]
            if len(core) > 2 and core[-2:].casefold() in CLITICS:
                out.append((core[:-2], start + k, start + t - 2))
                out.append((core[-2:], start + t - 2, start + t))
            else:
                out.append((core, start + k, start + t))
        for idx in range(t, len(chunk)):
            out.append((chunk[idx], start + idx, start + idx + 1))
    return out


def oracle_match(doc, ruleset, tokens=None) -> list[tuple[int, int, str]]:
    """Naive O(tokens x patterns) scan; returns (begin, end, motif_id).

    Implements the contract directly: per motif, at every start position
    take the longest matching pattern, emit it, skip past it (plus the
    possessive clitic when the rule extends over it), and never let two
    matches of the same motif overlap.
    """
    if tokens is None:
        tokens = oracle_tokenize(doc.text)
    spans = [(t[1], t[2]) for t in tokens]
    raw = [t[0] for t in tokens]
    folded = [t[0].casefold() for t in tokens]

    results = []
    for rule in ruleset.rules:
        texts = raw if rule.case_sensitive else folded
        n = len(texts)
        i = 0
        while i < n:
            lengths = []
            for pattern in rule.patterns:
                if i + len(pattern) > n:
                    continue
                if all(texts[i + j] in alts for j, alts in enumerate(pattern)):
                    lengths.append(len(pattern))
            if lengths:
                best = max(lengths)
                end_tok = i + best - 1
                if (
                    rule.allow_possessive
                    and end_tok + 1 < n
                    and folded[end_tok + 1] in CLITICS
                ):
                    end_tok += 1
                results.append((spans[i][0], spans[end_tok][1], rule.motif_id))
                i = end_tok + 1
            else:
                i += 1
    results.sort(key=lambda r: (r[0], r[2]))
    return results


def oracle_hinge_binary(
    examples: list[tuple[float, int, float]], lam: float
) -> tuple[float, float]:
    """Grid-minimize lam/2*w^2 + mean weighted hinge for x in {0,1}.

    examples: (x, y in {-1,+1}, weight).  Parameterized by the two
    scores f0 = b and f1 = w + b; returns the optimal (f0, f1).
    """
    n = len(examples)
    grouped: dict[tuple[float, int], float] = {}
    for x, y, weight in examples:
        grouped[(x, y)] = grouped.get((x, y), 0.0) + weight

    def objective(f0: float, f1: float) -> float:
        w = f1 - f0
        total = lam / 2.0 * w * w
        acc = 0.0
        for (x, y), weight in grouped.items():
            score = f1 if x else f0
            acc += weight * max(0.0, 1.0 - y * score)
        return total + acc / n

    best = (0.0, 0.0)
    best_value = objective(*best)
    span, step = 3.0, 0.05
    for _ in range(3):
        f0_lo, f1_lo = best[0] - span, best[1] - span
        steps = int(round(2 * span / step)) + 1
        for i in range(steps):
            f0 = f0_lo + i * step
            for j in range(steps):
                f1 = f1_lo + j * step
                value = objective(f0, f1)
                if value < best_value - 1e-12:
                    best_value = value
                    best = (f0, f1)
        span, step = step * 2, step / 25
    return best


def oracle_binary_feature_mapping(
    joint_counts: dict[tuple[int, str], int],
    lam: float,
    balanced: bool = False,
) -> dict[int, str]:
    """argmax label for x=0 and x=1 under per-class grid-optimal scores.

    joint_counts maps (flag value, label value) to a row count.  With
    balanced=True each example is weighted n/(4*count(its label)).
    """
    total = sum(joint_counts.values())
    label_totals: dict[str, int] = {}
    for (_, label), count in joint_counts.items():
        label_totals[label] = label_totals.get(label, 0) + count

    scores: dict[str, tuple[float, float]] = {}
    for label in [u.value for u in USAGE_ORDER]:
        examples = []
        for (x, other), count in joint_counts.items():
            if count == 0:
                continue
            y = 1 if other == label else -1
            weight = total / (4.0 * label_totals[other]) if balanced else 1.0
            examples.extend([(float(x), y, weight)] * count)
        scores[label] = oracle_hinge_binary(examples, lam)

    mapping = {}
    for x in (0, 1):
        best_label = None
        best_score = None
        for label in [u.value for u in USAGE_ORDER]:
            value = scores[label][x]
            if best_score is None or value > best_score:
                best_score = value
                best_label = label
        mapping[x] = best_label
    return mapping


def oracle_f1_from_mapping(
    joint_counts: dict[tuple[int, str], int], mapping: dict[int, str]
) -> dict[str, float]:
    """Exact per-class F1 = 2tp/(2tp+fp+fn) given the x->label mapping."""
    f1 = {}
    for label in [u.value for u in USAGE_ORDER]:
        tp = fp = fn = 0
        for (x, gold), count in joint_counts.items():
            predicted = mapping[x]
            if predicted == label and gold == label:
                tp += count
            elif predicted == label:
                fp += count
            elif gold == label:
                fn += count
        f1[label] = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return f1
