"""Evaluation and agreement statistics.

Confusion matrices and per-class precision/recall/F1 with the 0/0 -> 0
convention (classes never predicted get 0.00), macro-F1 as the
unweighted mean over exactly four classes, Fleiss' kappa for annotator
agreement, and per-batch count tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .corpus import USAGE_ORDER, AnnotationRecord, UsageLabel
from .errors import DegenerateAgreementError, MetricsError

K = len(USAGE_ORDER)


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[gold][predicted], both indexed in canonical label order."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.counts) != K or any(len(row) != K for row in self.counts):
            raise MetricsError(f"confusion matrix must be {K}x{K}")
        if any(v < 0 for row in self.counts for v in row):
            raise MetricsError("confusion matrix counts must be >= 0")

    @property
    def total(self) -> int:
        return sum(v for row in self.counts for v in row)

    def true_positives(self, c: int) -> int:
        return self.counts[c][c]

    def false_positives(self, c: int) -> int:
        return sum(self.counts[g][c] for g in range(K)) - self.counts[c][c]

    def false_negatives(self, c: int) -> int:
        return sum(self.counts[c]) - self.counts[c][c]


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    per_class: Mapping[UsageLabel, ClassScores]
    macro_f1: float
    matrix: ConfusionMatrix
    n: int


@dataclass(frozen=True)
class AgreementTable:
    """N items x k categories matrix of rater counts, n raters per item."""

    rows: tuple[tuple[int, ...], ...]
    n_raters: int

    def __post_init__(self):
        if self.n_raters < 2:
            raise MetricsError("agreement needs at least 2 raters")
        if not self.rows:
            raise MetricsError("agreement table has no items")
        width = len(self.rows[0])
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise MetricsError(f"agreement row {i} has inconsistent width")
            if any(v < 0 for v in row):
                raise MetricsError(f"agreement row {i} has negative counts")
            if sum(row) != self.n_raters:
                raise MetricsError(
                    f"agreement row {i} sums to {sum(row)}, expected {self.n_raters}"
                )


@dataclass(frozen=True)
class BatchStats:
    batch_id: str
    counts: Mapping[UsageLabel, int]
    batch_size: int
    kappa: Optional[float] = None

    def __post_init__(self):
        if sum(self.counts.values()) != self.batch_size:
            raise MetricsError(
                f"batch {self.batch_id}: counts sum "
                f"{sum(self.counts.values())} != size {self.batch_size}"
            )


# ---------------------------------------------------------------------------


def confusion(
    pred: Sequence[tuple[str, UsageLabel]],
    gold: Sequence[tuple[str, UsageLabel]],
) -> ConfusionMatrix:
    """Accumulate (candidate_id, label) pairs aligned by id.

    Input order is irrelevant; id sets must match exactly.
    """
    if len(pred) != len(gold):
        raise MetricsError(f"length mismatch: {len(pred)} predictions, {len(gold)} gold")
    gold_by_id: dict[str, UsageLabel] = {}
    for cid, label in gold:
        if cid in gold_by_id:
            raise MetricsError(f"duplicate gold candidate_id {cid!r}")
        gold_by_id[cid] = label
    counts = [[0] * K for _ in range(K)]
    seen = set()
    for cid, label in pred:
        if cid not in gold_by_id:
            raise MetricsError(f"prediction for unknown candidate_id {cid!r}")
        if cid in seen:
            raise MetricsError(f"duplicate prediction for candidate_id {cid!r}")
        seen.add(cid)
        g = USAGE_ORDER.index(gold_by_id[cid])
        p = USAGE_ORDER.index(label)
        counts[g][p] += 1
    return ConfusionMatrix(tuple(tuple(row) for row in counts))


def prf_report(matrix: ConfusionMatrix) -> EvalReport:
    """Per-class precision/recall/F1 plus macro-F1 (unweighted mean of 4)."""
    per_class = {}
    f1_sum = 0.0
    for c, label in enumerate(USAGE_ORDER):
        tp = matrix.true_positives(c)
        fp = matrix.false_positives(c)
        fn = matrix.false_negatives(c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        # Algebraically the harmonic mean of P and R, with 0/0 -> 0.
        f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        per_class[label] = ClassScores(precision, recall, f1)
        f1_sum += f1
    return EvalReport(
        per_class=per_class,
        macro_f1=f1_sum / K,
        matrix=matrix,
        n=matrix.total,
    )


def fleiss_kappa(table: AgreementTable) -> float:
    """Chance-corrected agreement over N items, n raters, k categories.

    Raises DegenerateAgreementError when every rating falls in a single
    category (expected agreement is 1, kappa undefined); silence there
    would mask broken fixtures.
    """
    n = table.n_raters
    big_n = len(table.rows)
    k = len(table.rows[0])
    column_totals = [sum(row[j] for row in table.rows) for j in range(k)]
    if sum(1 for t in column_totals if t > 0) == 1:
        raise DegenerateAgreementError(
            "all ratings in one category; expected agreement is 1 and kappa is undefined"
        )
    p_i_sum = 0.0
    for row in table.rows:
        p_i_sum += (sum(v * v for v in row) - n) / (n * (n - 1))
    p_bar = p_i_sum / big_n
    p_e = sum((t / (big_n * n)) ** 2 for t in column_totals)
    return (p_bar - p_e) / (1.0 - p_e)


def agreement_table_from_records(
    records: Sequence[AnnotationRecord],
) -> AgreementTable:
    """Build the item-by-category table from per-annotator records.

    Items are candidate_ids (sorted); every item must be rated by the
    same number of distinct annotators.
    """
    by_item: dict[str, list[AnnotationRecord]] = {}
    for record in records:
        by_item.setdefault(record.candidate.candidate_id, []).append(record)
    if not by_item:
        raise MetricsError("no annotation records")
    rows = []
    n_raters = None
    for cid in sorted(by_item):
        item_records = by_item[cid]
        annotators = {r.annotator_id for r in item_records}
        if len(annotators) != len(item_records):
            raise MetricsError(f"duplicate annotator for candidate {cid!r}")
        if n_raters is None:
            n_raters = len(item_records)
        elif len(item_records) != n_raters:
            raise MetricsError(
                f"candidate {cid!r} has {len(item_records)} ratings, expected {n_raters}"
            )
        row = [0] * K
        for record in item_records:
            row[USAGE_ORDER.index(record.label)] += 1
        rows.append(tuple(row))
    assert n_raters is not None
    return AgreementTable(rows=tuple(rows), n_raters=n_raters)


def batch_stats(
    annotations: Sequence[AnnotationRecord],
    adjudicated: Mapping[str, UsageLabel],
) -> tuple[list[BatchStats], BatchStats]:
    """Per-batch adjudicated label counts plus a totals row.

    Kappa is computed per batch when every item has the same number of
    raters >= 2, otherwise left unset.
    """
    by_batch: dict[str, list[AnnotationRecord]] = {}
    for record in annotations:
        by_batch.setdefault(record.batch_id, []).append(record)

    stats = []
    total_counts = {label: 0 for label in USAGE_ORDER}
    for batch_id in sorted(by_batch):
        records = by_batch[batch_id]
        candidate_ids = sorted({r.candidate.candidate_id for r in records})
        counts = {label: 0 for label in USAGE_ORDER}
        for cid in candidate_ids:
            if cid not in adjudicated:
                raise MetricsError(
                    f"batch {batch_id}: no adjudicated label for {cid!r}"
                )
            counts[adjudicated[cid]] += 1
        kappa = None
        per_item_counts = {
            cid: sum(1 for r in records if r.candidate.candidate_id == cid)
            for cid in candidate_ids
        }
        distinct = set(per_item_counts.values())
        if len(distinct) == 1 and distinct.pop() >= 2:
            kappa = fleiss_kappa(agreement_table_from_records(records))
        for label in USAGE_ORDER:
            total_counts[label] += counts[label]
        stats.append(
            BatchStats(
                batch_id=batch_id,
                counts=counts,
                batch_size=len(candidate_ids),
                kappa=kappa,
            )
        )
    totals = BatchStats(
        batch_id="Total",
        counts=total_counts,
        batch_size=sum(total_counts.values()),
        kappa=None,
    )
    return stats, totals


# ---------------------------------------------------------------------------
# Plain-text renderings


def render_batch_table(stats: Sequence[BatchStats], totals: BatchStats) -> str:
    """Batch counts table (group, agreement, per-category counts, size)."""
    header = ["Batch", "Kappa"] + [f"#{label.value}" for label in USAGE_ORDER] + ["Size"]
    rows = [header]
    for s in stats:
        rows.append(
            [s.batch_id, f"{s.kappa:.3f}" if s.kappa is not None else "-"]
            + [str(s.counts[label]) for label in USAGE_ORDER]
            + [str(s.batch_size)]
        )
    rows.append(
        [totals.batch_id, "-"]
        + [f"{totals.counts[label]:,}" for label in USAGE_ORDER]
        + [f"{totals.batch_size:,}"]
    )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.rjust(widths[j]) if j else cell.ljust(widths[j])
                               for j, cell in enumerate(row)))
        if i == 0 or i == len(rows) - 2:
            lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines) + "\n"


def render_eval_table(report: EvalReport, name: str = "model") -> str:
    """Per-class F1 table in report order (motif column first)."""
    display = [
        ("Motif F1", UsageLabel.MOTIFIC),
        ("Eponym F1", UsageLabel.EPONYMIC),
        ("Referential F1", UsageLabel.REFERENTIAL),
        ("Unrelated F1", UsageLabel.UNRELATED),
    ]
    header = ["Model"] + [d[0] for d in display] + ["Macro F1"]
    row = [name] + [f"{report.per_class[d[1]].f1:.2f}" for d in display]
    row.append(f"{report.macro_f1:.2f}")
    widths = [max(len(header[i]), len(row[i])) for i in range(len(header))]
    line1 = "  ".join(header[i].ljust(widths[i]) for i in range(len(header)))
    line2 = "  ".join(row[i].ljust(widths[i]) for i in range(len(header)))
    return f"{line1}\n{'-' * len(line1)}\n{line2}\n"


def report_to_json(report: EvalReport, seed: Optional[int] = None) -> str:
    data = {
        "n": report.n,
        "labels": [label.value for label in USAGE_ORDER],
        "per_class": {
            label.value: {
                "precision": scores.precision,
                "recall": scores.recall,
                "f1": scores.f1,
            }
            for label, scores in report.per_class.items()
        },
        "macro_f1": report.macro_f1,
        "matrix": [list(row) for row in report.matrix.counts],
    }
    if seed is not None:
        data["seed"] = seed
    return json.dumps(data, indent=2)
