"""Evaluation: segmentation exact match, tagging P/R/F1, system comparison.

Segmentation scores a word correct only when the predicted cut set equals
the gold cut set exactly, which also lets multi-morph output from the
unsupervised baseline be scored fairly against single-split gold.  Tagging
reports whole-bundle accuracy plus per-class precision/recall/F1 and their
macro average over the classes present in gold (micro also available).

Reported percentages are truncated, not rounded, to two decimals: that is
the convention under which the published result tables are reproducible
from their own counts, and the same convention exposes the one row whose
printed accuracy disagrees with its counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import tagset
from .corpus import Record, cut_set
from .errors import LengthMismatch, MismatchedTestSets
from .tagset import ClassRegistry, FeatureBundle


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class Metrics:
    n_total: int
    n_correct: int
    per_class: dict[str, ClassScore] | None = None
    macro_precision: float | None = None
    macro_recall: float | None = None
    macro_f1: float | None = None
    ambiguity_ceiling: float | None = None

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_total if self.n_total else 0.0


def pct(fraction: float) -> str:
    """Percentage truncated to two decimals (89.0586 % prints as "89.05")."""
    value = math.floor(round(fraction * 10000.0, 6)) / 100.0
    return f"{value:.2f}"


def consistent_with_printed(n_correct: int, n_total: int, printed: str) -> bool:
    """Whether a printed percentage matches its own counts under pct()."""
    return pct(n_correct / n_total) == printed


def seg_accuracy(
    gold: Sequence[Record], predicted: Sequence[Sequence[int]]
) -> Metrics:
    """Exact-match accuracy of predicted boundary labelings against gold."""
    if len(gold) != len(predicted):
        raise LengthMismatch(
            f"{len(gold)} gold records vs {len(predicted)} predictions"
        )
    correct = 0
    for record, labels in zip(gold, predicted):
        if record.boundary is None:
            raise LengthMismatch(f"gold record {record.surface!r} lacks boundary")
        labels = tuple(labels)
        if len(labels) != len(record.boundary):
            raise LengthMismatch(
                f"{record.surface!r}: {len(labels)} labels vs "
                f"{len(record.boundary)} gold"
            )
        if labels == record.boundary:
            correct += 1
    return Metrics(n_total=len(gold), n_correct=correct)


def seg_accuracy_cuts(
    gold_cuts: Sequence[frozenset[int]], predicted_cuts: Sequence[frozenset[int]]
) -> Metrics:
    """Exact cut-set match; use for systems that emit morphs, not labels."""
    if len(gold_cuts) != len(predicted_cuts):
        raise LengthMismatch(
            f"{len(gold_cuts)} gold cut sets vs {len(predicted_cuts)} predicted"
        )
    correct = sum(1 for g, p in zip(gold_cuts, predicted_cuts) if g == p)
    return Metrics(n_total=len(gold_cuts), n_correct=correct)


def gold_cut_sets(records: Iterable[Record]) -> list[frozenset[int]]:
    out = []
    for record in records:
        if record.boundary is None:
            raise LengthMismatch(f"record {record.surface!r} lacks boundary")
        out.append(cut_set(record.boundary))
    return out


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def tag_metrics(
    gold: Sequence[FeatureBundle],
    predicted: Sequence[FeatureBundle],
    registry: ClassRegistry,
    average: str = "macro",
) -> Metrics:
    """Whole-bundle accuracy plus per-class and averaged P/R/F1.

    Classes are canonical bundle strings; averaging runs over the classes
    present in gold.  0/0 rates are defined as 0.
    """
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold bundles vs {len(predicted)} predicted")
    if average not in ("macro", "micro"):
        raise ValueError(f"average must be macro or micro, got {average!r}")
    gold_keys = []
    pred_keys = []
    for bundle in gold:
        registry.class_of(bundle)  # raises UnknownBundle when unregistered
        gold_keys.append(tagset.canonicalize(bundle))
    for bundle in predicted:
        registry.class_of(bundle)
        pred_keys.append(tagset.canonicalize(bundle))

    correct = sum(1 for g, p in zip(gold_keys, pred_keys) if g == p)
    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    fn: dict[str, int] = {}
    support: dict[str, int] = {}
    for g, p in zip(gold_keys, pred_keys):
        support[g] = support.get(g, 0) + 1
        if g == p:
            tp[g] = tp.get(g, 0) + 1
        else:
            fn[g] = fn.get(g, 0) + 1
            fp[p] = fp.get(p, 0) + 1

    gold_classes = sorted(support)
    per_class = {}
    for key in gold_classes:
        precision, recall, f1 = _prf(tp.get(key, 0), fp.get(key, 0), fn.get(key, 0))
        per_class[key] = ClassScore(precision, recall, f1, support[key])

    if average == "macro":
        k = len(gold_classes)
        macro_p = sum(per_class[c].precision for c in gold_classes) / k
        macro_r = sum(per_class[c].recall for c in gold_classes) / k
        macro_f = sum(per_class[c].f1 for c in gold_classes) / k
    else:
        total_tp = sum(tp.get(c, 0) for c in gold_classes)
        total_fp = sum(fp.get(c, 0) for c in gold_classes)
        total_fn = sum(fn.get(c, 0) for c in gold_classes)
        macro_p, macro_r, macro_f = _prf(total_tp, total_fp, total_fn)

    return Metrics(
        n_total=len(gold),
        n_correct=correct,
        per_class=per_class,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
    )


@dataclass
class CompareReport:
    """Side-by-side segmentation accuracy of the neural and baseline systems."""

    rows: list[tuple[str, Metrics, Metrics]] = field(default_factory=list)

    def render(self) -> str:
        lines = [
            f"{'POS':<12}{'neural %':>12}{'baseline %':>12}{'diff':>8}",
        ]
        for pos, neural, base in self.rows:
            diff = neural.accuracy - base.accuracy
            sign = "+" if diff > 0 else ("-" if diff < 0 else "=")
            lines.append(
                f"{pos:<12}{pct(neural.accuracy):>12}{pct(base.accuracy):>12}{sign:>8}"
            )
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        """Machine-readable "pos<TAB>system<TAB>metric<TAB>value" lines."""
        lines = []
        for pos, neural, base in self.rows:
            for system, metrics in (("neural", neural), ("baseline", base)):
                lines.append(f"{pos}\t{system}\tn_total\t{metrics.n_total}")
                lines.append(f"{pos}\t{system}\tn_correct\t{metrics.n_correct}")
                lines.append(f"{pos}\t{system}\taccuracy\t{metrics.accuracy:.6f}")
        return "\n".join(lines) + "\n"


def compare_report(
    neural: Mapping[str, Metrics], baseline: Mapping[str, Metrics]
) -> CompareReport:
    """Pair up per-POS metrics from both systems over the same test words."""
    if set(neural) != set(baseline):
        raise MismatchedTestSets(
            f"POS sets differ: {sorted(neural)} vs {sorted(baseline)}"
        )
    report = CompareReport()
    for pos in sorted(neural):
        if neural[pos].n_total != baseline[pos].n_total:
            raise MismatchedTestSets(
                f"{pos}: {neural[pos].n_total} neural-scored words vs "
                f"{baseline[pos].n_total} baseline-scored"
            )
        report.rows.append((pos, neural[pos], baseline[pos]))
    return report


def render_tag_report(pos: str, metrics: Metrics) -> str:
    """Plain-text tagging report in the accuracy/P/R/F1 table shape."""
    lines = [
        f"POS {pos}: accuracy {pct(metrics.accuracy)}% "
        f"({metrics.n_correct}/{metrics.n_total})",
        f"macro precision {metrics.macro_precision:.4f} "
        f"recall {metrics.macro_recall:.4f} f1 {metrics.macro_f1:.4f}",
    ]
    if metrics.ambiguity_ceiling is not None:
        lines.append(f"ambiguity ceiling {pct(metrics.ambiguity_ceiling)}%")
    return "\n".join(lines) + "\n"
