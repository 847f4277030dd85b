"""Confusion-matrix evaluation: per-class precision/recall/F1, top-k accuracy."""

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ClassMetrics:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassReport:
    classes: list
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    topk_accuracies: dict = field(default_factory=dict)  # k -> fraction


def confusion(preds, labels, class_count):
    """Prediction/label lists -> (K, K) count matrix, rows = true class."""
    preds = np.asarray(preds, dtype=np.int64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if preds.shape != labels.shape:
        raise ValueError("prediction/label length mismatch")
    if preds.size and (min(preds.min(), labels.min()) < 0
                       or max(preds.max(), labels.max()) >= class_count):
        raise ValueError("class index out of range")
    cm = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(cm, (labels, preds), 1)
    return cm


def _safe_div(num, den):
    return num / den if den else 0.0


def precision_recall_f1(cm, class_names=None):
    """Confusion matrix -> ClassReport (0/0 metrics defined as 0)."""
    cm = np.asarray(cm, dtype=np.int64)
    k = cm.shape[0]
    names = class_names if class_names is not None else [str(i) for i in range(k)]
    classes = []
    for i in range(k):
        tp = int(cm[i, i])
        fp = int(cm[:, i].sum()) - tp
        fn = int(cm[i, :].sum()) - tp
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        classes.append(ClassMetrics(name=names[i], precision=precision,
                                    recall=recall, f1=f1, support=tp + fn))
    total = int(cm.sum())
    return ClassReport(
        classes=classes,
        accuracy=_safe_div(int(np.trace(cm)), total),
        macro_precision=float(np.mean([c.precision for c in classes])) if classes else 0.0,
        macro_recall=float(np.mean([c.recall for c in classes])) if classes else 0.0,
        macro_f1=float(np.mean([c.f1 for c in classes])) if classes else 0.0,
    )


def topk_accuracy(rankings, labels, k):
    """Fraction of records whose label is among the first k ranked classes."""
    labels = list(labels)
    if len(rankings) != len(labels):
        raise ValueError("ranking/label length mismatch")
    if not rankings:
        return 0.0
    hits = 0
    for ranking, label in zip(rankings, labels):
        if len(ranking) < k:
            raise ValueError(f"ranking shorter than k={k}")
        top = [c[0] if isinstance(c, (tuple, list)) else c for c in ranking[:k]]
        hits += label in top
    return hits / len(labels)


def report_to_json(report):
    """ClassReport -> the machine-readable report dict (full precision)."""
    return {
        "classes": [
            {"name": c.name, "precision": c.precision, "recall": c.recall,
             "f1": c.f1, "support": c.support}
            for c in report.classes
        ],
        "accuracy": report.accuracy,
        "top3_accuracy": report.topk_accuracies.get(3),
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
    }


def format_report(report):
    """ClassReport -> aligned text table with 2-decimal values."""
    width = max([len("Class Name")] + [len(c.name) for c in report.classes])
    lines = [f"{'Class Name':<{width}}  Precision  Recall  F1-Score  Support"]
    for c in report.classes:
        lines.append(f"{c.name:<{width}}  {c.precision:>9.2f}  {c.recall:>6.2f}"
                     f"  {c.f1:>8.2f}  {c.support:>7d}")
    lines.append(f"{'macro avg':<{width}}  {report.macro_precision:>9.2f}"
                 f"  {report.macro_recall:>6.2f}  {report.macro_f1:>8.2f}"
                 f"  {sum(c.support for c in report.classes):>7d}")
    lines.append(f"accuracy: {report.accuracy:.2f}")
    for k in sorted(report.topk_accuracies):
        lines.append(f"top-{k} accuracy: {report.topk_accuracies[k]:.2f}")
    return "\n".join(lines)


def report_json_text(report):
    return json.dumps(report_to_json(report), indent=2, sort_keys=True)
