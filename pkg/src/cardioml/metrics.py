"""Discrimination and calibration metrics for binary probabilistic classifiers.

Threshold convention: a probability equal to the threshold is classified
positive. Calibration bins are equal-width over [0, 1], right-closed except
the first bin, which is [0, 1/n_bins].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ConfusionMatrix",
    "ThresholdMetrics",
    "ReliabilityPoint",
    "EvalReport",
    "decision_threshold",
    "confusion",
    "threshold_metrics",
    "roc_auc",
    "brier",
    "ece",
    "reliability_curve",
    "roc_points",
    "evaluate_probabilities",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ThresholdMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    # degenerate denominators yield 0.0 with the matching flag set
    precision_defined: bool = True
    recall_defined: bool = True


@dataclass(frozen=True)
class ReliabilityPoint:
    bin_low: float
    bin_high: float
    mean_confidence: float
    empirical_frequency: float
    count: int


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    brier: float
    ece: float
    reliability_points: tuple[ReliabilityPoint, ...]

    def __post_init__(self):
        for name in ("accuracy", "precision", "recall", "f1", "auc", "brier", "ece"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1 + 1e-12):
                raise ValueError(f"{name}={v} outside [0, 1]")
        if sum(p.count for p in self.reliability_points) != self.confusion.total:
            raise ValueError("reliability bin counts do not sum to sample count")


def _check_probs(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if probs.size and (np.min(probs) < 0.0 or np.max(probs) > 1.0):
        raise DomainError("probabilities must lie in [0, 1]")
    return probs


def decision_threshold(probs, threshold: float = 0.5) -> np.ndarray:
    """Binary labels from probabilities: label 1 iff prob >= threshold."""
    probs = _check_probs(probs)
    return (probs >= threshold).astype(np.int64)


def confusion(probs, labels, threshold: float = 0.5) -> ConfusionMatrix:
    probs = _check_probs(probs)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.shape[0] != labels.shape[0]:
        raise DomainError(
            f"length mismatch: {probs.shape[0]} probabilities vs {labels.shape[0]} labels"
        )
    if probs.shape[0] == 0:
        raise DomainError("need at least one sample")
    pred = probs >= threshold
    pos = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def threshold_metrics(cm: ConfusionMatrix) -> ThresholdMetrics:
    total = cm.total
    if total <= 0:
        raise DomainError("empty confusion matrix")
    acc = (cm.tp + cm.tn) / total
    p_den = cm.tp + cm.fp
    r_den = cm.tp + cm.fn
    precision = cm.tp / p_den if p_den else 0.0
    recall = cm.tp / r_den if r_den else 0.0
    f_den = precision + recall
    f1 = 2.0 * precision * recall / f_den if f_den else 0.0
    return ThresholdMetrics(
        accuracy=acc,
        precision=precision,
        recall=recall,
        f1=f1,
        precision_defined=p_den > 0,
        recall_defined=r_den > 0,
    )


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the group average."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.shape[0], dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    n = scores.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(probs, labels) -> float:
    """AUC via the rank statistic; ties get average ranks.

    Equals the trapezoidal area under the ROC curve.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.shape[0] != labels.shape[0]:
        raise DomainError("length mismatch between scores and labels")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise DomainError("roc_auc requires both classes present")
    ranks = _average_ranks(probs)
    rank_sum = float(np.sum(ranks[labels == 1]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def brier(probs, labels) -> float:
    """Mean squared difference between probability and binary outcome."""
    probs = _check_probs(probs)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.shape[0] != labels.shape[0]:
        raise DomainError("length mismatch between probabilities and labels")
    return float(np.mean((probs - labels) ** 2))


def _bin_indices(probs: np.ndarray, n_bins: int) -> np.ndarray:
    # right-closed bins except the first: idx = ceil(p * n_bins) - 1, clipped
    idx = np.ceil(probs * n_bins).astype(np.int64) - 1
    return np.clip(idx, 0, n_bins - 1)


def reliability_curve(probs, labels, n_bins: int = 10) -> tuple[ReliabilityPoint, ...]:
    """Per-bin (mean confidence, empirical frequency, count); empty bins omitted."""
    probs = _check_probs(probs)
    labels = np.asarray(labels, dtype=np.float64)
    if n_bins < 1:
        raise DomainError("n_bins must be >= 1")
    if probs.shape[0] != labels.shape[0]:
        raise DomainError("length mismatch between probabilities and labels")
    idx = _bin_indices(probs, n_bins)
    points = []
    for b in range(n_bins):
        mask = idx == b
        count = int(np.sum(mask))
        if count == 0:
            continue
        points.append(
            ReliabilityPoint(
                bin_low=b / n_bins,
                bin_high=(b + 1) / n_bins,
                mean_confidence=float(np.mean(probs[mask])),
                empirical_frequency=float(np.mean(labels[mask])),
                count=count,
            )
        )
    return tuple(points)


def ece(probs, labels, n_bins: int = 10) -> float:
    """Expected calibration error: bin-weighted mean |confidence - frequency|."""
    points = reliability_curve(probs, labels, n_bins=n_bins)
    n = sum(p.count for p in points)
    if n == 0:
        raise DomainError("ece needs at least one sample")
    return float(
        sum((p.count / n) * abs(p.mean_confidence - p.empirical_frequency) for p in points)
    )


def roc_points(probs, labels) -> np.ndarray:
    """ROC curve vertices as an (m, 3) array of (threshold, fpr, tpr).

    Thresholds are the distinct scores in descending order, preceded by an
    anchor above the maximum so the curve starts at (0, 0).
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise DomainError("roc_points requires both classes present")
    order = np.argsort(-probs, kind="mergesort")
    sorted_probs = probs[order]
    sorted_labels = labels[order]
    tp = np.cumsum(sorted_labels == 1)
    fp = np.cumsum(sorted_labels == 0)
    # keep only the last index of each tied score block
    distinct = np.nonzero(np.diff(sorted_probs, append=-np.inf))[0]
    rows = [(np.inf, 0.0, 0.0)]
    for i in distinct:
        rows.append((sorted_probs[i], fp[i] / n_neg, tp[i] / n_pos))
    return np.asarray(rows, dtype=np.float64)


def evaluate_probabilities(probs, labels, threshold: float = 0.5, n_bins: int = 10) -> EvalReport:
    """Assemble the full evaluation report for one model's predictions."""
    cm = confusion(probs, labels, threshold)
    tm = threshold_metrics(cm)
    return EvalReport(
        confusion=cm,
        accuracy=tm.accuracy,
        precision=tm.precision,
        recall=tm.recall,
        f1=tm.f1,
        auc=roc_auc(probs, labels),
        brier=brier(probs, labels),
        ece=ece(probs, labels, n_bins=n_bins),
        reliability_points=reliability_curve(probs, labels, n_bins=n_bins),
    )
