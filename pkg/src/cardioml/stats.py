"""Exploratory and inferential statistics: t-tests, chi-square, ANOVA,
Pearson correlation, and logistic odds ratios.

All tests are pure functions returning a TestResult; nothing here mutates
its inputs, so the battery can run feature pairs in parallel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import chi2_upper_p, f_upper_p, student_t_two_sided_p

__all__ = [
    "TestResult",
    "CorrelationMatrix",
    "OddsRatioEstimate",
    "welch_t_test",
    "chi_square_independence",
    "one_way_anova",
    "pearson_matrix",
    "logistic_odds",
    "univariate_odds_ratio",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float | tuple[float, float]
    p_value: float

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray
    labels: tuple[str, ...]
    undefined: tuple[str, ...] = ()  # constant columns; their rows/cols are NaN


@dataclass(frozen=True)
class OddsRatioEstimate:
    feature: str
    beta: float
    odds_ratio: float
    intercept: float
    converged: bool = True
    separated: bool = False  # perfect separation detected; estimate unreliable

    @property
    def flagged(self) -> bool:
        return self.separated or not self.converged


def welch_t_test(group_a, group_b) -> TestResult:
    """Welch's unequal-variance t-test with Welch-Satterthwaite df, two-sided."""
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise DomainError("welch_t_test needs at least 2 values per group")
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    if va <= 0.0 or vb <= 0.0:
        raise DomainError("welch_t_test needs positive variance in each group")
    sa = va / a.size
    sb = vb / b.size
    t = (float(np.mean(a)) - float(np.mean(b))) / np.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (a.size - 1) + sb**2 / (b.size - 1))
    return TestResult(statistic=t, df=df, p_value=student_t_two_sided_p(t, df))


def chi_square_independence(contingency) -> TestResult:
    """Pearson chi-square test of independence on an r x c count table (no
    continuity correction)."""
    table = np.asarray(contingency, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] < 2 or table.shape[1] < 2:
        raise DomainError("contingency table must be at least 2x2")
    if np.any(table < 0):
        raise DomainError("counts must be non-negative")
    total = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    if np.any(expected <= 0):
        raise DomainError("every expected count must be positive")
    stat = float(np.sum((table - expected) ** 2 / expected))
    df = (table.shape[0] - 1) * (table.shape[1] - 1)
    return TestResult(statistic=stat, df=float(df), p_value=chi2_upper_p(stat, df))


def one_way_anova(groups) -> TestResult:
    """One-way ANOVA F-test across two or more groups."""
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    k = len(arrays)
    if k < 2:
        raise DomainError("one_way_anova needs at least 2 groups")
    if any(a.size < 2 for a in arrays):
        raise DomainError("every group needs at least 2 values")
    n = sum(a.size for a in arrays)
    grand = sum(float(a.sum()) for a in arrays) / n
    ssb = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ssw = sum(float(np.sum((a - a.mean()) ** 2)) for a in arrays)
    if ssw <= 0.0:
        raise DomainError("within-group variance must be positive")
    df1, df2 = k - 1, n - k
    f = (ssb / df1) / (ssw / df2)
    return TestResult(statistic=f, df=(float(df1), float(df2)), p_value=f_upper_p(f, df1, df2))


def pearson_matrix(columns: dict[str, np.ndarray] | np.ndarray, labels=None) -> CorrelationMatrix:
    """Pairwise Pearson coefficients.

    Constant columns are reported as undefined: their rows and columns are
    NaN and their names listed in `undefined`, rather than silently 0.
    """
    if isinstance(columns, dict):
        labels = tuple(columns.keys())
        mat = np.column_stack([np.asarray(v, dtype=np.float64) for v in columns.values()])
    else:
        mat = np.asarray(columns, dtype=np.float64)
        labels = tuple(labels) if labels is not None else tuple(f"c{i}" for i in range(mat.shape[1]))
    if mat.ndim != 2 or mat.shape[0] < 2:
        raise DomainError("pearson_matrix needs at least 2 rows")
    centered = mat - mat.mean(axis=0)
    norms = np.sqrt(np.sum(centered**2, axis=0))
    constant = norms == 0.0
    safe = np.where(constant, 1.0, norms)
    unit = centered / safe
    corr = unit.T @ unit
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    corr[constant, :] = np.nan
    corr[:, constant] = np.nan
    return CorrelationMatrix(
        values=corr,
        labels=labels,
        undefined=tuple(l for l, c in zip(labels, constant) if c),
    )


def _perfectly_separated(x: np.ndarray, y: np.ndarray) -> bool:
    pos = x[y == 1]
    neg = x[y == 0]
    return bool(pos.min() > neg.max() or pos.max() < neg.min())


def logistic_odds(X, y, feature_names=None) -> list[OddsRatioEstimate]:
    """Odds ratios from a logistic fit of the given columns against a binary
    target, using the learners-module gradient-descent optimizer.

    Columns are standardized internally for the solve and the coefficients
    mapped back to the original units, so each odds ratio is per raw unit.
    """
    from .learners.linear import fit_logistic

    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0]:
        raise DomainError("feature/target length mismatch")
    classes = np.unique(y)
    if not np.array_equal(classes, [0.0, 1.0]):
        raise DomainError("target must contain both classes 0 and 1")
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(X.shape[1])]

    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=0)
    if np.any(sd == 0.0):
        bad = feature_names[int(np.argmax(sd == 0.0))]
        raise DomainError(f"constant feature column: {bad}")
    Z = (X - mean) / sd
    fit = fit_logistic(Z, y, l2=0.0, step=1.0, max_iter=20000, tol=1e-12)
    beta = fit.weights / sd
    intercept = fit.intercept - float(np.sum(fit.weights * mean / sd))

    estimates = []
    for j, name in enumerate(feature_names):
        separated = X.shape[1] == 1 and _perfectly_separated(X[:, 0], y.astype(np.int64))
        estimates.append(
            OddsRatioEstimate(
                feature=name,
                beta=float(beta[j]),
                odds_ratio=float(np.exp(beta[j])),
                intercept=float(intercept),
                converged=fit.converged,
                separated=separated,
            )
        )
    return estimates


def univariate_odds_ratio(x, y, feature_name: str = "x0") -> OddsRatioEstimate:
    """Intercept + single-slope logistic regression; returns exp(slope)."""
    return logistic_odds(np.asarray(x, dtype=np.float64)[:, None], y, [feature_name])[0]
