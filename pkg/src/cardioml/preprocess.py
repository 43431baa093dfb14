"""RawDataset -> model-ready FeatureFrame.

Pipeline order: apply_cleaning -> build_table (derives age_years and BMI)
-> stratified_split -> impute (train-fitted) -> encode_and_standardize
(train-fitted). Nothing after apply_cleaning drops or reorders rows, and
every fitted statistic (medians, modes, scaler) depends only on training
rows.

Cleaning removes only rule-based physiologically implausible rows; IQR
outliers are censused and reported but never removed.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, PreprocessError
from .ingest import RawDataset

DAYS_PER_YEAR = 365.25

NUMERIC_COLUMNS = ("age_years", "height", "weight", "ap_hi", "ap_lo", "bmi")
CATEGORICAL_COLUMNS = ("gender", "cholesterol", "gluc", "smoke", "alco", "active")
ONE_HOT = {"cholesterol": (1, 2, 3), "gluc": (1, 2, 3)}


@dataclass(frozen=True)
class CleaningRules:
    ap_hi_range: tuple[float, float] = (40.0, 250.0)
    ap_lo_range: tuple[float, float] = (30.0, 200.0)
    height_range: tuple[float, float] = (100.0, 220.0)
    weight_range: tuple[float, float] = (30.0, 250.0)
    require_ap_hi_gt_ap_lo: bool = True

    def __post_init__(self):
        for name in ("ap_hi_range", "ap_lo_range", "height_range", "weight_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise DomainError(f"{name}: min must be < max, got ({lo}, {hi})")


@dataclass(frozen=True)
class SplitPair:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


@dataclass(frozen=True)
class OutlierCensus:
    flagged: dict[str, np.ndarray]  # column -> row indices outside the IQR fence

    @property
    def counts(self) -> dict[str, int]:
        return {k: int(v.size) for k, v in self.flagged.items()}


@dataclass
class FeatureTable:
    """Column-oriented numeric view of the retained records; NaN marks
    missing values. Raw categorical codes are kept as floats here and
    encoded later."""

    columns: dict[str, np.ndarray]
    target: np.ndarray
    include_bmi: bool = True

    @property
    def n_rows(self) -> int:
        return int(self.target.shape[0])

    def copy(self) -> "FeatureTable":
        return FeatureTable(
            columns={k: v.copy() for k, v in self.columns.items()},
            target=self.target.copy(),
            include_bmi=self.include_bmi,
        )


@dataclass(frozen=True)
class ImputerStats:
    medians: dict[str, float]
    modes: dict[str, int]


@dataclass(frozen=True)
class ScalerStats:
    columns: tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray


@dataclass(frozen=True)
class FeatureFrame:
    matrix: np.ndarray
    column_names: tuple[str, ...]
    target: np.ndarray
    scaler: ScalerStats
    categorical_map: dict[str, tuple[str, ...]]  # group -> its one-hot column names
    raw_categorical: dict[str, np.ndarray]  # group -> original integer codes

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.matrix.shape[1])

    def subset(self, indices) -> "FeatureFrame":
        idx = np.asarray(indices, dtype=np.int64)
        return FeatureFrame(
            matrix=self.matrix[idx],
            column_names=self.column_names,
            target=self.target[idx],
            scaler=self.scaler,
            categorical_map=self.categorical_map,
            raw_categorical={k: v[idx] for k, v in self.raw_categorical.items()},
        )

    def feature_groups(self) -> list[tuple[str, tuple[int, ...]]]:
        """Columns grouped for attribution: each one-hot block is one unit."""
        col_pos = {name: i for i, name in enumerate(self.column_names)}
        grouped: set[str] = set()
        groups: list[tuple[str, tuple[int, ...]]] = []
        for name in self.column_names:
            if name in grouped:
                continue
            owner = next(
                (g for g, cols in self.categorical_map.items() if name in cols), None
            )
            if owner is not None:
                cols = self.categorical_map[owner]
                groups.append((owner, tuple(col_pos[c] for c in cols)))
                grouped.update(cols)
            else:
                groups.append((name, (col_pos[name],)))
        return groups


def age_days_to_years(days):
    """Exact conversion days / 365.25; rejects negative input."""
    arr = np.asarray(days, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError("age in days must be >= 0")
    result = arr / DAYS_PER_YEAR
    return float(result) if np.isscalar(days) else result


def compute_bmi(weight_kg, height_cm):
    """weight / (height/100)^2 in kg/m^2; rejects non-positive inputs."""
    w = np.asarray(weight_kg, dtype=np.float64)
    h = np.asarray(height_cm, dtype=np.float64)
    if np.any(w <= 0) or np.any(h <= 0):
        raise DomainError("weight and height must be positive")
    result = w / (h / 100.0) ** 2
    if np.isscalar(weight_kg) and np.isscalar(height_cm):
        return float(result)
    return result


def _violations(rec, rules: CleaningRules) -> list[str]:
    out = []
    checks = (
        ("ap_hi_range", rec.ap_hi, rules.ap_hi_range),
        ("ap_lo_range", rec.ap_lo, rules.ap_lo_range),
        ("height_range", rec.height_cm, rules.height_range),
        ("weight_range", rec.weight_kg, rules.weight_range),
    )
    for name, value, (lo, hi) in checks:
        if value is not None and not (lo <= value <= hi):
            out.append(name)
    if (
        rules.require_ap_hi_gt_ap_lo
        and rec.ap_hi is not None
        and rec.ap_lo is not None
        and rec.ap_lo >= rec.ap_hi
    ):
        out.append("ap_lo_ge_ap_hi")
    return out


def apply_cleaning(dataset: RawDataset, rules: CleaningRules | None = None):
    """Drop rows violating any enabled rule; returns (retained dataset,
    per-rule drop counts). A row violating several rules counts under each,
    so counts can sum to more than the total dropped. Row order preserved.
    Rules with a missing operand are skipped for that row."""
    rules = rules or CleaningRules()
    counts = {
        "ap_hi_range": 0,
        "ap_lo_range": 0,
        "height_range": 0,
        "weight_range": 0,
        "ap_lo_ge_ap_hi": 0,
        "total_dropped": 0,
    }
    kept = []
    for rec in dataset.records:
        hit = _violations(rec, rules)
        if hit:
            counts["total_dropped"] += 1
            for name in hit:
                counts[name] += 1
        else:
            kept.append(rec)
    retained = RawDataset(
        records=tuple(kept), source_path=dataset.source_path, rejected=dataset.rejected
    )
    return retained, counts


def census_outliers_iqr(values) -> np.ndarray:
    """Indices outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; quartiles by linear
    interpolation. Census only - never mutates. NaNs are ignored."""
    arr = np.asarray(values, dtype=np.float64)
    finite = arr[~np.isnan(arr)]
    if finite.size < 4:
        raise DomainError("IQR census needs at least 4 values")
    q1, q3 = np.percentile(finite, [25.0, 75.0])  # linear interpolation
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    mask = (arr < lo) | (arr > hi)
    return np.nonzero(mask)[0]


def census_table(table: FeatureTable, columns=None) -> OutlierCensus:
    columns = columns or [c for c in NUMERIC_COLUMNS if c in table.columns]
    return OutlierCensus({c: census_outliers_iqr(table.columns[c]) for c in columns})


def build_table(dataset: RawDataset, include_bmi: bool = True) -> FeatureTable:
    """Column table with derived age_years and BMI. Missing fields become
    NaN (BMI is NaN when either operand is missing)."""

    def col(getter):
        return np.array(
            [np.nan if getter(r) is None else float(getter(r)) for r in dataset.records],
            dtype=np.float64,
        )

    age_days = col(lambda r: r.age_days)
    height = col(lambda r: r.height_cm)
    weight = col(lambda r: r.weight_kg)
    columns = {
        "age_years": age_days / DAYS_PER_YEAR,
        "height": height,
        "weight": weight,
        "ap_hi": col(lambda r: r.ap_hi),
        "ap_lo": col(lambda r: r.ap_lo),
    }
    if include_bmi:
        with np.errstate(invalid="ignore", divide="ignore"):
            columns["bmi"] = weight / (height / 100.0) ** 2
    for name in CATEGORICAL_COLUMNS:
        columns[name] = col(lambda r, n=name: getattr(r, n))
    target = np.array([r.cardio for r in dataset.records], dtype=np.int64)
    return FeatureTable(columns=columns, target=target, include_bmi=include_bmi)


def impute(table: FeatureTable, train_indices) -> tuple[FeatureTable, ImputerStats]:
    """Fill NaN holes: numeric columns with the train median, categorical
    columns with the train mode (ties -> smallest value). Statistics come
    from training rows only."""
    idx = np.asarray(train_indices, dtype=np.int64)
    out = table.copy()
    medians: dict[str, float] = {}
    modes: dict[str, int] = {}
    for name, values in out.columns.items():
        train_vals = values[idx]
        train_vals = train_vals[~np.isnan(train_vals)]
        if train_vals.size == 0:
            raise PreprocessError(f"column {name} has no observed training values")
        if name in CATEGORICAL_COLUMNS:
            codes, counts = np.unique(train_vals.astype(np.int64), return_counts=True)
            fill = int(codes[np.argmax(counts)])  # np.unique sorts, so ties pick smallest
            modes[name] = fill
        else:
            fill = float(np.median(train_vals))
            medians[name] = fill
        hole = np.isnan(values)
        if hole.any():
            values[hole] = fill
    return out, ImputerStats(medians=medians, modes=modes)


def encode_and_standardize(table: FeatureTable, train_indices) -> FeatureFrame:
    """One-hot encode cholesterol/gluc, pass binary flags through, and
    z-score the numeric block with train-fitted (mean, sd).

    Column order: numeric block, then gender_male/smoke/alco/active, then
    cholesterol_1..3, gluc_1..3. Refuses already-encoded input.
    """
    if isinstance(table, FeatureFrame):
        raise TypeError("input is already an encoded FeatureFrame; refusing to re-transform")
    if not isinstance(table, FeatureTable):
        raise TypeError(f"expected FeatureTable, got {type(table).__name__}")
    idx = np.asarray(train_indices, dtype=np.int64)
    numeric = [c for c in NUMERIC_COLUMNS if c in table.columns]
    for name in table.columns:
        if np.isnan(table.columns[name]).any():
            raise PreprocessError(f"column {name} still has missing values; impute first")

    cols: list[np.ndarray] = []
    names: list[str] = []
    mean = np.empty(len(numeric))
    sd = np.empty(len(numeric))
    for j, name in enumerate(numeric):
        values = table.columns[name]
        m = float(values[idx].mean())
        s = float(values[idx].std(ddof=0))
        if s == 0.0:
            raise PreprocessError(f"zero training standard deviation in column {name}")
        mean[j], sd[j] = m, s
        cols.append((values - m) / s)
        names.append(name)

    cols.append((table.columns["gender"] == 2).astype(np.float64))
    names.append("gender_male")
    for name in ("smoke", "alco", "active"):
        cols.append(table.columns[name].astype(np.float64))
        names.append(name)

    categorical_map: dict[str, tuple[str, ...]] = {}
    raw_categorical: dict[str, np.ndarray] = {}
    for group, levels in ONE_HOT.items():
        codes = table.columns[group].astype(np.int64)
        raw_categorical[group] = codes
        group_cols = []
        for level in levels:
            cols.append((codes == level).astype(np.float64))
            names.append(f"{group}_{level}")
            group_cols.append(f"{group}_{level}")
        categorical_map[group] = tuple(group_cols)

    return FeatureFrame(
        matrix=np.column_stack(cols),
        column_names=tuple(names),
        target=table.target.copy(),
        scaler=ScalerStats(columns=tuple(numeric), mean=mean, sd=sd),
        categorical_map=categorical_map,
        raw_categorical=raw_categorical,
    )


def _target_of(data) -> np.ndarray:
    if isinstance(data, (FeatureTable, FeatureFrame)):
        return np.asarray(data.target)
    return np.asarray(data)


def stratified_split(data, ratio: float = 0.8, seed: int = 0) -> SplitPair:
    """Seeded per-class shuffle; each class contributes floor(ratio * n_c)
    rows to the training side. Deterministic given the seed."""
    y = _target_of(data)
    if not 0.0 < ratio < 1.0:
        raise DomainError("split ratio must be in (0, 1)")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise PreprocessError("both classes must be present for a stratified split")
    if np.any(counts < 2):
        raise PreprocessError("every class needs at least 2 members")
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for c in classes:
        members = np.nonzero(y == c)[0]
        rng.shuffle(members)
        n_train = int(ratio * members.size + 1e-9)
        train_parts.append(members[:n_train])
        test_parts.append(members[n_train:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return SplitPair(train_indices=train, test_indices=test, seed=seed)
