"""Stratified splits, k-fold cross-validation, grid search, metrics and the
horizon sweep over the multi-day labeler."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ContractError, NewsvolError
from .ingest import JoinedRecord
from .pipeline import Corpus, PipelineConfig, fit
from .volatility import GarchModel, Sentiment, label_binary


def _by_class(y: Sequence) -> dict[Any, np.ndarray]:
    y = list(y)
    return {c: np.array([i for i, v in enumerate(y) if v == c], dtype=np.int64) for c in sorted(set(y))}


def train_test_split(y: Sequence, fraction: float = 0.8, seed: int = 42) -> tuple[np.ndarray, np.ndarray]:
    """Stratified split; returns sorted (train, test) index arrays.

    The total training size is round(fraction * N). Each class first gets
    floor(fraction * n_c); the leftover slots go to the classes with the
    largest fractional parts (earlier classes first on ties). Every class
    keeps at least one example on each side.
    """
    if not 0 < fraction < 1:
        raise ContractError("fraction must lie strictly between 0 and 1")
    groups = _by_class(y)
    for c, idx in groups.items():
        if len(idx) < 2:
            raise ContractError(f"class {c!r} has fewer than 2 examples")
    n = sum(len(g) for g in groups.values())
    ideal = {c: fraction * len(g) for c, g in groups.items()}
    take = {c: math.floor(v + 1e-9) for c, v in ideal.items()}
    extra = math.floor(fraction * n + 0.5) - sum(take.values())
    for c in sorted(groups, key=lambda c: -(ideal[c] - take[c]))[: max(extra, 0)]:
        take[c] += 1
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c, idx in groups.items():
        t = min(max(take[c], 1), len(idx) - 1)
        perm = rng.permutation(idx)
        train.append(perm[:t])
        test.append(perm[t:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[np.ndarray, ...]
    seed: int

    @property
    def k(self) -> int:
        return len(self.folds)

    def splits(self):
        """Yield (train, test) index arrays, one pair per fold."""
        for i, test in enumerate(self.folds):
            train = np.sort(np.concatenate([f for j, f in enumerate(self.folds) if j != i]))
            yield train, test


def stratified_kfold(y: Sequence, k: int = 10, seed: int = 42) -> FoldPlan:
    """Partition indices into ``k`` folds with per-class counts n_c // k or
    n_c // k + 1.

    Remainders are dealt round-robin, continuing from where the previous
    class stopped, so overall fold sizes also differ by at most one.
    """
    if k < 2:
        raise ContractError("k must be >= 2")
    groups = _by_class(y)
    for c, idx in groups.items():
        if len(idx) < k:
            raise ContractError(f"class {c!r} has {len(idx)} examples, fewer than k={k}")
    rng = np.random.default_rng(seed)
    folds: list[list[np.ndarray]] = [[] for _ in range(k)]
    offset = 0
    for idx in groups.values():
        perm = rng.permutation(idx)
        base, rem = divmod(len(idx), k)
        sizes = [base] * k
        for j in range(rem):
            sizes[(offset + j) % k] += 1
        offset = (offset + rem) % k
        start = 0
        for f, s in enumerate(sizes):
            folds[f].append(perm[start : start + s])
            start += s
    return FoldPlan(tuple(np.sort(np.concatenate(f)) for f in folds), seed)


# --- metrics ---------------------------------------------------------------


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


@dataclass
class EvalReport:
    classes: list
    confusion: np.ndarray  # rows: true class, columns: predicted
    accuracy: float = field(init=False)
    precision: np.ndarray = field(init=False)
    recall: np.ndarray = field(init=False)
    f1: np.ndarray = field(init=False)
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        cm = np.asarray(self.confusion, dtype=np.int64)
        self.confusion = cm
        n = cm.sum()
        self.accuracy = float(np.trace(cm) / n) if n else 0.0
        tp = np.diag(cm).astype(float)
        pred = cm.sum(axis=0).astype(float)
        self.support = cm.sum(axis=1)
        self.precision = np.divide(tp, pred, out=np.zeros_like(tp), where=pred > 0)
        self.recall = np.divide(tp, self.support, out=np.zeros_like(tp), where=self.support > 0)
        self.f1 = np.array([_f1(p, r) for p, r in zip(self.precision, self.recall)])

    @property
    def n_test(self) -> int:
        return int(self.confusion.sum())

    @property
    def macro_f1(self) -> float:
        return float(self.f1.mean())

    @property
    def weighted_f1(self) -> float:
        return float((self.f1 * self.support).sum() / self.support.sum()) if self.n_test else 0.0

    @property
    def normalized(self) -> np.ndarray:
        """Row-normalized confusion; rows without support stay all zero."""
        rows = self.confusion.sum(axis=1, keepdims=True).astype(float)
        return np.divide(self.confusion, rows, out=np.zeros(self.confusion.shape), where=rows > 0)

    @property
    def empty_rows(self) -> list:
        return [c for c, s in zip(self.classes, self.support) if s == 0]

    def as_dict(self) -> dict:
        return {
            "classes": [str(c) for c in self.classes],
            "n_test": self.n_test,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "f1": self.f1.tolist(),
            "support": self.support.tolist(),
            "confusion": self.confusion.tolist(),
            "confusion_normalized": self.normalized.tolist(),
            "empty_rows": [str(c) for c in self.empty_rows],
        }

    def format(self, title: str = "") -> str:
        names = [str(c) for c in self.classes]
        w = max(9, *(len(s) for s in names))
        out = [title] if title else []
        out.append(f"accuracy {100 * self.accuracy:.1f}%  macro-F1 {self.macro_f1:.2f}  "
                   f"weighted-F1 {self.weighted_f1:.2f}  n={self.n_test}")
        out.append(f"{'class':<{w}} {'precision':>9} {'recall':>9} {'F1':>9} {'support':>9}")
        for i, c in enumerate(names):
            out.append(f"{c:<{w}} {self.precision[i]:9.2f} {self.recall[i]:9.2f} {self.f1[i]:9.2f} {self.support[i]:9d}")
        out.append("confusion (rows true, cols predicted) raw | normalized")
        norm = self.normalized
        for i, c in enumerate(names):
            raw = " ".join(f"{v:6d}" for v in self.confusion[i])
            nrm = " ".join(f"{v:6.2f}" for v in norm[i])
            out.append(f"{c:<{w}} {raw} | {nrm}")
        return "\n".join(out)


def confusion_matrix(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> np.ndarray:
    pos = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[pos[t], pos[p]] += 1
    return cm


def evaluate(y_true: Sequence, y_pred: Sequence, classes: Sequence | None = None) -> EvalReport:
    if len(y_true) != len(y_pred):
        raise ContractError("y_true and y_pred lengths differ")
    classes = list(classes) if classes is not None else sorted(set(y_true) | set(y_pred))
    return EvalReport(classes, confusion_matrix(y_true, y_pred, classes))


# --- cross-validation and grid search --------------------------------------


@dataclass
class CVResult:
    config: PipelineConfig
    reports: list[EvalReport]

    @property
    def fold_accuracies(self) -> list[float]:
        return [r.accuracy for r in self.reports]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))


def _tag_fold(exc: NewsvolError, fold: int) -> NewsvolError:
    exc.args = (f"fold {fold}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
    exc.fold = fold
    return exc


def cross_validate(
    corpus: Corpus, labels: Sequence, config: PipelineConfig, k: int = 10, seed: int = 42,
    plan: FoldPlan | None = None,
) -> CVResult:
    plan = plan or stratified_kfold(labels, k, seed)
    classes = sorted(set(labels))
    reports = []
    for f, (train, test) in enumerate(plan.splits()):
        try:
            fitted = fit(corpus, labels, train, config)
        except NewsvolError as exc:
            raise _tag_fold(exc, f)
        pred = fitted.predict(corpus, test)
        reports.append(evaluate([labels[i] for i in test], pred, classes))
    return CVResult(config, reports)


@dataclass
class GridResult:
    best: PipelineConfig
    best_params: dict
    table: list[tuple[dict, float]]

    def format(self) -> str:
        lines = ["params | mean CV accuracy"]
        for params, acc in self.table:
            mark = " *" if params == self.best_params else ""
            lines.append(f"{params} | {100 * acc:.1f}%{mark}")
        return "\n".join(lines)


def grid_points(grid: Mapping[str, Sequence]) -> list[dict]:
    keys = list(grid)
    return [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]


def grid_search(
    corpus: Corpus, labels: Sequence, base: PipelineConfig, grid: Mapping[str, Sequence],
    k: int = 10, seed: int = 42,
) -> GridResult:
    """Pick the grid point with the highest mean CV accuracy.

    All points share one fold plan. Ties go to the point enumerated first
    (``itertools.product`` order over ``grid``'s keys).
    """
    points = grid_points(grid)
    if not points:
        raise ContractError("empty parameter grid")
    plan = stratified_kfold(labels, k, seed)
    table = []
    best_i, best_acc = 0, -1.0
    for i, params in enumerate(points):
        acc = cross_validate(corpus, labels, base.with_params(**params), plan=plan).mean_accuracy
        table.append((params, acc))
        if acc > best_acc:
            best_i, best_acc = i, acc
    return GridResult(base.with_params(**points[best_i]), points[best_i], table)


# --- horizon sweep ---------------------------------------------------------


@dataclass
class SweepResult:
    rows: list[tuple[int, float, int, int]]  # (p, accuracy, n_train, n_test)
    reports: dict[int, EvalReport]

    @property
    def best_p(self) -> int:
        best = max(acc for _, acc, _, _ in self.rows)
        return next(p for p, acc, _, _ in self.rows if acc == best)

    def format(self) -> str:
        lines = ["  p | test accuracy", "----+--------------"]
        lines += [f"{p:3d} | {100 * acc:6.2f}%" for p, acc, _, _ in self.rows]
        lines.append(f"best p = {self.best_p}")
        return "\n".join(lines)


def sweep_p(
    records: Sequence[JoinedRecord],
    models: Mapping[str, GarchModel],
    config: PipelineConfig,
    p_values: Sequence[int] = range(6),
    fraction: float = 0.8,
    seed: int = 42,
    weighting: str = "geometric",
) -> SweepResult:
    """Relabel the same documents for each horizon ``p`` and retrain.

    One stratified split (on the p = 0 labels) is shared by every ``p``, so
    only the labels change between rows.
    """
    corpus = Corpus([r.doc.text for r in records])

    def labels_for(p: int) -> list[str]:
        return [label_binary(r, p, models.get(r.doc.ticker), weighting).value for r in records]

    for r in records:  # fail fast on short windows before any training
        if r.anchor + max(p_values) + 1 >= len(r.closes):
            label_binary(r, max(p_values), models.get(r.doc.ticker), weighting)
    train, test = train_test_split(labels_for(0), fraction, seed)
    rows, reports = [], {}
    for p in p_values:
        y = labels_for(p)
        fitted = fit(corpus, y, train, config)
        truth = [y[i] for i in test]
        rep = evaluate(truth, fitted.predict(corpus, test), [s.value for s in (Sentiment.NEGATIVE, Sentiment.POSITIVE)])
        rows.append((int(p), rep.accuracy, len(train), len(test)))
        reports[int(p)] = rep
    return SweepResult(rows, reports)
