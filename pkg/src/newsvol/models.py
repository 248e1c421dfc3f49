"""Naive Bayes and a hinge-loss linear SVM on sparse document-term matrices.

The SVM solves

    min_w  1/2 ||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)

by dual coordinate descent. A constant 1 feature is appended to every row,
so the bias is learned (and regularized) as an ordinary weight. More than
two classes are handled one-vs-rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp
from numba import njit

from .errors import ChecksumMismatch, ContractError, SchemaError

MAX_EPOCHS = 1000
GAP_TOL = 1e-6


def _as_csr(X) -> sp.csr_matrix:
    X = sp.csr_matrix(X, dtype=float)
    X.sum_duplicates()
    X.sort_indices()
    return X


def _classes(y: Sequence) -> list:
    classes = sorted(set(y))
    if len(classes) < 2:
        raise ContractError(f"need at least two classes, got {classes}")
    return classes


# --- Naive Bayes -----------------------------------------------------------


@dataclass
class NBModel:
    variant: str
    alpha: float
    classes: list
    class_log_prior: np.ndarray
    feature_log_prob: np.ndarray  # (n_classes, V): log P(term | class)
    vocab_checksum: str | None = None

    @property
    def n_features(self) -> int:
        return self.feature_log_prob.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = _as_csr(X)
        if self.variant == "multinomial":
            return X @ self.feature_log_prob.T + self.class_log_prior
        # Bernoulli: absent terms contribute log(1 - p)
        log_p = self.feature_log_prob
        log_q = np.log1p(-np.exp(log_p))
        B = X.copy()
        B.data = (B.data > 0).astype(float)
        B.eliminate_zeros()
        return B @ (log_p - log_q).T + log_q.sum(axis=1) + self.class_log_prior


def train_nb(X, y: Sequence, variant: str = "multinomial", alpha: float = 1.0) -> NBModel:
    """Closed-form Naive Bayes with additive smoothing.

    Multinomial NB takes fractional weights (tf-idf, BM25) as counts;
    negative weights (possible under BM25) are clipped to zero. Bernoulli NB
    looks only at whether a weight is positive.
    """
    if variant not in ("multinomial", "bernoulli"):
        raise ContractError(f"unknown NB variant {variant!r}")
    if alpha < 0:
        raise ContractError("alpha must be >= 0")
    X = _as_csr(X)
    y = list(y)
    if X.shape[0] != len(y):
        raise ContractError("X and y lengths differ")
    classes = _classes(y)
    y_idx = np.array([classes.index(v) for v in y])
    onehot = sp.csr_matrix((np.ones(len(y)), (y_idx, np.arange(len(y)))), shape=(len(classes), len(y)))
    n_c = np.asarray(onehot.sum(axis=1)).ravel()
    prior = np.log(n_c) - np.log(n_c.sum())
    if variant == "multinomial":
        Xc = X.copy()
        Xc.data = np.maximum(Xc.data, 0.0)
        counts = np.asarray((onehot @ Xc).todense())
        smoothed = counts + alpha
        logp = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    else:
        Xb = X.copy()
        Xb.data = (Xb.data > 0).astype(float)
        counts = np.asarray((onehot @ Xb).todense())
        logp = np.log(counts + alpha) - np.log(n_c + 2 * alpha)[:, None]
    return NBModel(variant, float(alpha), classes, prior, logp)


# --- linear SVM ------------------------------------------------------------


@njit(cache=True)
def _dcd_epoch(indptr, indices, data, y, alpha, w, qd, order, C):
    bias = w.shape[0] - 1
    for i in order:
        s = w[bias]
        for k in range(indptr[i], indptr[i + 1]):
            s += w[indices[k]] * data[k]
        g = y[i] * s - 1.0
        a = alpha[i]
        if a == 0.0:
            pg = min(g, 0.0)
        elif a == C:
            pg = max(g, 0.0)
        else:
            pg = g
        if pg != 0.0:
            na = min(max(a - g / qd[i], 0.0), C)
            d = (na - a) * y[i]
            alpha[i] = na
            for k in range(indptr[i], indptr[i + 1]):
                w[indices[k]] += d * data[k]
            w[bias] += d


@dataclass
class SVMTrace:
    epochs: int
    converged: bool
    gap: float
    primal: float
    dual_objective: list[float] = field(default_factory=list)


@dataclass
class SVMModel:
    classes: list
    coef: np.ndarray  # (n_machines, V); one row for binary problems
    intercept: np.ndarray  # (n_machines,)
    C: float = 1.0
    vocab_checksum: str | None = None
    traces: list[SVMTrace] = field(default_factory=list, repr=False)

    @property
    def n_features(self) -> int:
        return self.coef.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return self.coef[0]

    @property
    def bias(self) -> float:
        return float(self.intercept[0])

    def decision_scores(self, X) -> np.ndarray:
        X = _as_csr(X)
        return np.asarray(X @ self.coef.T) + self.intercept


def _hinge_terms(X: sp.csr_matrix, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    margins = y * (X @ w[:-1] + w[-1])
    return np.maximum(0.0, 1.0 - margins)


def _train_binary(
    X: sp.csr_matrix, y: np.ndarray, C: float, max_epochs: int, tol: float, seed: int
) -> tuple[np.ndarray, SVMTrace]:
    n, V = X.shape
    w = np.zeros(V + 1)
    alpha = np.zeros(n)
    qd = np.asarray(X.multiply(X).sum(axis=1)).ravel() + 1.0
    rng = np.random.default_rng(seed)
    indptr = X.indptr.astype(np.int64)
    indices = X.indices.astype(np.int64)
    data = X.data.astype(float)
    history: list[float] = []
    gap = primal = np.inf
    converged = False
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(n)
        _dcd_epoch(indptr, indices, data, y, alpha, w, qd, order, C)
        wsq = float(w @ w)
        dual = 0.5 * wsq - float(alpha.sum())
        history.append(dual)
        primal = 0.5 * wsq + C * float(_hinge_terms(X, y, w).sum())
        gap = primal + dual
        if gap <= tol * (1.0 + abs(primal)):
            converged = True
            break
    return w, SVMTrace(epoch, converged, float(gap), float(primal), history)


def train_svm(
    X,
    y: Sequence,
    C: float = 1.0,
    max_epochs: int = MAX_EPOCHS,
    tol: float = GAP_TOL,
    seed: int = 0,
) -> SVMModel:
    """L2-regularized hinge-loss linear SVM.

    Stops when the duality gap falls below ``tol * (1 + |primal|)`` or after
    ``max_epochs`` passes; each pass visits examples in a seeded random
    order. ``traces`` records the dual objective (minimization form) after
    every pass, plus the final gap.
    """
    if C <= 0:
        raise ContractError("C must be > 0")
    X = _as_csr(X)
    if not np.all(np.isfinite(X.data)):
        raise ContractError("features must be finite")
    y = list(y)
    if X.shape[0] != len(y):
        raise ContractError("X and y lengths differ")
    classes = _classes(y)
    if len(classes) == 2:
        targets = [np.where(np.array([v == classes[1] for v in y]), 1.0, -1.0)]
    else:
        targets = [np.where(np.array([v == c for v in y]), 1.0, -1.0) for c in classes]
    coefs, intercepts, traces = [], [], []
    for k, t in enumerate(targets):
        w, trace = _train_binary(X, t, float(C), max_epochs, tol, seed + k)
        coefs.append(w[:-1])
        intercepts.append(w[-1])
        traces.append(trace)
    return SVMModel(classes, np.vstack(coefs), np.array(intercepts), float(C), traces=traces)


# --- prediction ------------------------------------------------------------


def decision_score(model: SVMModel | NBModel, X) -> np.ndarray:
    """SVM: w.x + b per machine; NB: joint log-likelihood per class."""
    if isinstance(model, SVMModel):
        s = model.decision_scores(X)
        return s[:, 0] if s.shape[1] == 1 else s
    return model.joint_log_likelihood(X)


def predict(model: SVMModel | NBModel, X) -> list:
    """Class labels for the rows of ``X``.

    NB picks the highest posterior and, on ties, the class listed first.
    A binary SVM predicts ``classes[1]`` only for strictly positive scores.
    """
    X = _as_csr(X)
    if X.shape[1] != model.n_features:
        raise ContractError(f"expected {model.n_features} features, got {X.shape[1]}")
    if isinstance(model, SVMModel):
        s = model.decision_scores(X)
        if s.shape[1] == 1:
            return [model.classes[1] if v > 0 else model.classes[0] for v in s[:, 0]]
        return [model.classes[int(k)] for k in np.argmax(s, axis=1)]
    jll = model.joint_log_likelihood(X)
    return [model.classes[int(k)] for k in np.argmax(jll, axis=1)]


def check_vocabulary(model: SVMModel | NBModel, checksum: str | None) -> None:
    if model.vocab_checksum and checksum and model.vocab_checksum != checksum:
        raise ChecksumMismatch(
            f"model vocabulary {model.vocab_checksum} does not match features {checksum}"
        )


# --- serialization ---------------------------------------------------------


def model_to_dict(model: SVMModel | NBModel) -> dict[str, Any]:
    if isinstance(model, SVMModel):
        return {
            "kind": "svm",
            "C": model.C,
            "classes": model.classes,
            "vocab_checksum": model.vocab_checksum,
            "coef": model.coef.tolist(),
            "intercept": model.intercept.tolist(),
            "converged": [t.converged for t in model.traces],
            "epochs": [t.epochs for t in model.traces],
        }
    return {
        "kind": "nb",
        "variant": model.variant,
        "alpha": model.alpha,
        "classes": model.classes,
        "vocab_checksum": model.vocab_checksum,
        "class_log_prior": model.class_log_prior.tolist(),
        "feature_log_prob": model.feature_log_prob.tolist(),
    }


def model_from_dict(obj: dict[str, Any]) -> SVMModel | NBModel:
    kind = obj.get("kind")
    if kind == "svm":
        coef = np.array(obj["coef"], dtype=float).reshape(len(obj["intercept"]), -1)
        return SVMModel(obj["classes"], coef, np.array(obj["intercept"], dtype=float), obj["C"], obj.get("vocab_checksum"))
    if kind == "nb":
        flp = np.array(obj["feature_log_prob"], dtype=float).reshape(len(obj["classes"]), -1)
        return NBModel(
            obj["variant"], obj["alpha"], obj["classes"],
            np.array(obj["class_log_prior"], dtype=float), flp, obj.get("vocab_checksum"),
        )
    raise SchemaError(f"unknown model kind {kind!r}")


def dumps_model(model: SVMModel | NBModel) -> str:
    return json.dumps(model_to_dict(model))


def loads_model(text: str) -> SVMModel | NBModel:
    return model_from_dict(json.loads(text))
