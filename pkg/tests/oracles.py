"""Independent reference implementations used to check the package.

Each oracle takes the slow, obvious route: decimal logarithms, explicit
row-by-row recursions, dense count matrices and loop-based metrics. None of
them imports the code under test.
"""

from __future__ import annotations

import math
from decimal import Decimal, getcontext

import numpy as np


def hp_log_ratio(a, b, digits: int = 50) -> float:
    """ln(a / b) evaluated in 50-digit decimal arithmetic."""
    getcontext().prec = digits
    return float((Decimal(str(a)) / Decimal(str(b))).ln())


def spreadsheet_garch(omega, alpha, beta, eps, h0):
    """GARCH(1,1) filled in like spreadsheet rows: one cell per day.

    Row 0 holds eps_0^2 = h0 and h_0 = h0; row t computes
    h_t = omega + alpha * eps_{t-1}^2 + beta * h_{t-1}.
    """
    rows = [{"eps2": h0, "h": h0}]
    for e in eps:
        prev = rows[-1]
        h = omega + alpha * prev["eps2"] + beta * prev["h"]
        rows.append({"eps2": e * e, "h": h})
    return [r["h"] for r in rows[1:]]


def simulate_garch11(n, omega, alpha, beta, seed, burn=1000):
    """Draw n shocks from a Gaussian GARCH(1,1) with its own recursion."""
    rng = np.random.default_rng(seed)
    h = omega / (1 - alpha - beta)
    e = 0.0
    out = []
    for t in range(n + burn):
        h = omega + alpha * e * e + beta * h
        e = math.sqrt(h) * rng.standard_normal()
        if t >= burn:
            out.append(e)
    return np.array(out)


def dense_weights(docs, scheme, k1=1.2, b=0.95, standard_bm25=False, log=np.log):
    """Term weights from a dense document-term count matrix.

    Returns (terms, W) where terms is sorted and W[d, j] is the weight of
    terms[j] in document d (zero where absent).
    """
    terms = sorted({t for d in docs for t in d})
    col = {t: j for j, t in enumerate(terms)}
    tf = np.zeros((len(docs), len(terms)))
    for i, d in enumerate(docs):
        for t in d:
            tf[i, col[t]] += 1
    n = tf.shape[0]
    df = (tf > 0).sum(axis=0).astype(float)
    dl = tf.sum(axis=1, keepdims=True)
    avgdl = dl.mean()
    present = tf > 0
    if scheme == "presence":
        w = present.astype(float)
    elif scheme == "tf":
        w = tf.copy()
    elif scheme == "tfidf":
        w = tf * log(n / df)
    elif scheme == "bm25":
        idf = log((n - df + 0.5) / (df + 0.5))
        denom = k1 * ((1 - b) + b * dl / avgdl)
        if standard_bm25:
            denom = denom + tf
        w = (k1 + 1) * tf / denom * idf
    else:
        raise ValueError(scheme)
    return terms, np.where(present, w, 0.0)


def brute_metrics(cm):
    """Per-class precision, recall, F1 and macro-F1 by explicit loops."""
    k = len(cm)
    prec, rec, f1 = [], [], []
    for c in range(k):
        tp = cm[c][c]
        predicted = sum(cm[r][c] for r in range(k))
        actual = sum(cm[c][r] for r in range(k))
        p = tp / predicted if predicted else 0.0
        r = tp / actual if actual else 0.0
        prec.append(p)
        rec.append(r)
        f1.append(2 * p * r / (p + r) if p + r else 0.0)
    total = sum(sum(row) for row in cm)
    acc = sum(cm[c][c] for c in range(k)) / total if total else 0.0
    return prec, rec, f1, sum(f1) / k, acc


def hinge_objective(X, y, w, bias, C):
    """Primal SVM objective with the bias regularized like any weight."""
    margins = y * (X @ w + bias)
    return 0.5 * (float(w @ w) + bias * bias) + C * float(np.maximum(0, 1 - margins).sum())
