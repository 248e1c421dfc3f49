"""Vocabulary building and the four term-weighting schemes.

Weights for a term with in-document frequency ``tf``::

    presence   1
    tf         tf
    tfidf      tf * log(N / df)
    bm25       (k1 + 1) * tf / (k1 * ((1 - b) + b * dl / avgdl))
               * log((N - df + 0.5) / (df + 0.5))

The BM25 denominator above has no ``+ tf`` term. ``standard_bm25=True``
switches to the usual ``tf + k1 * (...)`` form. Zero weights are never
stored, so a term that occurs in every document vanishes under tf-idf.
"""

from __future__ import annotations

import enum
import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ContractError, SchemaError

DEFAULT_K1 = 1.2
DEFAULT_B = 0.95


class Scheme(str, enum.Enum):
    PRESENCE = "presence"
    TF = "tf"
    TFIDF = "tfidf"
    BM25 = "bm25"


@dataclass(frozen=True)
class Weighting:
    scheme: Scheme = Scheme.TFIDF
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    log_base: float = math.e
    standard_bm25: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    def log(self, x: float) -> float:
        return math.log(x) if self.log_base == math.e else math.log(x, self.log_base)

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "k1": self.k1,
            "b": self.b,
            "log_base": "e" if self.log_base == math.e else self.log_base,
            "standard_bm25": self.standard_bm25,
        }


@dataclass
class Vocabulary:
    """Term index plus the corpus statistics the weights need.

    ``avgdl`` is the mean number of in-vocabulary tokens per training
    document; ``dl`` at vectorizing time is counted the same way.
    """

    terms: list[str]
    df: np.ndarray
    n_docs: int
    avgdl: float
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}
        if len(self.index) != len(self.terms):
            raise ContractError("duplicate terms in vocabulary")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    @property
    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n_docs}\x1f{self.avgdl!r}\n".encode())
        for t, d in zip(self.terms, self.df):
            h.update(f"{t}\x1f{int(d)}\n".encode())
        return h.hexdigest()[:16]

    def dumps(self) -> str:
        lines = [f"# n_docs={self.n_docs} avgdl={self.avgdl!r} checksum={self.checksum}"]
        lines += [f"{i}\t{t}\t{int(d)}" for i, (t, d) in enumerate(zip(self.terms, self.df))]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Vocabulary":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise SchemaError("vocabulary file lacks its header line")
        meta = dict(kv.split("=", 1) for kv in lines[0][1:].split())
        terms, df = [], []
        for line in lines[1:]:
            _, term, d = line.split("\t")
            terms.append(term)
            df.append(int(d))
        vocab = cls(terms, np.array(df, dtype=np.int64), int(meta["n_docs"]), float(meta["avgdl"]))
        if vocab.checksum != meta.get("checksum", vocab.checksum):
            raise SchemaError("vocabulary checksum does not match its contents")
        return vocab


@dataclass(frozen=True)
class FeatureVector:
    indices: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.weights.tolist()))


def build_vocabulary(docs: Sequence[Sequence[str]], min_df: int = 1) -> Vocabulary:
    """Index every term with document frequency >= ``min_df``, in first-seen order."""
    if len(docs) == 0:
        raise ContractError("cannot build a vocabulary from zero documents")
    df: Counter = Counter()
    order: dict[str, None] = {}
    for doc in docs:
        for t in doc:
            order.setdefault(t, None)
        df.update(set(doc))
    terms = [t for t in order if df[t] >= min_df]
    keep = set(terms)
    total = sum(sum(1 for t in doc if t in keep) for doc in docs)
    avgdl = total / len(docs)
    return Vocabulary(terms, np.array([df[t] for t in terms], dtype=np.int64), len(docs), avgdl)


def _idf(vocab: Vocabulary, j: int, w: Weighting) -> float:
    n, d = vocab.n_docs, int(vocab.df[j])
    if w.scheme is Scheme.TFIDF:
        return w.log(n / d)
    return w.log((n - d + 0.5) / (d + 0.5))


def vectorize(doc: Sequence[str], vocab: Vocabulary, weighting: Weighting | Scheme | str = Scheme.TFIDF) -> FeatureVector:
    """Weighted sparse vector of one document; unknown terms are ignored."""
    if not isinstance(weighting, Weighting):
        weighting = Weighting(Scheme(weighting))
    counts = Counter(vocab.index[t] for t in doc if t in vocab.index)
    dl = sum(counts.values())
    idx = sorted(counts)
    out_i, out_w = [], []
    for j in idx:
        tf = counts[j]
        s = weighting.scheme
        if s is Scheme.PRESENCE:
            val = 1.0
        elif s is Scheme.TF:
            val = float(tf)
        elif s is Scheme.TFIDF:
            val = tf * _idf(vocab, j, weighting)
        else:
            k1, b = weighting.k1, weighting.b
            norm = k1 * ((1.0 - b) + b * dl / vocab.avgdl)
            if weighting.standard_bm25:
                norm += tf
            val = (k1 + 1.0) * tf / norm * _idf(vocab, j, weighting)
        if val != 0.0:
            out_i.append(j)
            out_w.append(val)
    return FeatureVector(np.array(out_i, dtype=np.int64), np.array(out_w, dtype=float))


def to_matrix(vectors: Sequence[FeatureVector], n_features: int) -> sp.csr_matrix:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v) for v in vectors])
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), n_features))


def vectorize_all(
    docs: Iterable[Sequence[str]], vocab: Vocabulary, weighting: Weighting | Scheme | str = Scheme.TFIDF
) -> sp.csr_matrix:
    return to_matrix([vectorize(d, vocab, weighting) for d in docs], len(vocab))


# --- sparse feature file -------------------------------------------------
#
# line 1: JSON header (V, N, scheme, params, vocabulary checksum, ...)
# then one document per line:  <label>\t<i>:<w> <i>:<w> ...


def format_rows(X: sp.csr_matrix, labels: Sequence[str]) -> list[str]:
    X = X.tocsr()
    lines = []
    for r, label in enumerate(labels):
        lo, hi = X.indptr[r], X.indptr[r + 1]
        pairs = " ".join(f"{int(i)}:{float(v)!r}" for i, v in zip(X.indices[lo:hi], X.data[lo:hi]))
        lines.append(f"{label}\t{pairs}")
    return lines


def parse_rows(lines: Iterable[str], n_features: int) -> tuple[sp.csr_matrix, list[str]]:
    labels: list[str] = []
    vectors = []
    for line in lines:
        if not line.strip():
            continue
        label, _, rest = line.partition("\t")
        labels.append(label)
        idx, vals = [], []
        for tok in rest.split():
            i, v = tok.split(":")
            idx.append(int(i))
            vals.append(float(v))
        if idx and max(idx) >= n_features:
            raise SchemaError(f"feature index {max(idx)} out of range for V={n_features}")
        vectors.append(FeatureVector(np.array(idx, dtype=np.int64), np.array(vals)))
    return to_matrix(vectors, n_features), labels
