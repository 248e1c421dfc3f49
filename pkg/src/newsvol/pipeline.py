"""Text -> features -> classifier, refit from scratch on every training split.

Everything learned from data (rare-term pruning, unigram frequency floor,
vocabulary, document frequencies, the classifier) comes from the training
indices only, so cross-validation folds never see their test documents.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, replace
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import textproc
from .errors import ContractError
from .features import Scheme, Vocabulary, Weighting, build_vocabulary, vectorize_all
from .models import NBModel, SVMModel, predict, train_nb, train_svm

SCHEMES = ("presence", "tf", "tfidf", "bm25", "ngram")
MODELS = ("svm", "nb", "bnb")


@dataclass(frozen=True)
class PipelineConfig:
    """Feature and classifier settings.

    ``min_count`` drops bag-of-words terms seen fewer times than that in
    the training documents (4 removes words with frequency 3 or less).
    The ``ngram`` scheme instead keeps every keyphrase and applies
    ``unigram_min_freq`` to normalized unigrams, weighting terms with
    ``ngram_weighting``.
    """

    scheme: str = "tfidf"
    model: str = "svm"
    C: float = 1.0
    alpha: float = 1.0
    k1: float = 1.2
    b: float = 0.95
    standard_bm25: bool = False
    log_base: str = "e"
    min_count: int = 4
    min_df: int = 1
    unigram_min_freq: int = textproc.MIN_UNIGRAM_FREQ
    ngram_weighting: str = "tf"
    max_epochs: int = 1000
    seed: int = 42

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ContractError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.model not in MODELS:
            raise ContractError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.log_base not in ("e", "10"):
            raise ContractError("log_base must be 'e' or '10'")

    def with_params(self, **params) -> "PipelineConfig":
        return replace(self, **params)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def weighting(self) -> Weighting:
        scheme = self.ngram_weighting if self.scheme == "ngram" else self.scheme
        base = math.e if self.log_base == "e" else 10.0
        return Weighting(Scheme(scheme), self.k1, self.b, base, self.standard_bm25)


class Corpus:
    """Documents plus cached, split-independent text analyses."""

    def __init__(self, texts: Sequence[str]):
        self.texts = list(texts)

    def __len__(self) -> int:
        return len(self.texts)

    @cached_property
    def tokens(self) -> list[list[str]]:
        return [textproc.tokenize_and_filter(t) for t in self.texts]

    @cached_property
    def unigrams(self) -> list[list[str]]:
        return [[textproc.normalize(w) for w in toks] for toks in self.tokens]

    @cached_property
    def phrases(self) -> list[list[str]]:
        return [[kp.text for kp in textproc.keyphrases(t)] for t in self.texts]


def terms(corpus: Corpus, idx: Sequence[int], train_idx: Sequence[int], cfg: PipelineConfig) -> list[list[str]]:
    """Feature terms of documents ``idx``, with pruning statistics taken
    from ``train_idx`` only."""
    if cfg.scheme == "ngram":
        freq: Counter = Counter()
        for i in train_idx:
            freq.update(corpus.unigrams[i])
        floor = cfg.unigram_min_freq
        return [corpus.phrases[i] + [u for u in corpus.unigrams[i] if freq[u] >= floor] for i in idx]
    counts: Counter = Counter()
    for i in train_idx:
        counts.update(corpus.tokens[i])
    return [[t for t in corpus.tokens[i] if counts[t] >= cfg.min_count] for i in idx]


@dataclass
class FittedPipeline:
    config: PipelineConfig
    vocab: Vocabulary
    model: SVMModel | NBModel
    train_idx: np.ndarray

    def transform(self, corpus: Corpus, idx: Sequence[int]) -> sp.csr_matrix:
        docs = terms(corpus, idx, self.train_idx, self.config)
        return vectorize_all(docs, self.vocab, self.config.weighting)

    def predict(self, corpus: Corpus, idx: Sequence[int]) -> list:
        return predict(self.model, self.transform(corpus, idx))


def featurize(corpus: Corpus, train_idx: Sequence[int], cfg: PipelineConfig) -> tuple[Vocabulary, sp.csr_matrix]:
    train_idx = np.asarray(train_idx)
    docs = terms(corpus, train_idx, train_idx, cfg)
    vocab = build_vocabulary(docs, cfg.min_df)
    return vocab, vectorize_all(docs, vocab, cfg.weighting)


def train_model(X, y: Sequence, cfg: PipelineConfig) -> SVMModel | NBModel:
    if cfg.model == "svm":
        return train_svm(X, y, C=cfg.C, max_epochs=cfg.max_epochs, seed=cfg.seed)
    variant = "bernoulli" if cfg.model == "bnb" else "multinomial"
    return train_nb(X, y, variant=variant, alpha=cfg.alpha)


def fit(corpus: Corpus, labels: Sequence, train_idx: Sequence[int], cfg: PipelineConfig) -> FittedPipeline:
    train_idx = np.asarray(train_idx)
    vocab, X = featurize(corpus, train_idx, cfg)
    model = train_model(X, [labels[i] for i in train_idx], cfg)
    model.vocab_checksum = vocab.checksum
    return FittedPipeline(cfg, vocab, model, train_idx)
