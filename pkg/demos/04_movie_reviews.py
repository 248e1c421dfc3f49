"""
Sentiment on movie reviews
==========================

Ten-fold stratified cross-validation of the SVM and Naive Bayes
classifiers on the polarity reviews, across every weighting scheme.

By default this reads the vendored 750+750 subset. Pass a path to the
full corpus's ``txt_sentoken`` directory to use all 2000 reviews:

    python demos/04_movie_reviews.py /data/review_polarity/txt_sentoken
"""

from __future__ import annotations

import csv
import gzip
import io
import sys
from pathlib import Path

from newsvol.evaluation import cross_validate
from newsvol.pipeline import Corpus, PipelineConfig

SUBSET = Path(__file__).resolve().parent.parent / "tests" / "data" / "polarity_subset.csv.gz"


def load(root: str | None):
    if root:
        texts, labels = [], []
        for label in ("neg", "pos"):
            for p in sorted((Path(root) / label).glob("*.txt")):
                texts.append(p.read_text(encoding="utf-8", errors="replace"))
                labels.append(label)
        return texts, labels
    rows = list(csv.DictReader(io.StringIO(gzip.decompress(SUBSET.read_bytes()).decode("utf-8"))))
    return [r["text"] for r in rows], [r["label"] for r in rows]


texts, labels = load(sys.argv[1] if len(sys.argv) > 1 else None)
corpus = Corpus(texts)  # tokenization is cached across folds and configs
print(f"{len(texts)} reviews\n")
print(f"{'features':<10} {'SVM':>7} {'NB':>7}")
for scheme in ("presence", "tf", "tfidf", "bm25"):
    accs = []
    for model in ("svm", "nb"):
        cv = cross_validate(corpus, labels, PipelineConfig(scheme=scheme, model=model), k=10, seed=42)
        accs.append(cv.mean_accuracy)
    print(f"{scheme:<10} {100 * accs[0]:6.1f}% {100 * accs[1]:6.1f}%")
