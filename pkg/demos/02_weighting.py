"""
Term weighting schemes
======================

Presence, raw counts, TF-IDF and the BM25 variant on a three-document
corpus, printed side by side.
"""

from __future__ import annotations

from newsvol.features import Scheme, Weighting, build_vocabulary, vectorize_all
from newsvol.textproc import tokenize_and_filter

texts = [
    "Shares surge after record profit, shares climb again",
    "Profit warning sends shares lower",
    "Regulator opens probe into accounting",
]
docs = [tokenize_and_filter(t) for t in texts]
vocab = build_vocabulary(docs)
print("vocabulary:", " ".join(vocab.terms))
print(f"avg document length {vocab.avgdl:.2f}\n")

# BM25 here leaves tf out of the denominator; standard_bm25=True adds it back.
schemes = {
    "presence": Weighting(Scheme.PRESENCE),
    "tf": Weighting(Scheme.TF),
    "tfidf": Weighting(Scheme.TFIDF),
    "bm25": Weighting(Scheme.BM25),
    "bm25 (standard)": Weighting(Scheme.BM25, standard_bm25=True),
}
for name, w in schemes.items():
    X = vectorize_all(docs, vocab, w).toarray()
    print(name)
    for d, row in enumerate(X):
        cells = ", ".join(f"{vocab.terms[j]}={v:.3f}" for j, v in enumerate(row) if v)
        print(f"  doc {d}: {cells or '(empty)'}")

# "shares" sits in 2 of 3 documents: its TF-IDF weight is small but positive,
# while BM25's idf ln((N - df + 0.5) / (df + 0.5)) turns negative.
